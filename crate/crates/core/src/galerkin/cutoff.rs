use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Outcome of the `‖W^{N+1} − W^N‖ ≤ ε` cutoff test over a resolution history.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffReport {
    pub resolutions: Vec<usize>,
    /// `differences[i] = ‖W_{i+1} − W_i‖`.
    pub differences: Vec<f64>,
    pub epsilon: f64,
    /// The first resolution whose successor lies within `ε`.
    pub accepted: Option<usize>,
    /// Whether the differences decrease strictly.
    pub monotone: bool,
}

impl CutoffReport {
    pub fn converged(&self) -> bool {
        self.accepted.is_some()
    }

    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "resolutions = {}", join(self.resolutions.iter().map(|n| n.to_string()).collect()));
        let _ = writeln!(s, "differences = {}", join(self.differences.iter().map(|d| format!("{d:.9e}")).collect()));
        let _ = writeln!(s, "epsilon = {:.3e}", self.epsilon);
        match self.accepted {
            Some(n) => {
                let _ = writeln!(s, "converged_at = {n}");
            }
            None => s.push_str("converged_at = none\nstatus = unconverged\n"),
        }
        let _ = writeln!(s, "monotone = {}", self.monotone);
        s
    }
}

/// Plain discrete L² differences (`measure` is the cell area) between consecutive fields.
pub fn cutoff_check(history: &[(usize, Vec<f64>)], measure: f64, epsilon: f64) -> Result<CutoffReport> {
    if let Some((_, first)) = history.first() {
        if let Some((n, bad)) = history.iter().find(|(_, f)| f.len() != first.len()) {
            return Err(Error::ShapeMismatch(format!(
                "field for N = {n} has {} samples, expected {}",
                bad.len(),
                first.len()
            )));
        }
    }
    let differences: Vec<f64> = history
        .windows(2)
        .map(|w| (w[1].1.iter().zip(&w[0].1).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * measure).sqrt())
        .collect();
    let accepted = differences.iter().position(|&d| d <= epsilon).map(|i| history[i].0);
    let monotone = differences.windows(2).all(|w| w[1] < w[0]);
    if !monotone {
        log::warn!("cutoff differences are not monotone: {differences:?}");
    }
    Ok(CutoffReport { resolutions: history.iter().map(|h| h.0).collect(), differences, epsilon, accepted, monotone })
}
