use std::collections::BTreeSet;

use ndarray::Array2;

use super::dwt::{idwt_1d, MraCoefficients};
use super::dwt2::{idwt_2d, Mra2dCoefficients};
use crate::error::{Error, Result};
use crate::wavelet::FilterPair;

/// Scale bands kept by [`scale_truncate`]; detail level 0 is the coarsest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleSelection {
    pub coarse: bool,
    pub details: BTreeSet<usize>,
}

impl ScaleSelection {
    pub fn all(levels: usize) -> Self {
        Self { coarse: true, details: (0..levels).collect() }
    }

    pub fn none() -> Self {
        Self { coarse: false, details: BTreeSet::new() }
    }

    /// Coarse block plus the `depth` coarsest detail levels.
    pub fn up_to_depth(depth: usize) -> Self {
        Self { coarse: true, details: (0..depth).collect() }
    }

    fn check(&self, levels: usize) -> Result<()> {
        match self.details.iter().find(|&&j| j >= levels) {
            Some(&j) => Err(Error::UnknownLevel(j)),
            None => Ok(()),
        }
    }
}

pub fn scale_truncate(c: &MraCoefficients, keep: &ScaleSelection, f: &FilterPair) -> Result<Vec<f64>> {
    keep.check(c.levels())?;
    let mut t = c.clone();
    if !keep.coarse {
        t.coarse.iter_mut().for_each(|v| *v = 0.0);
    }
    for (j, d) in t.details.iter_mut().enumerate() {
        if !keep.details.contains(&j) {
            d.iter_mut().for_each(|v| *v = 0.0);
        }
    }
    idwt_1d(&t, f)
}

pub fn scale_truncate_2d(c: &Mra2dCoefficients, keep: &ScaleSelection, f: &FilterPair) -> Result<Array2<f64>> {
    keep.check(c.levels())?;
    let mut t = c.clone();
    if !keep.coarse {
        t.coarse.fill(0.0);
    }
    for (j, d) in t.details.iter_mut().enumerate() {
        if !keep.details.contains(&j) {
            d.low_high.fill(0.0);
            d.high_low.fill(0.0);
            d.high_high.fill(0.0);
        }
    }
    idwt_2d(&t, f)
}

/// `W_0² + Σ_i Σ_x W_i(x)² μ_i(x)`: the quadratic Fock-space form of a state hierarchy.
pub fn fock_norm(w0: f64, states: &[&[f64]], measures: &[&[f64]]) -> Result<f64> {
    if states.len() != measures.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} states but {} measures",
            states.len(),
            measures.len()
        )));
    }
    let mut total = w0 * w0;
    for (i, (s, m)) in states.iter().zip(measures).enumerate() {
        if s.len() != m.len() {
            return Err(Error::ShapeMismatch(format!(
                "state {i} has {} entries, its measure {}",
                s.len(),
                m.len()
            )));
        }
        total += s.iter().zip(m.iter()).map(|(w, mu)| w * w * mu).sum::<f64>();
    }
    Ok(total)
}
