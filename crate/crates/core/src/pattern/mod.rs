//! Pattern metrics and the label decision tree.
//!
//! The categories are operational, not derived: "entangled-like" means a quasi-probability
//! with a visible negative part (single fields carry no bipartite structure), and every
//! threshold in [`Thresholds`] is a calibration constant fixed on the golden syntheses.

use std::fmt;
use std::fmt::Write as _;

use crate::dynamics::{FieldKind, WignerField};
use crate::error::{Error, Result};
use crate::mra::{log2_exact, quadtree_best_entropy};
use crate::wavelet::{build_filter_pair, Family};

/// Mass fraction used for the localization test.
pub const TOP_MASS_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Localized,
    Waveleton,
    ChaoticLike,
    EntangledLike,
    Unclassified,
}

impl Label {
    pub const ALL: [Label; 5] =
        [Label::Localized, Label::Waveleton, Label::ChaoticLike, Label::EntangledLike, Label::Unclassified];

    pub fn name(self) -> &'static str {
        match self {
            Label::Localized => "localized",
            Label::Waveleton => "waveleton",
            Label::ChaoticLike => "chaotic-like",
            Label::EntangledLike => "entangled-like",
            Label::Unclassified => "unclassified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Applied to the negativity fraction `∫∫ max(0, −W) / ∫∫ |W|`.
    pub negativity: f64,
    /// Upper bound on `top_mass(0.9)`.
    pub localization: f64,
    /// Upper bound on the relative drift per unit time.
    pub stability: f64,
    /// Lower bound on the participation ratio for chaotic-like equidistribution.
    pub participation: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { negativity: 1e-3, localization: 0.1, stability: 1e-2, participation: 0.05 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("negativity", self.negativity),
            ("localization", self.localization),
            ("stability", self.stability),
            ("participation", self.participation),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("threshold {name} = {v} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternReport {
    /// Best-basis Shannon entropy of the normalised Haar quadtree packet energies (nats).
    pub shannon_entropy: f64,
    pub participation_ratio: f64,
    /// Smallest area fraction holding [`TOP_MASS_FRACTION`] of `∫∫ |W|`.
    pub top_mass: f64,
    pub negativity_volume: f64,
    pub negativity_fraction: f64,
    /// Relative L² drift per unit time; `None` for a single field.
    pub stability_drift: Option<f64>,
    /// Whether the field is a quasi-probability, the only kind the negativity test applies to.
    pub quasi_probability: bool,
    pub label: Label,
}

impl PatternReport {
    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "shannon_entropy = {:.12e}", self.shannon_entropy);
        let _ = writeln!(s, "participation_ratio = {:.12e}", self.participation_ratio);
        let _ = writeln!(s, "top_mass_0.9 = {:.12e}", self.top_mass);
        let _ = writeln!(s, "negativity_volume = {:.12e}", self.negativity_volume);
        let _ = writeln!(s, "negativity_fraction = {:.12e}", self.negativity_fraction);
        match self.stability_drift {
            Some(d) => {
                let _ = writeln!(s, "stability_drift = {d:.12e}");
            }
            None => s.push_str("stability_drift = n/a\n"),
        }
        let _ = writeln!(s, "quasi_probability = {}", self.quasi_probability);
        let _ = writeln!(s, "label = {}", self.label);
        s
    }

    pub const CSV_HEADER: &'static str = "name,shannon_entropy,participation_ratio,top_mass_0.9,negativity_volume,negativity_fraction,stability_drift,label";

    pub fn csv_row(&self, name: &str) -> String {
        let drift = self.stability_drift.map_or_else(|| "".to_string(), |d| format!("{d:.12e}"));
        format!(
            "{name},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{drift},{}",
            self.shannon_entropy,
            self.participation_ratio,
            self.top_mass,
            self.negativity_volume,
            self.negativity_fraction,
            self.label
        )
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyField);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("field has non-finite values".into()));
    }
    Ok(())
}

/// `(Σw²)² / (A Σw⁴)` over `w = |W|`; `0` for a zero field.
pub fn participation_ratio(values: &[f64]) -> f64 {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    // scaling by the peak keeps equal weights exactly 1
    let (s2, s4) = values.iter().fold((0.0, 0.0), |(a, b), v| {
        let w = (v / peak) * (v / peak);
        (a + w, b + w * w)
    });
    (s2 * s2 / (values.len() as f64 * s4)).min(1.0)
}

/// Smallest area fraction whose largest `|W|` cells hold `fraction` of the total; the last
/// cell counts fractionally, so equal weights give exactly `fraction`.
pub fn top_mass(values: &[f64], fraction: f64) -> f64 {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || fraction <= 0.0 {
        return 0.0;
    }
    let mut w: Vec<f64> = values.iter().map(|v| v.abs() / peak).collect();
    let total: f64 = w.iter().sum();
    w.sort_unstable_by(|a, b| b.total_cmp(a));
    let target = fraction.min(1.0) * total;
    let mut cum = 0.0;
    for (k, &v) in w.iter().enumerate() {
        if cum + v >= target {
            return (k as f64 + (target - cum) / v) / w.len() as f64;
        }
        cum += v;
    }
    1.0
}

/// `∫∫ max(0, −W) dq dp`.
pub fn negativity_volume(field: &WignerField) -> f64 {
    field.values.iter().map(|v| (-v).max(0.0)).sum::<f64>() * field.grid.cell_area()
}

fn static_report(field: &WignerField) -> Result<PatternReport> {
    let values = field.values.as_slice().map(<[f64]>::to_vec).unwrap_or_else(|| field.values.iter().copied().collect());
    check_values(&values)?;
    let (nq, np) = field.values.dim();
    let depth = log2_exact(nq).zip(log2_exact(np)).map(|(a, b)| a.min(b)).ok_or(Error::NonDyadicShape(nq, np))?;
    // Haar packets are sign-flip covariant, so reflections permute the packet energies
    let haar = build_filter_pair(Family::Haar, 1)?;
    let shannon_entropy = quadtree_best_entropy(&field.values, &haar, depth)?;
    let negativity = negativity_volume(field);
    let abs_mass = values.iter().map(|v| v.abs()).sum::<f64>() * field.grid.cell_area();
    Ok(PatternReport {
        shannon_entropy,
        participation_ratio: participation_ratio(&values),
        top_mass: top_mass(&values, TOP_MASS_FRACTION),
        negativity_volume: negativity,
        negativity_fraction: if abs_mass > 0.0 { negativity / abs_mass } else { 0.0 },
        stability_drift: None,
        quasi_probability: field.kind == FieldKind::Distribution,
        label: Label::Unclassified,
    })
}

/// Metrics of a single field; the stability drift is not available.
pub fn analyze(field: &WignerField, thresholds: &Thresholds) -> Result<PatternReport> {
    let mut report = static_report(field)?;
    report.label = classify(&report, thresholds);
    Ok(report)
}

/// Metrics of the last snapshot plus `(1/T) max_k ‖W_k − W_0‖ / ‖W_0‖` over the window.
pub fn analyze_trajectory(snapshots: &[WignerField], times: &[f64], thresholds: &Thresholds) -> Result<PatternReport> {
    let (Some(first), Some(last)) = (snapshots.first(), snapshots.last()) else {
        return Err(Error::EmptyField);
    };
    if times.len() != snapshots.len() {
        return Err(Error::ShapeMismatch(format!("{} snapshots but {} times", snapshots.len(), times.len())));
    }
    for s in snapshots {
        first.check_compatible(s)?;
    }
    let mut report = static_report(last)?;
    let window = times[times.len() - 1] - times[0];
    let norm0 = first.l2_norm();
    report.stability_drift = if snapshots.len() < 2 || !(window > 0.0) || norm0 == 0.0 {
        None
    } else {
        let max_rel = snapshots
            .iter()
            .map(|s| {
                let d: f64 = s.values.iter().zip(first.values.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                (d * first.grid.cell_area()).sqrt() / norm0
            })
            .fold(0.0, f64::max);
        Some(max_rel / window)
    };
    report.label = classify(&report, thresholds);
    Ok(report)
}

/// The decision tree: negativity first, then localization (stable or not), then spread.
pub fn classify(report: &PatternReport, t: &Thresholds) -> Label {
    let localized = report.top_mass <= t.localization;
    if report.quasi_probability && report.negativity_fraction > t.negativity {
        Label::EntangledLike
    } else if localized && report.stability_drift.is_some_and(|d| d <= t.stability) {
        Label::Waveleton
    } else if localized {
        Label::Localized
    } else if report.participation_ratio >= t.participation {
        Label::ChaoticLike
    } else {
        Label::Unclassified
    }
}
