use rayon::prelude::*;

use crate::dynamics::{evolve, EvolveOptions, RhsKind, Trajectory, Truncation, WignerField};
use crate::error::{Error, Result};
use crate::operator::PolynomialPotential;

/// Nonresonant atom in a quantized field: level `n` sees `U_n(x) = U0 · n · g(x)`.
#[derive(Debug, Clone)]
pub struct FockModelSpec {
    pub u0: f64,
    pub profile: PolynomialPotential,
    /// Amplitudes `w_n`, `n = 0..=N_max`; the mixture uses `|w_n|²`.
    pub weights: Vec<f64>,
    /// Initial Wigner function per level; a single entry is shared by all levels.
    pub initial: Vec<WignerField>,
}

impl FockModelSpec {
    pub fn level_potential(&self, n: usize) -> PolynomialPotential {
        PolynomialPotential::new(self.profile.coefficients.iter().map(|c| c * self.u0 * n as f64).collect())
    }

    fn initial_for(&self, n: usize) -> &WignerField {
        if self.initial.len() == 1 {
            &self.initial[0]
        } else {
            &self.initial[n]
        }
    }
}

#[derive(Debug, Clone)]
pub struct FockRun {
    pub levels: Vec<Trajectory>,
    /// `Σ |w_n|² W_n` at every snapshot time.
    pub mixed: Vec<WignerField>,
    pub times: Vec<f64>,
}

pub fn run_fock_model(spec: &FockModelSpec, opts: &EvolveOptions) -> Result<FockRun> {
    let levels = spec.weights.len();
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one Fock level is required".into()));
    }
    let total: f64 = spec.weights.iter().map(|w| w * w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightsNotNormalized(total));
    }
    if spec.initial.len() != 1 && spec.initial.len() != levels {
        return Err(Error::ShapeMismatch(format!(
            "{} initial states for {levels} levels",
            spec.initial.len()
        )));
    }
    for w in &spec.initial {
        spec.initial[0].check_compatible(w)?;
    }
    let kind = RhsKind::Moyal(Truncation::Auto);
    let trajectories: Vec<Trajectory> = (0..levels)
        .into_par_iter()
        .map(|n| evolve(spec.initial_for(n), &spec.level_potential(n), &kind, opts))
        .collect::<Result<_>>()?;
    let times = trajectories[0].times.clone();
    let mixed = (0..times.len())
        .map(|s| {
            let mut w = trajectories[0].snapshots[s].clone();
            w.values.fill(0.0);
            for (n, t) in trajectories.iter().enumerate() {
                w.values.scaled_add(spec.weights[n] * spec.weights[n], &t.snapshots[s].values);
            }
            w
        })
        .collect();
    Ok(FockRun { levels: trajectories, mixed, times })
}
