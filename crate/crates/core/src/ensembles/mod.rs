//! Wigner fields from wavefunctions, incoherent mixtures and the atom–field Fock model.

mod fock;
mod wavefunction;

pub use fock::{run_fock_model, FockModelSpec, FockRun};
pub use wavefunction::{wigner_from_wavefunction, WavefunctionGrid};

use ndarray::Array2;

use crate::dynamics::{FieldKind, WignerField};
use crate::error::{Error, Result};

/// One weighted entry of an ensemble.
#[derive(Debug, Clone)]
pub enum Component {
    Field(WignerField),
    Wavefunction(WavefunctionGrid),
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub components: Vec<(f64, Component)>,
    /// Momentum grid used to convert wavefunction components.
    pub p_axis: Option<(f64, f64, usize)>,
}

/// `W = Σ_i w_i W_i` with `Σ w_i = 1`.
pub fn mix(spec: &EnsembleSpec) -> Result<WignerField> {
    if spec.components.is_empty() {
        return Err(Error::EmptyField);
    }
    let total: f64 = spec.components.iter().map(|(w, _)| *w).sum();
    if spec.components.iter().any(|(w, _)| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightsNotNormalized(total));
    }
    let mut fields = Vec::with_capacity(spec.components.len());
    for (_, c) in &spec.components {
        fields.push(match c {
            Component::Field(f) => f.clone(),
            Component::Wavefunction(psi) => {
                let p = spec
                    .p_axis
                    .ok_or_else(|| Error::InvalidArgument("wavefunction component needs a momentum grid".into()))?;
                wigner_from_wavefunction(psi, p, psi.hbar)?
            }
        });
    }
    let first = &fields[0];
    let mut values = Array2::zeros(first.values.dim());
    for ((w, _), f) in spec.components.iter().zip(&fields) {
        first.check_compatible(f)?;
        if (f.hbar - first.hbar).abs() > 1e-12 * first.hbar.abs().max(1.0) {
            return Err(Error::GridMismatch("components carry different hbar".into()));
        }
        values.scaled_add(*w, &f.values);
    }
    let kind = if fields.iter().all(|f| f.kind == FieldKind::Distribution) {
        FieldKind::Distribution
    } else {
        FieldKind::Pattern
    };
    WignerField::new(first.grid, values, first.hbar, first.mass, kind)
}
