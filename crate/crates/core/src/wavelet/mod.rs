//! Orthonormal compactly supported wavelet families.

mod cascade;
mod connection;
mod filters;
mod roots;

use std::sync::Arc;

pub use cascade::{cascade_eval, ScalingSamples};
pub use connection::{connection_coeffs, ConnectionCoefficients};
pub use filters::{build_filter_pair, quadrature_mirror, Family, FilterPair, MAX_ORDER};
pub use roots::polynomial_roots;

use crate::error::Result;

/// A filter bank together with its first-derivative stencil when the family is smooth enough.
#[derive(Debug, Clone)]
pub struct WaveletBasis {
    pub filters: Arc<FilterPair>,
    pub derivative: Option<ConnectionCoefficients>,
}

impl WaveletBasis {
    pub fn new(family: Family, order: usize) -> Result<Self> {
        let filters = build_filter_pair(family, order)?;
        let derivative = connection_coeffs(&filters, 1).ok();
        Ok(Self { filters, derivative })
    }

    /// Symmlet-8, the basis of the pattern-synthesis experiments.
    pub fn synthesis_default() -> Self {
        Self::new(Family::Symmlet, 8).expect("symmlet-8 is always available")
    }

    /// Daubechies-3, the default for differential operators.
    pub fn dynamics_default() -> Self {
        Self::new(Family::Daubechies, 3).expect("daubechies-3 is always available")
    }
}
