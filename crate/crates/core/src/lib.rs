//! Wavelet-Galerkin laboratory for Wigner-function phase-space dynamics.
//!
//! The crate is organised bottom-up: [`wavelet`] builds filter banks, [`mra`] runs
//! periodic multiresolution transforms, [`operator`] projects operators into the
//! non-standard form, [`dynamics`] integrates the Moyal, Liouville and Lindblad
//! equations, [`ensembles`] builds Wigner fields from wavefunctions, [`galerkin`]
//! assembles and solves the variational systems and [`pattern`] classifies fields.

// `!(x > 0.0)` is the idiom that also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod ensembles;
pub mod error;
pub mod galerkin;
pub mod linalg;
pub mod mra;
pub mod operator;
pub mod pattern;
pub mod wavelet;

pub use dynamics::{PhaseSpaceGrid, WignerField};
pub use error::{Error, Result};
pub use operator::PolynomialPotential;
pub use wavelet::{Family, FilterPair, WaveletBasis};
