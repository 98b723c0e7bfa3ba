//! Variational reduction of `L(Ψ) = 0` onto tensor-product wavelet modes.
//!
//! A [`ModeCatalog`] holds orthonormal periodic modes per axis (`t`, `q`, `p`), [`assemble`]
//! projects an [`OperatorSpec`] onto them, giving exactly `d·Nⁿ` equations, [`solve`] reduces
//! them with dense LU or damped Newton, and [`reconstruct`] / [`decompose`] map coefficients
//! back to fields split into slow and per-scale fast parts. [`synthesize_from_matrix`]
//! builds pattern fields directly from a coefficient matrix.
//!
//! Evolution problems (`∂_t u = R(u)`) are solved in integrated form along the time axis:
//! periodic time modes make the Galerkin `d/dt` singular (its symbol vanishes at the
//! constant and the Nyquist mode), while `u − u(0) − ∫₀ᵗ R(u)` is well posed.

mod assemble;
mod benchmark;
mod cutoff;
mod modes;
mod reconstruct;
mod solve;
mod spec;
mod synth;
mod tensor;

pub use assemble::{assemble, GalerkinSystem, InitialData};
pub use benchmark::LiouvilleBenchmark;
pub use cutoff::{cutoff_check, CutoffReport};
pub use modes::{AxisModes, AxisSpec, ModeCatalog, ModeKind, ModeTag, DEFAULT_OVERSAMPLING, GRAM_TOLERANCE};
pub use reconstruct::{decompose, reconstruct, spatial_coefficients, spatial_field, Reconstruction, ScaleDecomposition};
pub use solve::{solve, Solution, LINEAR_TOLERANCE, MAX_CONDITION, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE};
pub use spec::{clear_denominator, Axis, Factor, Monomial, OperatorSpec, Poly3, RationalPart, Term};
pub use synth::{analyze_to_matrix, synthesize_from_matrix, CoefficientMatrix, MatrixStructure, DEFAULT_BAND_WIDTH};
