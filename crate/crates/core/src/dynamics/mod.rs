//! Phase-space evolution: Moyal, classical Liouville and Wigner–Lindblad right-hand
//! sides on a periodic box, RK4 time stepping and snapshot formats.
//!
//! Every term of every right-hand side is a discrete divergence (a stencil with zero
//! weight sum applied along one axis), so the box integral of the rate vanishes up to
//! round-off.

mod evolve;
mod field;
mod grid;
pub mod io;
mod rhs;

pub use evolve::{evolve, stability_bound, EvolveOptions, Trajectory};
pub use field::{FieldKind, WignerField};
pub use grid::PhaseSpaceGrid;
pub use rhs::{
    lindblad_wigner_rhs, liouville_rhs, moyal_coefficient, moyal_rhs, LindbladParams, PhaseSpaceRhs, RhsKind,
    Truncation,
};
