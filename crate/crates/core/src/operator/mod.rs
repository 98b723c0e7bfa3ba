//! Operators in multiresolution form: non-standard triples, derivative stencils and
//! polynomial multiplication operators.
//!
//! Two application paths coexist. General operators go through the per-level triples
//! `{A_j, B_j, Γ_j}` of [`NonStandardForm`]; derivatives use the single-scale
//! connection-coefficient convolution of [`DerivativeOperator`].

mod derivative;
mod ns_form;
mod potential;

pub use derivative::{derivative_operator, multiplication_operator, DerivativeOperator, DerivativeStencil, DiagonalOperator};
pub use ns_form::{compare_compression, project_operator, CompressionReport, DenseOperator, NonStandardForm, NsLevel, SparseBlock};
pub use potential::PolynomialPotential;
