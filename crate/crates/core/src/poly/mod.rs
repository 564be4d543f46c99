//! Multivariate polynomials, Hermitian matrix polynomials and
//! decision-affine matrix polynomials.

mod affine;
mod gram;
mod matrix;
mod monomial;
mod param;
mod polynomial;

pub use affine::DecisionAffineMatrixPoly;
pub use gram::{gram_half_degree, gram_lift, lift_matrix, zeta_expand, GramLift, GramMode};
pub use matrix::MatrixPoly;
pub use monomial::Monomial;
pub use param::{Field, HermitianParam};
pub use polynomial::{
    prefix_vars, vars, Coefficient, ComplexPoly, Degree, Polynomial, ScalarPoly, Vars,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("variable order mismatch: {left:?} vs {right:?}")]
    VarMismatch { left: Vec<String>, right: Vec<String> },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("decision index {index} out of range for arity {arity}")]
    DecisionIndex { index: usize, arity: usize },
    #[error("matrix polynomial is not Hermitian")]
    NotHermitian,
    #[error("polynomial has no variables to lift")]
    NoVariables,
}
