//! Θ-curves and domains, the generalized Lyapunov operator, KYP right-hand
//! sides and a frequency-sweep oracle.

mod operator;
mod sweep;
mod theta;

pub use operator::{lyap_adjoint, lyap_op};
pub use sweep::{fdi_sweep, kyp_lmi, kyp_rhs, PencilSystem, SweepReport};
pub use theta::{ExtendedComplex, ThetaSpec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KypError {
    #[error("invalid theta: {0}")]
    InvalidTheta(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("G blocks are not Hermitian: G[{0}][{1}] != G[{1}][{0}]^*")]
    NotHermitian(usize, usize),
    #[error("rank(lambda N - M) < n at lambda = {0:?}")]
    RankViolation(ExtendedComplex),
    #[error("the curve of theta1 does not meet the domain of theta2 at any sampled point")]
    EmptyIntersection,
}
