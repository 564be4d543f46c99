//! Parameter-dependent linear matrix inequalities over polynomial-box domains.
//!
//! A strict LMI `L(p, h) > 0` whose data depend polynomially on parameters
//! `p` ranging over a triangular domain
//! `a_1 <= p_1 <= b_1, a_i(p_1..p_{i-1}) <= p_i <= b_i(p_1..p_{i-1})`
//! is reduced, one parameter at a time, to a finite block-diagonal LMI that
//! no longer depends on `p`. Every strictly feasible point of the reduced LMI
//! yields a decision vector `h` with `L(p, h) > 0` on the whole domain.
//!
//! Module map:
//!
//! * [`poly`]: sparse multivariate polynomials, matrix polynomials, decision-affine
//!   matrix polynomials, and the Gram lifting in the last variable.
//! * [`kyp`]: curves and domains of the extended complex plane described by a 2x2
//!   Hermitian matrix, the generalized Lyapunov operator and its adjoint, KYP
//!   right-hand sides and a frequency-sweep check.
//! * [`reduce`]: the elimination engine producing the parameter-free LMI.
//! * [`sdp`]: real embedding of Hermitian LMIs and a primal-dual interior-point
//!   solver for feasibility and linear objectives.
//! * [`apps`]: polynomial minimization / positivity certificates and
//!   parameter-dependent Lyapunov function synthesis.
//! * [`cli`]: problem-file parser, pipeline dispatch and report format.

pub mod apps;
pub mod cli;
pub mod error;
pub mod kyp;
pub mod linalg;
pub mod poly;
pub mod reduce;
pub mod sdp;

pub use error::{Error, Result};
