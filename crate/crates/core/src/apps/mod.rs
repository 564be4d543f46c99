//! End-to-end pipelines: polynomial lower bounds and positivity certificates
//! over triangular domains, and parameter-dependent Lyapunov synthesis with
//! an S-procedure multiplier.

mod lyapunov;
mod polymin;

pub use lyapunov::{
    lyap_inequality, lyap_synthesize, lyap_synthesize_with, sample_constraint_check, ConstraintCheck,
    LyapOptions, LyapunovCertificate, LyapunovOutcome, UncertainSystem,
};
pub use polymin::{
    certify_positive, polymin, polymin_attempt, polymin_lmi, Attempt, CertifyOutcome, MultiplierRecord,
    PolyminOutcome, PositivityCertificate,
};

use thiserror::Error;

use crate::kyp::KypError;
use crate::poly::PolyError;
use crate::reduce::{ReduceError, ReduceOptions};
use crate::sdp::{SdpError, SolveOptions, DEFAULT_EPS};

/// Grid-oracle tolerance every certificate must meet.
pub const ORACLE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AppError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Kyp(#[from] KypError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variables {found:?} do not match the domain variables {expected:?}")]
    VarMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("{what} fails the grid oracle: worst value {worst:e}")]
    Verification { what: &'static str, worst: f64 },
}

/// Settings shared by the pipelines.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Strictness margin for `≻ 0`.
    pub eps: f64,
    /// Grid points per axis for the oracle.
    pub grid: usize,
    pub reduce: ReduceOptions,
    pub solve: SolveOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            eps: DEFAULT_EPS,
            grid: 101,
            reduce: ReduceOptions::default(),
            solve: SolveOptions::default(),
        }
    }
}

/// Next bump to try, or `None` once the cap would be exceeded. Default
/// degrees only grow with the bump, so the previous maximum plus one is a
/// lower bound for the next maximum.
fn next_bump_allowed(prev_max: Option<u32>, cap: u32) -> bool {
    matches!(prev_max, Some(d) if d < cap)
}
