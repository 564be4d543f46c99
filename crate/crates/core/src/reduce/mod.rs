//! Recursive elimination of parameters from a decision-affine matrix
//! polynomial inequality over a triangular domain.
//!
//! Eliminating the last parameter `p_j` replaces `L ≻ 0` by the pair
//! `R_1 = G - Lambda'_1(H_1) - Lambda'_2(H_2) ≻ 0`, `R_2 = H_2 ≻ 0`, where `G`
//! is the Gram lifting of `L` in `p_j`, the pencil is `M = (I_d, 0)`,
//! `N = (0, I_d)`, `Theta_1` selects the real axis and `Theta_2` the interval
//! `[a_j, b_j]`. After `k` steps the `2^k` parameter-free inequalities form one
//! block-diagonal LMI.

mod domain;
mod engine;
mod substitute;

pub use domain::{interval_theta, TriangularDomain, VALIDATION_POINTS};
pub use engine::{
    eliminate_last, reduce_full, reduce_system, BlockDescriptor, Elimination, NodeTrace, Reduction,
    ReductionTrace, StepTrace,
};
pub use substitute::{soundness_grid_check, substitute_polynomial_solution, Substitution};

use thiserror::Error;

use crate::poly::{GramMode, PolyError};
use crate::sdp::SdpError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("variables {found:?} do not match the domain variables {expected:?}")]
    VarMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("input has decision arity {arity} but only {labels} labels")]
    Arity { labels: usize, arity: usize },
    #[error("input is not Hermitian")]
    NotHermitian,
    #[error("no parameter left to eliminate")]
    NothingToEliminate,
    #[error("step {step} (eliminating {var}) produces a block of size {size} above the limit {limit}")]
    BlockTooLarge { step: usize, var: String, size: usize, limit: usize },
    #[error("invalid schedule: {0}")]
    Schedule(String),
}

/// Multiplier degrees per elimination step (step 0 eliminates the last
/// variable). `None` selects the default degree: the larger of the total
/// degree of the Gram matrix and of `Theta_2` in the remaining variables,
/// rounded up to even. `bump` is added to every step's degree; auto-increment
/// sweeps raise it while the largest degree stays within `cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierSchedule {
    pub degrees: Vec<Option<u32>>,
    pub bump: u32,
    pub cap: u32,
}

impl Default for MultiplierSchedule {
    fn default() -> Self {
        MultiplierSchedule {
            degrees: Vec::new(),
            bump: 0,
            cap: 8,
        }
    }
}

impl MultiplierSchedule {
    /// Default degrees with auto-increment up to `cap`.
    pub fn auto(cap: u32) -> Self {
        MultiplierSchedule {
            cap,
            ..Default::default()
        }
    }

    /// Explicit degrees, no auto-increment.
    pub fn fixed(degrees: &[u32]) -> Self {
        MultiplierSchedule {
            degrees: degrees.iter().map(|&d| Some(d)).collect(),
            bump: 0,
            cap: degrees.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn with_bump(&self, bump: u32) -> Self {
        MultiplierSchedule {
            bump,
            ..self.clone()
        }
    }

    /// Degree at `step` given the default for that step.
    pub fn degree(&self, step: usize, default: u32) -> u32 {
        self.degrees.get(step).copied().flatten().unwrap_or(default) + self.bump
    }

    pub fn validate(&self) -> Result<(), ReduceError> {
        if let Some(d) = self.degrees.iter().flatten().find(|&&d| d > self.cap) {
            return Err(ReduceError::Schedule(format!("degree {d} exceeds cap {}", self.cap)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    pub gram_mode: GramMode,
    /// Largest allowed block (complex size) produced by any step.
    pub max_block: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            gram_mode: GramMode::Balanced,
            max_block: 256,
        }
    }
}
