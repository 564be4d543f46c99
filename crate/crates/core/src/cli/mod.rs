//! Problem files, pipeline dispatch and reports.
//!
//! A problem file is a sequence of statements separated by newlines or `;`:
//! variable declarations `x in [lo, hi]` (bounds may use earlier variables
//! only) and assignments `key = value`. Values are polynomial expressions
//! (`+ - * ^`, parentheses, nonnegative integer powers), nested bracket lists
//! for matrices, or curve selectors. `#` starts a comment.
//!
//! | key | meaning |
//! |-----|---------|
//! | `target` | `polymin`, `certify`, `lyap` or `kyp_check` |
//! | `g` | objective polynomial (polymin, certify) |
//! | `A`, `B`, `G` | system and constraint matrices (lyap) |
//! | `M`, `N`, `G`, `theta1`, `theta2` | pencil, frequency matrix and curves (kyp_check) |
//! | `schedule.cap`, `schedule.degrees` | multiplier schedule |
//! | `solver.eps`, `solver.grid` | strictness margin, oracle grid |
//! | `seed`, `samples` | sampling controls |
//! | `lyap.h_degree`, `lyap.eta_degree` | Lyapunov parameterization degrees |
//!
//! Curves: `imaginary_axis`, `real_axis`, `disk(r)`, `interval(a, b)` or a
//! real symmetric 2x2 matrix.

mod problem;
mod report;
mod run;

pub use problem::{emit_problem, fmt_num, fmt_poly, parse_problem, Payload, ProblemFile, Settings, Target, ThetaDecl};
pub use report::{Report, Value, SCHEMA};
pub use run::{run, RunOptions, RunOutput, DEFAULT_SAMPLES, EXIT_INPUT, EXIT_OK, EXIT_REFUSED, SAMPLE_GRID};

use thiserror::Error;

/// Line and column (both 1-based) of a token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("bound refers to a variable that is not declared before it: {0}")]
    ForwardReference(String),
    #[error("exponent must be a nonnegative integer, found {0}")]
    NonIntegerExponent(String),
    #[error("'{0}' is given more than once")]
    Duplicate(String),
    #[error("missing {0}")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}
