//! Real symmetric flattening of affine LMIs and an embedded SDP solver.
//!
//! Strict inequalities are realized as `⪰ eps I` on blocks scaled by
//! `1 / (1 + |F_0|_F)`. Every reported margin is recomputed from the
//! unscaled blocks by a direct eigenvalue evaluation.

mod exchange;
mod ipm;
mod lmi;

use std::ops::ControlFlow;

pub use exchange::{read_sdpa, write_sdpa};
pub use ipm::{ConeProblem, InteriorPoint, IpmOptions, IpmResult, LpRow, PsdConstraint, SdpSolver};
pub use lmi::{AffineLmi, LmiBlock, VarLabel};

use thiserror::Error;

use crate::linalg::RMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("decision index {index} out of range for arity {arity}")]
    VarIndex { index: usize, arity: usize },
    #[error("objective has length {found}, expected {expected}")]
    ObjectiveLength { expected: usize, found: usize },
    #[error("stacked maps disagree on the meaning of variable {0}")]
    LabelConflict(usize),
    #[error("exchange format error at line {line}: {message}")]
    Exchange { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    /// Recomputed margin is at least `eps / 2`.
    Feasible,
    /// The solver finished without reaching the margin threshold.
    MarginBelowThreshold,
    /// The iteration cap was hit before a certified point was found.
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub y: Vec<f64>,
    /// Minimum eigenvalue over the unscaled blocks at `y`.
    pub margin: f64,
    /// `c^T y` for [`solve_max`].
    pub objective: Option<f64>,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Set when the decision box is active at the solution: the normalized
    /// direction along which the margin or objective keeps improving.
    pub unbounded_direction: Option<Vec<f64>>,
}

impl SdpSolution {
    pub fn is_feasible(&self) -> bool {
        self.status == SdpStatus::Feasible
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub ipm: IpmOptions,
    /// Bound `|y_i| <= box_bound` keeping the primal strictly feasible.
    pub box_bound: f64,
    /// Upper bound on the scaled margin in feasibility mode.
    pub margin_cap: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            ipm: IpmOptions::default(),
            box_bound: 1e5,
            margin_cap: 1.0,
        }
    }
}

/// Default margin for strict inequalities.
pub const DEFAULT_EPS: f64 = 1e-8;

fn block_scales(lmi: &AffineLmi<f64>) -> Vec<f64> {
    lmi.blocks().iter().map(|b| 1.0 / (1.0 + b.constant.norm())).collect()
}

fn box_rows(arity: usize, bound: f64) -> Vec<LpRow> {
    (0..arity)
        .flat_map(|i| [LpRow { c: bound, a: vec![(i, 1.0)] }, LpRow { c: bound, a: vec![(i, -1.0)] }])
        .collect()
}

/// `max t` s.t. scaled blocks `⪰ t I`, `t <= cap`, `|y| <= box`. Variable `t`
/// is the last coordinate.
pub fn feasibility_problem(lmi: &AffineLmi<f64>, opts: &SolveOptions) -> ConeProblem {
    let n = lmi.arity();
    let scales = block_scales(lmi);
    let psd = lmi
        .blocks()
        .iter()
        .zip(&scales)
        .map(|(b, s)| {
            let k = b.constant.nrows();
            let mut a: Vec<(usize, RMatrix)> = b.terms.iter().map(|(i, f)| (*i, f * -s)).collect();
            a.push((n, RMatrix::identity(k, k)));
            PsdConstraint { c: &b.constant * *s, a }
        })
        .collect();
    let mut lp = box_rows(n, opts.box_bound);
    lp.push(LpRow { c: opts.margin_cap, a: vec![(n, 1.0)] });
    let mut b = vec![0.0; n + 1];
    b[n] = 1.0;
    ConeProblem { b, psd, lp }
}

/// `max c^T y` s.t. scaled blocks `⪰ eps I`, `|y| <= box`.
pub fn maximization_problem(lmi: &AffineLmi<f64>, c: &[f64], eps: f64, opts: &SolveOptions) -> ConeProblem {
    let scales = block_scales(lmi);
    let psd = lmi
        .blocks()
        .iter()
        .zip(&scales)
        .map(|(b, s)| {
            let k = b.constant.nrows();
            PsdConstraint {
                c: &b.constant * *s - RMatrix::identity(k, k) * eps,
                a: b.terms.iter().map(|(i, f)| (*i, f * -s)).collect(),
            }
        })
        .collect();
    ConeProblem {
        b: c.to_vec(),
        psd,
        lp: box_rows(lmi.arity(), opts.box_bound),
    }
}

fn scaled_margin(lmi: &AffineLmi<f64>, scales: &[f64], y: &[f64]) -> f64 {
    lmi.block_margins(y)
        .iter()
        .zip(scales)
        .map(|(m, s)| m * s)
        .fold(f64::INFINITY, f64::min)
}

fn box_direction(y: &[f64], bound: f64) -> Option<Vec<f64>> {
    if y.iter().any(|v| v.abs() >= 0.999 * bound) {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        Some(y.iter().map(|v| v / norm).collect())
    } else {
        None
    }
}

/// Seeks `y` with every block `⪰ eps I` using the embedded solver.
pub fn solve_feasible(lmi: &AffineLmi<f64>, eps: f64) -> SdpSolution {
    solve_feasible_with(lmi, eps, &SolveOptions::default(), &InteriorPoint::default())
}

pub fn solve_feasible_with(
    lmi: &AffineLmi<f64>,
    eps: f64,
    opts: &SolveOptions,
    solver: &dyn SdpSolver,
) -> SdpSolution {
    let n = lmi.arity();
    let scales = block_scales(lmi);
    let problem = feasibility_problem(lmi, opts);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut observer = |yt: &[f64]| {
        let y = &yt[..n];
        let m = scaled_margin(lmi, &scales, y);
        if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
            best = Some((m, y.to_vec()));
        }
        if m >= eps {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    };
    let result = solver.solve(&problem, &mut observer);
    let y = best.map(|(_, y)| y).unwrap_or_else(|| vec![0.0; n]);
    let margin = lmi.margin(&y);
    let status = if margin >= eps / 2.0 {
        SdpStatus::Feasible
    } else if result.converged {
        SdpStatus::MarginBelowThreshold
    } else if result.iterations >= opts.ipm.max_iter {
        SdpStatus::IterationLimit
    } else {
        SdpStatus::MarginBelowThreshold
    };
    SdpSolution {
        unbounded_direction: box_direction(&y, opts.box_bound),
        y,
        margin,
        objective: None,
        status,
        iterations: result.iterations,
    }
}

/// Maximizes `c^T y` subject to every block `⪰ eps I`. The returned point is
/// the best iterate whose scaled margin is at least `eps / 2`.
pub fn solve_max(lmi: &AffineLmi<f64>, c: &[f64], eps: f64) -> Result<SdpSolution, SdpError> {
    solve_max_with(lmi, c, eps, &SolveOptions::default(), &InteriorPoint::default())
}

pub fn solve_max_with(
    lmi: &AffineLmi<f64>,
    c: &[f64],
    eps: f64,
    opts: &SolveOptions,
    solver: &dyn SdpSolver,
) -> Result<SdpSolution, SdpError> {
    let n = lmi.arity();
    if c.len() != n {
        return Err(SdpError::ObjectiveLength { expected: n, found: c.len() });
    }
    let scales = block_scales(lmi);
    let problem = maximization_problem(lmi, c, eps, opts);
    let objective = |y: &[f64]| c.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut last = vec![0.0; n];
    let mut observer = |y: &[f64]| {
        last = y.to_vec();
        if scaled_margin(lmi, &scales, y) >= eps / 2.0 {
            let v = objective(y);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, y.to_vec()));
            }
        }
        ControlFlow::Continue(())
    };
    let result = solver.solve(&problem, &mut observer);
    let (y, found) = match best {
        Some((_, y)) => (y, true),
        None => (last, false),
    };
    let margin = lmi.margin(&y);
    let status = if found && margin >= eps / 2.0 {
        SdpStatus::Feasible
    } else if !result.converged && result.iterations >= opts.ipm.max_iter {
        SdpStatus::IterationLimit
    } else {
        SdpStatus::MarginBelowThreshold
    };
    Ok(SdpSolution {
        objective: Some(objective(&y)),
        unbounded_direction: box_direction(&y, opts.box_bound),
        y,
        margin,
        status,
        iterations: result.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> RMatrix {
        RMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(v))
    }

    #[test]
    fn symmetric_interval_margin() {
        // diag(y, 1 - y): the margin is maximal at y = 1/2
        let mut lmi = AffineLmi::<f64>::new(1);
        lmi.push_block(diag(&[0.0, 1.0]), [(0, diag(&[1.0, -1.0]))]).unwrap();
        let opts = SolveOptions { margin_cap: 10.0, ..Default::default() };
        let sol = solve_feasible_with(&lmi, 1.0, &opts, &InteriorPoint::default());
        assert!((sol.y[0] - 0.5).abs() < 1e-6, "{sol:?}");
        assert!((sol.margin - 0.5).abs() < 1e-6);
        assert_eq!(sol.status, SdpStatus::MarginBelowThreshold);
        let sol = solve_feasible(&lmi, 1e-8);
        assert!(sol.is_feasible());
    }

    #[test]
    fn infeasible_constant() {
        let mut lmi = AffineLmi::<f64>::new(0);
        lmi.push_block(-RMatrix::identity(2, 2), []).unwrap();
        let sol = solve_feasible(&lmi, 1e-8);
        assert_eq!(sol.status, SdpStatus::MarginBelowThreshold);
        assert!((sol.margin + 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximize_bounded_scalar() {
        // max h s.t. 1 - h ⪰ eps
        let eps = 1e-8;
        let mut lmi = AffineLmi::<f64>::new(1);
        lmi.push_block(diag(&[1.0]), [(0, diag(&[-1.0]))]).unwrap();
        let sol = solve_max(&lmi, &[1.0], eps).unwrap();
        assert!(sol.is_feasible());
        // scaled: (1 - h) / 2 >= eps
        let h = sol.objective.unwrap();
        assert!(h <= 1.0 - eps && h > 1.0 - 1e-6, "{h}");
        assert!(sol.margin >= eps / 2.0);
    }

    #[test]
    fn maximize_reports_unbounded_direction() {
        let mut lmi = AffineLmi::<f64>::new(1);
        lmi.push_block(diag(&[1.0]), [(0, diag(&[1.0]))]).unwrap();
        let sol = solve_max(&lmi, &[1.0], 1e-8).unwrap();
        assert!(sol.is_feasible());
        assert!(sol.unbounded_direction.is_some());
    }

    #[test]
    fn infeasible_maximization() {
        let mut lmi = AffineLmi::<f64>::new(1);
        lmi.push_block(diag(&[-1.0, -1.0]), [(0, diag(&[1.0, -1.0]))]).unwrap();
        let sol = solve_max(&lmi, &[1.0], 1e-8).unwrap();
        assert!(!sol.is_feasible());
        assert!(sol.margin < 0.0);
    }

    #[test]
    fn objective_length_checked() {
        let lmi = AffineLmi::<f64>::new(2);
        assert!(solve_max(&lmi, &[1.0], 1e-8).is_err());
    }
}
