use super::{next_bump_allowed, AppError, PipelineOptions, ORACLE_TOL};
use crate::poly::{DecisionAffineMatrixPoly, MatrixPoly, ScalarPoly};
use crate::reduce::{reduce_full, MultiplierSchedule, Reduction, TriangularDomain};
use crate::sdp::{solve_max_with, AffineLmi, InteriorPoint, SdpSolution, SdpStatus};

/// Improvement below which the schedule sweep stops.
const SWEEP_TOL: f64 = 1e-6;

/// Multipliers `H_1`, `H_2` of one node of one elimination step, evaluated
/// at the solution.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierRecord {
    pub step: usize,
    pub var: String,
    pub path: Vec<u8>,
    pub mult_deg: u32,
    pub h1: MatrixPoly,
    pub h2: MatrixPoly,
}

/// Certified lower bound `h` of `g` over the domain. Only constructed after
/// the grid oracle confirms `g - h >= -1e-7`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositivityCertificate {
    bound: f64,
    solution: Vec<f64>,
    multipliers: Vec<MultiplierRecord>,
    schedule: MultiplierSchedule,
    block_sizes: Vec<usize>,
    solver_margin: f64,
    grid_worst: f64,
}

impl PositivityCertificate {
    fn verified(
        g: &ScalarPoly,
        dom: &TriangularDomain,
        red: &Reduction,
        sol: &SdpSolution,
        schedule: MultiplierSchedule,
        grid: usize,
    ) -> Result<Self, AppError> {
        let bound = sol.y[0];
        let grid_worst = dom
            .grid(grid)
            .iter()
            .map(|p| g.eval(p) - bound)
            .fold(f64::INFINITY, f64::min);
        if !(grid_worst > -ORACLE_TOL) {
            return Err(AppError::Verification {
                what: "lower bound",
                worst: grid_worst,
            });
        }
        let multipliers = red
            .trace
            .steps
            .iter()
            .enumerate()
            .flat_map(|(t, s)| {
                s.nodes.iter().map(move |n| MultiplierRecord {
                    step: t,
                    var: s.var.clone(),
                    path: n.path.clone(),
                    mult_deg: n.mult_deg,
                    h1: n.h1.assemble(&sol.y),
                    h2: n.h2.assemble(&sol.y),
                })
            })
            .collect();
        Ok(PositivityCertificate {
            bound,
            solution: sol.y.clone(),
            multipliers,
            schedule,
            block_sizes: red.lmi.block_sizes(),
            solver_margin: sol.margin,
            grid_worst,
        })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Full decision vector (bound first, then auxiliary variables).
    pub fn solution(&self) -> &[f64] {
        &self.solution
    }

    pub fn multipliers(&self) -> &[MultiplierRecord] {
        &self.multipliers
    }

    pub fn schedule(&self) -> &MultiplierSchedule {
        &self.schedule
    }

    /// Complex sizes of the final LMI blocks.
    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn solver_margin(&self) -> f64 {
        self.solver_margin
    }

    /// Worst `g - h` over the oracle grid.
    pub fn grid_worst(&self) -> f64 {
        self.grid_worst
    }
}

/// One point of the schedule sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    pub bump: u32,
    pub max_degree: Option<u32>,
    pub status: SdpStatus,
    /// Objective when the solver reports a feasible point that passed the
    /// grid oracle.
    pub bound: Option<f64>,
    pub margin: f64,
    pub iterations: usize,
    pub arity: usize,
    pub blocks: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyminOutcome {
    pub bound: Option<f64>,
    pub certificate: Option<PositivityCertificate>,
    pub attempts: Vec<Attempt>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertifyOutcome {
    Certified(PositivityCertificate),
    /// Not a disproof: the multiplier schedule may simply be too small.
    Refused { best: Option<f64>, attempts: Vec<Attempt> },
}

/// `L(p, h) = g(p) - h` with a single decision variable.
pub fn polymin_lmi(g: &ScalarPoly, dom: &TriangularDomain) -> Result<DecisionAffineMatrixPoly, AppError> {
    if g.vars() != dom.vars() {
        return Err(AppError::VarMismatch {
            expected: dom.vars().to_vec(),
            found: g.vars().to_vec(),
        });
    }
    let minus_one = MatrixPoly::identity(dom.vars().clone(), 1).scale((-1.0).into());
    Ok(DecisionAffineMatrixPoly::new(
        MatrixPoly::scalar(g.to_complex()),
        1,
        [(0, minus_one)],
    )?)
}

/// Reduction and real LMI for one schedule (no solve).
pub fn polymin_attempt(
    g: &ScalarPoly,
    dom: &TriangularDomain,
    sched: &MultiplierSchedule,
    opts: &PipelineOptions,
) -> Result<(Reduction, AffineLmi<f64>), AppError> {
    let l = polymin_lmi(g, dom)?;
    let red = reduce_full(&l, dom, sched, &opts.reduce)?;
    let lmi = red.lmi.embed_real_compact();
    Ok((red, lmi))
}

/// Maximizes `h` subject to the reduced LMI of `g - h ≻ 0`, sweeping the
/// schedule bump while the largest multiplier degree stays within the cap
/// and the bound keeps improving.
pub fn polymin(
    g: &ScalarPoly,
    dom: &TriangularDomain,
    sched: &MultiplierSchedule,
    opts: &PipelineOptions,
) -> Result<PolyminOutcome, AppError> {
    let solver = InteriorPoint::new(opts.solve.ipm.clone());
    let mut attempts = Vec::new();
    let mut best: Option<PositivityCertificate> = None;
    let mut bump = 0;
    loop {
        let s = sched.with_bump(bump);
        let (red, lmi) = polymin_attempt(g, dom, &s, opts)?;
        let max_degree = red.trace.max_multiplier_degree();
        if bump > 0 && max_degree.is_none_or(|d| d > sched.cap) {
            break;
        }
        let mut c = vec![0.0; lmi.arity()];
        c[0] = 1.0;
        let sol = solve_max_with(&lmi, &c, opts.eps, &opts.solve, &solver)?;
        let cert = if sol.is_feasible() {
            PositivityCertificate::verified(g, dom, &red, &sol, s, opts.grid).ok()
        } else {
            None
        };
        attempts.push(Attempt {
            bump,
            max_degree,
            status: sol.status,
            bound: cert.as_ref().map(|c| c.bound),
            margin: sol.margin,
            iterations: sol.iterations,
            arity: lmi.arity(),
            blocks: lmi.blocks().len(),
        });
        let improved = match (&cert, &best) {
            (Some(c), Some(b)) => c.bound > b.bound + SWEEP_TOL,
            (Some(_), None) => true,
            _ => false,
        };
        let had_best = best.is_some();
        if improved {
            best = cert;
        } else if had_best {
            break;
        }
        if !next_bump_allowed(max_degree, sched.cap) {
            break;
        }
        bump += 1;
    }
    Ok(PolyminOutcome {
        bound: best.as_ref().map(|c| c.bound),
        certificate: best,
        attempts,
    })
}

/// Certificate of `g > 0` on the domain, i.e. a verified lower bound `h > 0`.
pub fn certify_positive(
    g: &ScalarPoly,
    dom: &TriangularDomain,
    sched: &MultiplierSchedule,
    opts: &PipelineOptions,
) -> Result<CertifyOutcome, AppError> {
    let out = polymin(g, dom, sched, opts)?;
    Ok(match out.certificate {
        Some(c) if c.bound > 0.0 => CertifyOutcome::Certified(c),
        _ => CertifyOutcome::Refused {
            best: out.bound,
            attempts: out.attempts,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(lo: f64, hi: f64) -> TriangularDomain {
        TriangularDomain::boxed(&["p"], &[(lo, hi)]).unwrap()
    }

    fn poly(dom: &TriangularDomain, coeffs: &[f64]) -> ScalarPoly {
        let p = ScalarPoly::var(dom.vars().clone(), "p").unwrap();
        coeffs
            .iter()
            .enumerate()
            .fold(ScalarPoly::zero(dom.vars().clone()), |acc, (i, &c)| &acc + &p.pow(i as u32).scale(c))
    }

    #[test]
    fn quadratic_minimum() {
        let dom = unit(0.0, 2.0);
        let g = poly(&dom, &[0.0, -1.0, 1.0]);
        let out = polymin(&g, &dom, &MultiplierSchedule::default(), &PipelineOptions::default()).unwrap();
        let h = out.bound.unwrap();
        assert!((h + 0.25).abs() < 1e-4, "h = {h}");
        assert!(out.certificate.unwrap().grid_worst() > -ORACLE_TOL);
    }

    #[test]
    fn constant_bound() {
        let dom = unit(-1.0, 1.0);
        let g = poly(&dom, &[7.0]);
        let out = polymin(&g, &dom, &MultiplierSchedule::default(), &PipelineOptions::default()).unwrap();
        let h = out.bound.unwrap();
        assert!(h <= 7.0 && h > 7.0 - 1e-6, "h = {h}");
    }

    #[test]
    fn negative_constant_refused() {
        let dom = unit(-1.0, 1.0);
        let g = poly(&dom, &[-1.0]);
        match certify_positive(&g, &dom, &MultiplierSchedule::default(), &PipelineOptions::default()).unwrap() {
            CertifyOutcome::Refused { best, .. } => assert!((best.unwrap() + 1.0).abs() < 1e-6),
            CertifyOutcome::Certified(_) => panic!("certified -1"),
        }
    }

    #[test]
    fn variable_mismatch() {
        let dom = unit(0.0, 1.0);
        let g = ScalarPoly::constant(crate::poly::vars(&["q"]), 1.0);
        assert!(matches!(polymin_lmi(&g, &dom), Err(AppError::VarMismatch { .. })));
    }
}
