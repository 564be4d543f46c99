use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::polymin::Attempt;
use super::{next_bump_allowed, AppError, PipelineOptions, ORACLE_TOL};
use crate::linalg::{hermitian_min_eigenvalue, CMatrix};
use crate::poly::{DecisionAffineMatrixPoly, Field, HermitianParam, MatrixPoly, ScalarPoly};
use crate::reduce::{reduce_system, MultiplierSchedule, TriangularDomain};
use crate::sdp::{solve_feasible_with, InteriorPoint, VarLabel};

/// `dx/dt = A(p) x + B(p) u` with `(x, u)^* G(p) (x, u) >= 0` on the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainSystem {
    a: MatrixPoly,
    b: MatrixPoly,
    g: MatrixPoly,
    dom: TriangularDomain,
}

impl UncertainSystem {
    pub fn new(a: MatrixPoly, b: MatrixPoly, g: MatrixPoly, dom: TriangularDomain) -> Result<Self, AppError> {
        let n = a.rows();
        let m = b.cols();
        if a.cols() != n || b.rows() != n || g.dims() != (n + m, n + m) {
            return Err(AppError::Dimension(format!(
                "A is {:?}, B is {:?}, G is {:?}",
                a.dims(),
                b.dims(),
                g.dims()
            )));
        }
        for mat in [&a, &b, &g] {
            if mat.vars() != dom.vars() {
                return Err(AppError::VarMismatch {
                    expected: dom.vars().to_vec(),
                    found: mat.vars().to_vec(),
                });
            }
        }
        if !g.is_hermitian() {
            return Err(AppError::Dimension("G is not Hermitian".into()));
        }
        Ok(UncertainSystem { a, b, g, dom })
    }

    pub fn a(&self) -> &MatrixPoly {
        &self.a
    }

    pub fn b(&self) -> &MatrixPoly {
        &self.b
    }

    pub fn g(&self) -> &MatrixPoly {
        &self.g
    }

    pub fn dom(&self) -> &TriangularDomain {
        &self.dom
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real() && self.g.is_real()
    }

    /// `[[A^* X + X A, X B], [B^* X, 0]]`.
    fn lambda_adjoint(&self, x: &MatrixPoly) -> Result<MatrixPoly, AppError> {
        let n = self.states();
        let m = self.inputs();
        let xa = x.checked_mul(&self.a)?;
        let xb = x.checked_mul(&self.b)?;
        let mut out = MatrixPoly::zeros(self.dom.vars().clone(), n + m, n + m);
        out.set_block(0, 0, &xa.conj_transpose().checked_add(&xa)?);
        out.set_block(0, n, &xb);
        out.set_block(n, 0, &xb.conj_transpose());
        Ok(out)
    }

    /// Numeric `[[A^* H + H A, H B], [B^* H, 0]]` at `p`.
    fn lambda_adjoint_at(&self, h: &CMatrix, p: &[f64]) -> CMatrix {
        let n = self.states();
        let m = self.inputs();
        let a = self.a.eval(p);
        let b = self.b.eval(p);
        let ha = h * &a;
        let hb = h * &b;
        let mut out = CMatrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&(ha.adjoint() + &ha));
        out.view_mut((0, n), (n, m)).copy_from(&hb);
        out.view_mut((n, 0), (m, n)).copy_from(&hb.adjoint());
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LyapOptions {
    pub h_degree: u32,
    pub eta_degree: u32,
    /// Lower bound imposed on the multiplier `eta(p)`.
    pub eps_eta: f64,
    pub pipeline: PipelineOptions,
}

impl Default for LyapOptions {
    fn default() -> Self {
        LyapOptions {
            h_degree: 2,
            eta_degree: 2,
            eps_eta: 1e-8,
            pipeline: PipelineOptions::default(),
        }
    }
}

/// `V(p, x) = x^* H(p) x` with S-procedure multiplier `eta(p)`, verified on
/// the oracle grid at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovCertificate {
    h: MatrixPoly,
    eta: ScalarPoly,
    h_worst: f64,
    eta_worst: f64,
    lmi_worst: f64,
    solver_margin: Option<f64>,
    schedule: Option<MultiplierSchedule>,
}

impl LyapunovCertificate {
    /// Checks `H(p) ≻ 0`, `eta(p) > 0` and
    /// `-Lambda'(H(p)) - eta(p) G(p) ≻ 0` on a grid with `grid` points per
    /// axis, each up to `-1e-7`.
    pub fn new(sys: &UncertainSystem, h: MatrixPoly, eta: ScalarPoly, grid: usize) -> Result<Self, AppError> {
        if h.dims() != (sys.states(), sys.states()) || h.vars() != sys.dom.vars() || eta.vars() != sys.dom.vars() {
            return Err(AppError::Dimension("certificate does not match the system".into()));
        }
        let mut h_worst = f64::INFINITY;
        let mut eta_worst = f64::INFINITY;
        let mut lmi_worst = f64::INFINITY;
        for p in sys.dom.grid(grid) {
            let hp = h.eval(&p);
            let ep = eta.eval(&p);
            let lhs = -sys.lambda_adjoint_at(&hp, &p) - sys.g.eval(&p) * Complex64::new(ep, 0.0);
            h_worst = h_worst.min(hermitian_min_eigenvalue(&hp));
            eta_worst = eta_worst.min(ep);
            lmi_worst = lmi_worst.min(hermitian_min_eigenvalue(&lhs));
        }
        for (what, worst) in [("H", h_worst), ("eta", eta_worst), ("Lyapunov inequality", lmi_worst)] {
            if !(worst > -ORACLE_TOL) {
                return Err(AppError::Verification { what, worst });
            }
        }
        Ok(LyapunovCertificate {
            h,
            eta,
            h_worst,
            eta_worst,
            lmi_worst,
            solver_margin: None,
            schedule: None,
        })
    }

    pub fn h(&self) -> &MatrixPoly {
        &self.h
    }

    pub fn eta(&self) -> &ScalarPoly {
        &self.eta
    }

    /// Worst minimum eigenvalue of `H(p)` on the grid.
    pub fn h_worst(&self) -> f64 {
        self.h_worst
    }

    pub fn eta_worst(&self) -> f64 {
        self.eta_worst
    }

    /// Worst minimum eigenvalue of `-Lambda'(H(p)) - eta(p) G(p)` on the grid.
    pub fn lmi_worst(&self) -> f64 {
        self.lmi_worst
    }

    pub fn solver_margin(&self) -> Option<f64> {
        self.solver_margin
    }

    pub fn schedule(&self) -> Option<&MultiplierSchedule> {
        self.schedule.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LyapunovOutcome {
    Certified(LyapunovCertificate),
    /// Not an instability proof.
    Refused { attempts: Vec<Attempt> },
}

/// Parameterizations of `H` and `eta` plus the three inequalities
/// `-Lambda'(H) - eta G ≻ 0`, `eta - eps_eta ≻ 0`, `H ≻ 0`.
pub fn lyap_inequality(
    sys: &UncertainSystem,
    opts: &LyapOptions,
) -> Result<(HermitianParam, HermitianParam, Vec<DecisionAffineMatrixPoly>), AppError> {
    let vars = sys.dom.vars().clone();
    let field = if sys.is_real() { Field::Real } else { Field::Complex };
    let h = HermitianParam::new(vars.clone(), sys.states(), opts.h_degree, field, 0);
    let eta = HermitianParam::new(vars.clone(), 1, opts.eta_degree, Field::Real, h.len());
    let arity = h.len() + eta.len();
    let size = sys.states() + sys.inputs();

    let mut lyap = DecisionAffineMatrixPoly::zeros(vars.clone(), size, size, arity);
    for (idx, mono, basis) in h.elements() {
        let x = MatrixPoly::from_constant(vars.clone(), &basis).mul_monomial(mono);
        lyap.add_term(idx, &-&sys.lambda_adjoint(&x)?)?;
    }
    let minus_g = -&sys.g;
    for (idx, mono, _) in eta.elements() {
        lyap.add_term(idx, &minus_g.mul_monomial(mono))?;
    }

    let floor = MatrixPoly::identity(vars.clone(), 1).scale(Complex64::new(-opts.eps_eta, 0.0));
    let mut positive_eta = eta.as_affine(arity)?;
    positive_eta.add_constant(&floor)?;
    let positive_h = h.as_affine(arity)?;
    Ok((h, eta, vec![lyap, positive_eta, positive_h]))
}

pub fn lyap_synthesize(
    sys: &UncertainSystem,
    h_degree: u32,
    eta_degree: u32,
    sched: &MultiplierSchedule,
) -> Result<LyapunovOutcome, AppError> {
    let opts = LyapOptions {
        h_degree,
        eta_degree,
        ..Default::default()
    };
    lyap_synthesize_with(sys, sched, &opts)
}

/// Reduces the joint system, solves for strict feasibility and packages a
/// verified certificate; raises the schedule bump up to the cap on failure.
pub fn lyap_synthesize_with(
    sys: &UncertainSystem,
    sched: &MultiplierSchedule,
    opts: &LyapOptions,
) -> Result<LyapunovOutcome, AppError> {
    let (hp, ep, inputs) = lyap_inequality(sys, opts)?;
    let labels: Vec<VarLabel> = (0..hp.len() + ep.len()).map(VarLabel::Original).collect();
    let pipe = &opts.pipeline;
    let solver = InteriorPoint::new(pipe.solve.ipm.clone());
    let mut attempts = Vec::new();
    let mut bump = 0;
    loop {
        let s = sched.with_bump(bump);
        let red = reduce_system(&inputs, labels.clone(), &sys.dom, &s, &pipe.reduce)?;
        let max_degree = red.trace.max_multiplier_degree();
        if bump > 0 && max_degree.is_none_or(|d| d > sched.cap) {
            break;
        }
        let lmi = red.lmi.embed_real_compact();
        let sol = solve_feasible_with(&lmi, pipe.eps, &pipe.solve, &solver);
        attempts.push(Attempt {
            bump,
            max_degree,
            status: sol.status,
            bound: None,
            margin: sol.margin,
            iterations: sol.iterations,
            arity: lmi.arity(),
            blocks: lmi.blocks().len(),
        });
        if sol.is_feasible() {
            let h = hp.assemble(&sol.y);
            let eta = ep
                .assemble(&sol.y)
                .entry(0, 0)
                .to_real()
                .expect("eta has real coefficients");
            if let Ok(mut cert) = LyapunovCertificate::new(sys, h, eta, pipe.grid) {
                cert.solver_margin = Some(sol.margin);
                cert.schedule = Some(s);
                return Ok(LyapunovOutcome::Certified(cert));
            }
        }
        if !next_bump_allowed(max_degree, sched.cap) {
            break;
        }
        bump += 1;
    }
    Ok(LyapunovOutcome::Refused { attempts })
}

/// Result of sampling admissible `(p, x, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    /// Largest `(x, u)^* Lambda'(H(p)) (x, u)` over unit admissible samples.
    pub max: f64,
    pub worst_point: Option<Vec<f64>>,
    /// Grid points where the admissible set is `{0}`.
    pub empty_points: Vec<Vec<f64>>,
    pub samples: usize,
}

/// Draws `samples` unit vectors `z = (x, u)` with `z^* G(p) z >= 0` at each
/// grid point and evaluates the derivative form of `V`. Samples are drawn in
/// the eigenbasis of `G(p)`; a rejected draw is moved onto the cone boundary
/// by scaling its components along nonnegative eigenvalues.
pub fn sample_constraint_check(
    sys: &UncertainSystem,
    h: &MatrixPoly,
    samples: usize,
    grid: usize,
    seed: u64,
) -> ConstraintCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = sys.states() + sys.inputs();
    let real = sys.is_real() && h.is_real();
    let mut out = ConstraintCheck {
        max: f64::NEG_INFINITY,
        worst_point: None,
        empty_points: Vec::new(),
        samples: 0,
    };
    for p in sys.dom.grid(grid) {
        let form = sys.lambda_adjoint_at(&h.eval(&p), &p);
        let gp = sys.g.eval(&p);
        let tol = 1e-12 * (1.0 + gp.norm());
        let eig = SymmetricEigen::new(gp);
        let admissible: Vec<bool> = eig.eigenvalues.iter().map(|&l| l >= -tol).collect();
        if !admissible.contains(&true) {
            out.empty_points.push(p);
            continue;
        }
        let mut drawn = 0;
        while drawn < samples {
            let mut c = DVector::<Complex64>::from_fn(size, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if real { 0.0 } else { StandardNormal.sample(&mut rng) };
                Complex64::new(re, im)
            });
            let (mut pos, mut neg) = (0.0, 0.0);
            for (i, &l) in eig.eigenvalues.iter().enumerate() {
                let w = c[i].norm_sqr();
                if admissible[i] {
                    pos += l.max(0.0) * w;
                } else {
                    neg -= l * w;
                }
            }
            if pos < neg {
                if pos > 0.0 {
                    let t = (neg / pos).sqrt();
                    for i in 0..size {
                        if admissible[i] {
                            c[i] *= t;
                        }
                    }
                } else {
                    for i in 0..size {
                        if !admissible[i] {
                            c[i] = Complex64::new(0.0, 0.0);
                        }
                    }
                }
            }
            let norm = c.norm();
            if norm == 0.0 {
                continue;
            }
            let z = &eig.eigenvectors * c.unscale(norm);
            let v = z.dotc(&(&form * &z)).re;
            if v > out.max {
                out.max = v;
                out.worst_point = Some(p.clone());
            }
            drawn += 1;
        }
        out.samples += drawn;
    }
    out
}
