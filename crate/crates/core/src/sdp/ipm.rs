//! Infeasible-start primal-dual path-following method (HKM direction with
//! Mehrotra predictor-corrector) for
//!
//! ```text
//! maximize b^T y  s.t.  C_j - sum_i y_i A_ij  ⪰ 0   (PSD blocks)
//!                       c_r - sum_i a_ri y_i  >= 0   (linear rows)
//! ```
//!
//! and its primal `minimize <C, X> + c^T x  s.t.  A(X) + A_lp x = b`.

use std::ops::ControlFlow;

use nalgebra::{Cholesky, DVector};

use crate::linalg::RMatrix;

/// One PSD constraint `C - sum_i y_i A_i ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdConstraint {
    pub c: RMatrix,
    pub a: Vec<(usize, RMatrix)>,
}

/// One linear constraint `c - sum_i a_i y_i >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub c: f64,
    pub a: Vec<(usize, f64)>,
}

/// A dual-form conic problem over block-diagonal PSD cones and an orthant.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeProblem {
    pub b: Vec<f64>,
    pub psd: Vec<PsdConstraint>,
    pub lp: Vec<LpRow>,
}

impl ConeProblem {
    pub fn num_vars(&self) -> usize {
        self.b.len()
    }

    /// Smallest slack (eigenvalue or linear slack) at `y`.
    pub fn slack_margin(&self, y: &[f64]) -> f64 {
        let mut worst = f64::INFINITY;
        for blk in &self.psd {
            let mut s = blk.c.clone();
            for (i, a) in &blk.a {
                s -= a * y[*i];
            }
            if s.nrows() > 0 {
                let s = (&s + s.transpose()) * 0.5;
                worst = worst.min(s.symmetric_eigenvalues().min());
            }
        }
        for row in &self.lp {
            let v = row.c - row.a.iter().map(|(i, a)| a * y[*i]).sum::<f64>();
            worst = worst.min(v);
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IpmOptions {
    pub max_iter: usize,
    /// Relative tolerance on gap and infeasibilities.
    pub tol: f64,
}

impl Default for IpmOptions {
    fn default() -> Self {
        IpmOptions { max_iter: 200, tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IpmResult {
    pub y: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

/// A conic solver. The observer sees every dual iterate and may stop the run.
pub trait SdpSolver {
    fn solve(&self, problem: &ConeProblem, observer: &mut dyn FnMut(&[f64]) -> ControlFlow<()>) -> IpmResult;
}

/// Embedded dense interior-point solver.
#[derive(Clone, Debug, Default)]
pub struct InteriorPoint {
    pub options: IpmOptions,
}

struct State {
    x: Vec<RMatrix>,
    z: Vec<RMatrix>,
    xl: Vec<f64>,
    zl: Vec<f64>,
    y: Vec<f64>,
}

struct Direction {
    dx: Vec<RMatrix>,
    dz: Vec<RMatrix>,
    dxl: Vec<f64>,
    dzl: Vec<f64>,
    dy: Vec<f64>,
}

fn inner(a: &RMatrix, b: &RMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(a: &RMatrix) -> RMatrix {
    (a + a.transpose()) * 0.5
}

/// Largest `alpha` with `x + alpha dx ⪰ 0` (infinite if unrestricted).
fn max_step_psd(x: &RMatrix, dx: &RMatrix) -> Option<f64> {
    if x.nrows() == 0 {
        return Some(f64::INFINITY);
    }
    let l = Cholesky::new(x.clone())?.l();
    let li = l.clone().try_inverse()?;
    let w = sym(&(&li * dx * li.transpose()));
    let lmin = w.symmetric_eigenvalues().min();
    Some(if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY })
}

fn max_step_lp(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

impl InteriorPoint {
    pub fn new(options: IpmOptions) -> Self {
        InteriorPoint { options }
    }
}

impl SdpSolver for InteriorPoint {
    fn solve(&self, p: &ConeProblem, observer: &mut dyn FnMut(&[f64]) -> ControlFlow<()>) -> IpmResult {
        let m = p.num_vars();
        let nblk = p.psd.len();
        let nlp = p.lp.len();
        let nu = p.psd.iter().map(|b| b.c.nrows()).sum::<usize>() + nlp;

        // starting point
        let b_norm = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut a_norm = vec![0.0f64; m];
        for blk in &p.psd {
            for (i, a) in &blk.a {
                a_norm[*i] += a.norm_squared();
            }
        }
        for row in &p.lp {
            for (i, a) in &row.a {
                a_norm[*i] += a * a;
            }
        }
        let a_norm: Vec<f64> = a_norm.iter().map(|v| v.sqrt()).collect();
        let c_norm = (p.psd.iter().map(|b| b.c.norm_squared()).sum::<f64>()
            + p.lp.iter().map(|r| r.c * r.c).sum::<f64>())
        .sqrt();
        let root = (nu as f64).sqrt();
        let mut xi = 10.0f64.max(root);
        for i in 0..m {
            xi = xi.max((1.0 + p.b[i].abs()) / (1.0 + a_norm[i]));
        }
        let eta = 10f64
            .max(root)
            .max(c_norm)
            .max(a_norm.iter().copied().fold(0.0, f64::max));

        let mut s = State {
            x: p.psd.iter().map(|b| RMatrix::identity(b.c.nrows(), b.c.nrows()) * xi).collect(),
            z: p.psd.iter().map(|b| RMatrix::identity(b.c.nrows(), b.c.nrows()) * eta).collect(),
            xl: vec![xi; nlp],
            zl: vec![eta; nlp],
            y: vec![0.0; m],
        };

        let mut result = IpmResult {
            y: s.y.clone(),
            iterations: 0,
            converged: false,
            primal_objective: f64::NAN,
            dual_objective: f64::NAN,
        };
        let mut gamma = 0.9;

        for iter in 0..self.options.max_iter {
            result.iterations = iter;
            // residuals
            let mut rp = p.b.clone();
            for (j, blk) in p.psd.iter().enumerate() {
                for (i, a) in &blk.a {
                    rp[*i] -= inner(a, &s.x[j]);
                }
            }
            for (r, row) in p.lp.iter().enumerate() {
                for (i, a) in &row.a {
                    rp[*i] -= a * s.xl[r];
                }
            }
            let rd: Vec<RMatrix> = p
                .psd
                .iter()
                .enumerate()
                .map(|(j, blk)| {
                    let mut r = &blk.c - &s.z[j];
                    for (i, a) in &blk.a {
                        r -= a * s.y[*i];
                    }
                    r
                })
                .collect();
            let rdl: Vec<f64> = p
                .lp
                .iter()
                .enumerate()
                .map(|(r, row)| row.c - s.zl[r] - row.a.iter().map(|(i, a)| a * s.y[*i]).sum::<f64>())
                .collect();

            let gap_sum: f64 = (0..nblk).map(|j| inner(&s.x[j], &s.z[j])).sum::<f64>()
                + s.xl.iter().zip(&s.zl).map(|(a, b)| a * b).sum::<f64>();
            let mu = gap_sum / nu.max(1) as f64;
            let pobj: f64 = (0..nblk).map(|j| inner(&p.psd[j].c, &s.x[j])).sum::<f64>()
                + (0..nlp).map(|r| p.lp[r].c * s.xl[r]).sum::<f64>();
            let dobj: f64 = p.b.iter().zip(&s.y).map(|(a, b)| a * b).sum();
            result.y = s.y.clone();
            result.primal_objective = pobj;
            result.dual_objective = dobj;

            let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
            let dinf = (rd.iter().map(|r| r.norm_squared()).sum::<f64>() + rdl.iter().map(|v| v * v).sum::<f64>())
                .sqrt()
                / (1.0 + c_norm);
            let scale = 1.0 + pobj.abs() + dobj.abs();
            let gap = (pobj - dobj).abs().max(gap_sum) / scale;

            if observer(&s.y).is_break() {
                return result;
            }
            if pinf < self.options.tol && dinf < self.options.tol && gap < self.options.tol {
                result.converged = true;
                return result;
            }
            if !mu.is_finite() || s.x.iter().any(|x| x.norm() > 1e14) || s.xl.iter().any(|v| *v > 1e14) {
                return result;
            }

            // Schur complement
            let zinv: Option<Vec<RMatrix>> = s
                .z
                .iter()
                .map(|z| {
                    if z.nrows() == 0 {
                        Some(z.clone())
                    } else {
                        Cholesky::new(z.clone()).map(|c| c.inverse())
                    }
                })
                .collect();
            let Some(zinv) = zinv else { return result };
            let mut schur = RMatrix::zeros(m, m);
            for (j, blk) in p.psd.iter().enumerate() {
                let g: Vec<RMatrix> = blk.a.iter().map(|(_, a)| &s.x[j] * a * &zinv[j]).collect();
                for (u, (iu, au)) in blk.a.iter().enumerate() {
                    for (v, (iv, _)) in blk.a.iter().enumerate().skip(u) {
                        let val = inner(au, &g[v].transpose());
                        schur[(*iu, *iv)] += val;
                        if u != v {
                            schur[(*iv, *iu)] += val;
                        }
                    }
                }
            }
            for (r, row) in p.lp.iter().enumerate() {
                let w = s.xl[r] / s.zl[r];
                for (iu, au) in &row.a {
                    for (iv, av) in &row.a {
                        schur[(*iu, *iv)] += w * au * av;
                    }
                }
            }
            let diag_max = (0..m).map(|i| schur[(i, i)].abs()).fold(0.0, f64::max);
            let factor = {
                let mut reg = 0.0;
                loop {
                    let mut mm = schur.clone();
                    for i in 0..m {
                        mm[(i, i)] += reg;
                    }
                    if let Some(ch) = Cholesky::new(mm) {
                        break Some(ch);
                    }
                    reg = if reg == 0.0 { 1e-14 * diag_max.max(1e-300) } else { reg * 100.0 };
                    if reg > 1e-4 * diag_max.max(1.0) {
                        break None;
                    }
                }
            };
            let Some(factor) = factor else { return result };

            let solve = |k: &[RMatrix], kl: &[f64]| -> Direction {
                // rhs = rp - A(K) + A(X Rd Z^-1)
                let mut rhs = rp.clone();
                let xrz: Vec<RMatrix> = (0..nblk).map(|j| &s.x[j] * &rd[j] * &zinv[j]).collect();
                for (j, blk) in p.psd.iter().enumerate() {
                    for (i, a) in &blk.a {
                        rhs[*i] += -inner(a, &k[j]) + inner(a, &xrz[j]);
                    }
                }
                for (r, row) in p.lp.iter().enumerate() {
                    let t = -kl[r] + s.xl[r] * rdl[r] / s.zl[r];
                    for (i, a) in &row.a {
                        rhs[*i] += a * t;
                    }
                }
                let dy = factor.solve(&DVector::from_vec(rhs));
                let dz: Vec<RMatrix> = p
                    .psd
                    .iter()
                    .enumerate()
                    .map(|(j, blk)| {
                        let mut d = rd[j].clone();
                        for (i, a) in &blk.a {
                            d -= a * dy[*i];
                        }
                        d
                    })
                    .collect();
                let dzl: Vec<f64> = p
                    .lp
                    .iter()
                    .enumerate()
                    .map(|(r, row)| rdl[r] - row.a.iter().map(|(i, a)| a * dy[*i]).sum::<f64>())
                    .collect();
                let dx: Vec<RMatrix> = (0..nblk)
                    .map(|j| sym(&(&k[j] - &s.x[j] * &dz[j] * &zinv[j])))
                    .collect();
                let dxl: Vec<f64> = (0..nlp).map(|r| kl[r] - s.xl[r] * dzl[r] / s.zl[r]).collect();
                Direction {
                    dx,
                    dz,
                    dxl,
                    dzl,
                    dy: dy.iter().copied().collect(),
                }
            };

            let steps = |d: &Direction| -> Option<(f64, f64)> {
                let mut ap = max_step_lp(&s.xl, &d.dxl);
                let mut ad = max_step_lp(&s.zl, &d.dzl);
                for j in 0..nblk {
                    ap = ap.min(max_step_psd(&s.x[j], &d.dx[j])?);
                    ad = ad.min(max_step_psd(&s.z[j], &d.dz[j])?);
                }
                Some((ap, ad))
            };

            // predictor
            let k_aff: Vec<RMatrix> = s.x.iter().map(|x| -x).collect();
            let kl_aff: Vec<f64> = s.xl.iter().map(|v| -v).collect();
            let aff = solve(&k_aff, &kl_aff);
            let Some((ap, ad)) = steps(&aff) else { return result };
            let ap = ap.min(1.0);
            let ad = ad.min(1.0);
            let mut gap_aff = 0.0;
            for j in 0..nblk {
                gap_aff += inner(&(&s.x[j] + &aff.dx[j] * ap), &(&s.z[j] + &aff.dz[j] * ad));
            }
            for r in 0..nlp {
                gap_aff += (s.xl[r] + ap * aff.dxl[r]) * (s.zl[r] + ad * aff.dzl[r]);
            }
            let mu_aff = gap_aff / nu.max(1) as f64;
            let expo = (3.0 * ap.min(ad).powi(2)).max(1.0);
            let sigma = (mu_aff / mu).max(0.0).powf(expo).min(1.0);

            // corrector
            let k_cor: Vec<RMatrix> = (0..nblk)
                .map(|j| &zinv[j] * (sigma * mu) - &s.x[j] - &aff.dx[j] * &aff.dz[j] * &zinv[j])
                .collect();
            let kl_cor: Vec<f64> = (0..nlp)
                .map(|r| sigma * mu / s.zl[r] - s.xl[r] - aff.dxl[r] * aff.dzl[r] / s.zl[r])
                .collect();
            let dir = solve(&k_cor, &kl_cor);
            let Some((ap, ad)) = steps(&dir) else { return result };
            let ap = (gamma * ap).min(1.0);
            let ad = (gamma * ad).min(1.0);
            for j in 0..nblk {
                s.x[j] = sym(&(&s.x[j] + &dir.dx[j] * ap));
                s.z[j] = sym(&(&s.z[j] + &dir.dz[j] * ad));
            }
            for r in 0..nlp {
                s.xl[r] += ap * dir.dxl[r];
                s.zl[r] += ad * dir.dzl[r];
            }
            for i in 0..m {
                s.y[i] += ad * dir.dy[i];
            }
            gamma = 0.9 + 0.09 * ap.min(ad);
        }
        result.iterations = self.options.max_iter;
        result.y = s.y.clone();
        let _ = observer(&s.y);
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(p: &ConeProblem) -> IpmResult {
        InteriorPoint::default().solve(p, &mut |_| ControlFlow::Continue(()))
    }

    #[test]
    fn linear_program() {
        // max y1 + y2  s.t. y1 <= 1, y2 <= 2, y1 + y2 <= 2.5
        let p = ConeProblem {
            b: vec![1.0, 1.0],
            psd: vec![],
            lp: vec![
                LpRow { c: 1.0, a: vec![(0, 1.0)] },
                LpRow { c: 2.0, a: vec![(1, 1.0)] },
                LpRow { c: 2.5, a: vec![(0, 1.0), (1, 1.0)] },
            ],
        };
        let r = run(&p);
        assert!(r.converged);
        assert!((r.dual_objective - 2.5).abs() < 1e-7);
    }

    #[test]
    fn max_eigen_margin() {
        // max t s.t. diag(y, 1 - y) - t I ⪰ 0, with y, t boxed
        let e = |i: usize| {
            let mut m = RMatrix::zeros(2, 2);
            m[(i, i)] = 1.0;
            m
        };
        let c = e(1);
        let ay = -(e(0) - e(1));
        let at = RMatrix::identity(2, 2);
        let p = ConeProblem {
            b: vec![0.0, 1.0],
            psd: vec![PsdConstraint { c, a: vec![(0, ay), (1, at)] }],
            lp: vec![
                LpRow { c: 10.0, a: vec![(0, 1.0)] },
                LpRow { c: 10.0, a: vec![(0, -1.0)] },
                LpRow { c: 10.0, a: vec![(1, 1.0)] },
            ],
        };
        let r = run(&p);
        assert!(r.converged, "{r:?}");
        assert!((r.y[0] - 0.5).abs() < 1e-7);
        assert!((r.y[1] - 0.5).abs() < 1e-7);
    }
}
