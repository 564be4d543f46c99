use std::ops::Range;

use num_complex::Complex64;

use super::{interval_theta, MultiplierSchedule, ReduceError, ReduceOptions, TriangularDomain};
use crate::linalg::CMatrix;
use crate::poly::{
    gram_lift, prefix_vars, DecisionAffineMatrixPoly, Field, HermitianParam, MatrixPoly, Vars,
};
use crate::sdp::{AffineLmi, VarLabel};

/// Output of one elimination step.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// `blockG - Lambda'_1(H1) - Lambda'_2(H2)`.
    pub r1: DecisionAffineMatrixPoly,
    /// `H2`.
    pub r2: DecisionAffineMatrixPoly,
    pub d: usize,
    pub theta2: MatrixPoly,
    pub mult_deg: u32,
    pub h1: HermitianParam,
    pub h2: HermitianParam,
    /// Gram-kernel variables (free Gram mode only).
    pub gram_free: Range<usize>,
    /// All decision variables created by this step.
    pub aux: Range<usize>,
}

/// `M = (I_d, 0)`, `N = (0, I_d)` (both `d x (d+1)`), Kronecker-expanded by `I_m`.
fn shift_pencil(m: usize, d: usize) -> (CMatrix, CMatrix) {
    let one = Complex64::new(1.0, 0.0);
    let mut km = CMatrix::zeros(m * d, m * (d + 1));
    let mut kn = CMatrix::zeros(m * d, m * (d + 1));
    for blk in 0..m {
        for i in 0..d {
            km[(blk * d + i, blk * (d + 1) + i)] = one;
            kn[(blk * d + i, blk * (d + 1) + i + 1)] = one;
        }
    }
    (km, kn)
}

fn even_ceil(x: u32) -> u32 {
    x + (x % 2)
}

/// Subtracts `Lambda'_{M, N, Theta}(H)` from `out`, where `H` ranges over
/// `param` and `Theta` is a 2x2 matrix polynomial in the prefix variables.
fn subtract_adjoint(
    out: &mut DecisionAffineMatrixPoly,
    param: &HermitianParam,
    km: &CMatrix,
    kn: &CMatrix,
    theta: &MatrixPoly,
) -> Result<(), ReduceError> {
    let x = [km, kn];
    let size = km.ncols();
    let bl = param.basis_len();
    for b in 0..bl {
        let basis = param.basis_matrix(b);
        // K_ab = X_a^* B X_b, weighted by theta_ba
        let k: Vec<Vec<CMatrix>> = (0..2)
            .map(|a| (0..2).map(|bb| x[a].adjoint() * &basis * x[bb]).collect())
            .collect();
        for (mi, mono) in param.monomials.iter().enumerate() {
            let mut p = MatrixPoly::zeros(param.vars.clone(), size, size);
            for a in 0..2 {
                for bb in 0..2 {
                    let kab = &k[a][bb];
                    for (tm, tc) in theta.entry(bb, a).terms() {
                        let mono_t = tm.mul(mono);
                        for i in 0..size {
                            for j in i..size {
                                let v = kab[(i, j)];
                                if v.re != 0.0 || v.im != 0.0 {
                                    p.add_term(i, j, mono_t.clone(), -(tc * v));
                                }
                            }
                        }
                    }
                }
            }
            out.add_term(param.offset + mi * bl + b, &p.hermitian_from_upper())?;
        }
    }
    Ok(())
}

/// Eliminates the last variable of `l` over `dom` (whose variables must be
/// those of `l`). New decision variables start at `l.arity()`. With
/// `mult_deg = None` the default multiplier degree is used.
pub fn eliminate_last(
    l: &DecisionAffineMatrixPoly,
    dom: &TriangularDomain,
    mult_deg: Option<u32>,
    opts: &ReduceOptions,
) -> Result<Elimination, ReduceError> {
    eliminate_with(l, dom, |default| mult_deg.unwrap_or(default), opts)
}

fn eliminate_with(
    l: &DecisionAffineMatrixPoly,
    dom: &TriangularDomain,
    degree: impl Fn(u32) -> u32,
    opts: &ReduceOptions,
) -> Result<Elimination, ReduceError> {
    if l.vars() != dom.vars() {
        return Err(ReduceError::VarMismatch {
            expected: dom.vars().to_vec(),
            found: l.vars().to_vec(),
        });
    }
    let j = dom.k();
    if j == 0 {
        return Err(ReduceError::NothingToEliminate);
    }
    let start = l.arity();
    let real = l.is_real();
    let lift = gram_lift(l, opts.gram_mode)?;
    let m = lift.m;
    let d = lift.d;
    let prefix: Vars = prefix_vars(dom.vars(), j - 1);
    let (a, b) = dom.bound(j - 1);
    let theta2 = interval_theta(a, b)?;

    let default = if prefix.is_empty() {
        0
    } else {
        let g_deg = lift.matrix.total_degree().or_zero();
        let t_deg = theta2.total_degree().or_zero();
        even_ceil(g_deg.max(t_deg))
    };
    let mult_deg = if prefix.is_empty() { 0 } else { degree(default) };

    let size = m * d;
    let (f1, f2) = if real { (Field::Imaginary, Field::Real) } else { (Field::Complex, Field::Complex) };
    let h1 = HermitianParam::new(prefix.clone(), size, mult_deg, f1, lift.matrix.arity());
    let h2 = HermitianParam::new(prefix.clone(), size, mult_deg, f2, h1.range().end);
    let total = h2.range().end;

    let (km, kn) = shift_pencil(m, d);
    let theta1 = MatrixPoly::from_constant(prefix.clone(), crate::kyp::ThetaSpec::real_axis().matrix());
    let mut r1 = lift.matrix.with_arity(total);
    subtract_adjoint(&mut r1, &h1, &km, &kn, &theta1)?;
    subtract_adjoint(&mut r1, &h2, &km, &kn, &theta2)?;
    let r2 = h2.as_affine(total)?;
    Ok(Elimination {
        r1,
        r2,
        d,
        theta2,
        mult_deg,
        h1,
        h2,
        gram_free: lift.free_vars,
        aux: start..total,
    })
}

/// One inequality reduced at one step.
#[derive(Clone, Debug)]
pub struct NodeTrace {
    pub root: usize,
    /// Branch choices so far: 1 for `R_1`, 2 for `R_2`.
    pub path: Vec<u8>,
    /// Row count `m` of the inequality before the step.
    pub rows: usize,
    pub d: usize,
    pub theta2: MatrixPoly,
    pub mult_deg: u32,
    pub h1: HermitianParam,
    pub h2: HermitianParam,
    pub gram_free: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct StepTrace {
    /// Eliminated variable.
    pub var: String,
    pub nodes: Vec<NodeTrace>,
    /// Decision variables created at this step (contiguous).
    pub aux: Range<usize>,
}

/// One diagonal block of the final LMI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDescriptor {
    pub root: usize,
    pub path: Vec<u8>,
    /// Complex size of the block (0 for an empty inequality).
    pub size: usize,
    /// Index of the block in the produced LMI (`None` for empty blocks).
    pub lmi_block: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub original_arity: usize,
    pub steps: Vec<StepTrace>,
    pub blocks: Vec<BlockDescriptor>,
}

impl ReductionTrace {
    /// Total decision count (original plus auxiliary).
    pub fn arity(&self) -> usize {
        self.steps.last().map_or(self.original_arity, |s| s.aux.end)
    }

    /// Largest multiplier degree used by a step that still had parameters
    /// left (`None` if every step was the last one).
    pub fn max_multiplier_degree(&self) -> Option<u32> {
        let k = self.steps.len();
        self.steps[..k.saturating_sub(1)]
            .iter()
            .flat_map(|s| s.nodes.iter().map(|n| n.mult_deg))
            .max()
    }
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub lmi: AffineLmi<Complex64>,
    pub trace: ReductionTrace,
}

/// Reduces `l(p, h) ≻ 0` on `dom` to one parameter-free block-diagonal LMI.
pub fn reduce_full(
    l: &DecisionAffineMatrixPoly,
    dom: &TriangularDomain,
    sched: &MultiplierSchedule,
    opts: &ReduceOptions,
) -> Result<Reduction, ReduceError> {
    let labels = (0..l.arity()).map(VarLabel::Original).collect();
    reduce_system(std::slice::from_ref(l), labels, dom, sched, opts)
}

/// Reduces several inequalities sharing one decision vector (labeled by
/// `labels`) and stacks the results.
pub fn reduce_system(
    inputs: &[DecisionAffineMatrixPoly],
    labels: Vec<VarLabel>,
    dom: &TriangularDomain,
    sched: &MultiplierSchedule,
    opts: &ReduceOptions,
) -> Result<Reduction, ReduceError> {
    sched.validate()?;
    let original_arity = labels.len();
    let mut labels = labels;
    for l in inputs {
        if l.vars() != dom.vars() {
            return Err(ReduceError::VarMismatch {
                expected: dom.vars().to_vec(),
                found: l.vars().to_vec(),
            });
        }
        if l.arity() > original_arity {
            return Err(ReduceError::Arity {
                labels: original_arity,
                arity: l.arity(),
            });
        }
        if !l.is_hermitian() {
            return Err(ReduceError::NotHermitian);
        }
    }
    let k = dom.k();
    let mut nodes: Vec<(usize, Vec<u8>, DecisionAffineMatrixPoly)> = inputs
        .iter()
        .enumerate()
        .map(|(r, l)| (r, Vec::new(), l.with_arity(original_arity)))
        .collect();
    let mut counter = original_arity;
    let mut steps = Vec::with_capacity(k);

    for t in 0..k {
        let j = k - t;
        let sub = dom.prefix(j);
        let step_start = counter;
        let mut next = Vec::with_capacity(2 * nodes.len());
        let mut traces = Vec::with_capacity(nodes.len());
        for (node_idx, (root, path, l)) in nodes.into_iter().enumerate() {
            let elim = eliminate_with(&l.with_arity(counter), &sub, |def| sched.degree(t, def), opts)?;
            let block = elim.r1.rows();
            if block > opts.max_block {
                return Err(ReduceError::BlockTooLarge {
                    step: t,
                    var: dom.vars()[j - 1].clone(),
                    size: block,
                    limit: opts.max_block,
                });
            }
            for _ in elim.gram_free.clone() {
                labels.push(VarLabel::Gram { step: t, node: node_idx });
            }
            for (which, range) in [(1u8, elim.h1.range()), (2u8, elim.h2.range())] {
                for _ in range {
                    labels.push(VarLabel::Multiplier { step: t, node: node_idx, which });
                }
            }
            counter = elim.aux.end;
            debug_assert_eq!(labels.len(), counter);
            traces.push(NodeTrace {
                root,
                path: path.clone(),
                rows: l.rows(),
                d: elim.d,
                theta2: elim.theta2,
                mult_deg: elim.mult_deg,
                h1: elim.h1,
                h2: elim.h2,
                gram_free: elim.gram_free,
            });
            let mut p1 = path.clone();
            p1.push(1);
            let mut p2 = path;
            p2.push(2);
            next.push((root, p1, elim.r1));
            next.push((root, p2, elim.r2));
        }
        steps.push(StepTrace {
            var: dom.vars()[j - 1].clone(),
            nodes: traces,
            aux: step_start..counter,
        });
        nodes = next;
    }

    let mut lmi = AffineLmi::<Complex64>::with_labels(labels);
    let mut blocks = Vec::with_capacity(nodes.len());
    for (root, path, l) in nodes {
        let l = l.with_arity(counter);
        let size = l.rows();
        let lmi_block = if size == 0 {
            None
        } else {
            lmi.push_block(
                l.constant().to_constant(),
                l.terms().map(|(i, t)| (i, t.to_constant())),
            )?;
            Some(lmi.blocks().len() - 1)
        };
        blocks.push(BlockDescriptor {
            root,
            path,
            size,
            lmi_block,
        });
    }
    Ok(Reduction {
        lmi,
        trace: ReductionTrace {
            original_arity,
            steps,
            blocks,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, hermitian_min_eigenvalue};
    use crate::poly::{vars, zeta_expand, ScalarPoly};

    fn scalar(p: &ScalarPoly, arity: usize) -> DecisionAffineMatrixPoly {
        DecisionAffineMatrixPoly::from_constant(MatrixPoly::scalar(p.to_complex()), arity)
    }

    #[test]
    fn pencil_null_vector() {
        let (m, n) = shift_pencil(1, 3);
        let l = 0.4;
        let z = nalgebra::DVector::from_vec(vec![c(l * l * l), c(l * l), c(l), c(1.0)]);
        assert!(((n * c(l) - m) * z).norm() < 1e-15);
    }

    #[test]
    fn last_step_is_constant() {
        let dom = TriangularDomain::boxed(&["p"], &[(-1.0, 1.0)]).unwrap();
        let v = dom.vars().clone();
        let p = ScalarPoly::var(v.clone(), "p").unwrap();
        let l = scalar(&(&p.pow(2) + &ScalarPoly::one(v)), 0);
        let e = eliminate_last(&l, &dom, Some(0), &ReduceOptions::default()).unwrap();
        assert_eq!(e.d, 1);
        assert_eq!(e.r1.vars().len(), 0);
        assert_eq!(e.r1.dims(), (2, 2));
        assert_eq!(e.r2.dims(), (1, 1));
        assert!(e.r1.is_hermitian());
        assert_eq!(e.aux, 0..e.h2.range().end);
    }

    #[test]
    fn soundness_identity_on_null_vectors() {
        // z^* R1(h) z = z^* G z - q2(lambda) H2 |w|^2 on the real line, z = (l^d..1)
        let dom = TriangularDomain::boxed(&["x", "y"], &[(-1.0, 2.0), (-2.0, 2.0)]).unwrap();
        let v = dom.vars().clone();
        let x = ScalarPoly::var(v.clone(), "x").unwrap();
        let y = ScalarPoly::var(v.clone(), "y").unwrap();
        let g = &(&(&x.pow(2) * &y.pow(4)) - &(&x * &y).scale(3.0)) + &ScalarPoly::one(v.clone());
        let l = DecisionAffineMatrixPoly::new(
            MatrixPoly::scalar(g.to_complex()),
            1,
            [(0, MatrixPoly::scalar(ScalarPoly::constant(v.clone(), -1.0).to_complex()))],
        )
        .unwrap();
        let e = eliminate_last(&l, &dom, None, &ReduceOptions::default()).unwrap();
        assert_eq!(e.d, 2);
        assert_eq!(e.mult_deg, 2);
        let n = e.aux.end;
        let h: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.77).sin()).collect();
        let r1 = e.r1.eval_decision(&h).unwrap();
        let h2 = e.h2.assemble(&h);
        for (xv, yv) in [(0.3, -1.1), (1.7, 0.4), (-0.9, 1.9)] {
            let z = nalgebra::DVector::from_vec(vec![c(yv * yv), c(yv), c(1.0)]);
            let w = nalgebra::DVector::from_vec(vec![c(yv), c(1.0)]);
            let lhs = (z.adjoint() * r1.eval(&[xv]) * &z)[(0, 0)].re;
            let q2 = -(yv + 2.0) * (yv - 2.0);
            let rhs = g.eval(&[xv, yv]) - h[0] - q2 * (w.adjoint() * h2.eval(&[xv]) * &w)[(0, 0)].re;
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn block_count_doubles() {
        let dom = TriangularDomain::boxed(&["x", "y"], &[(-1.0, 1.0), (0.0, 1.0)]).unwrap();
        let v = dom.vars().clone();
        let x = ScalarPoly::var(v.clone(), "x").unwrap();
        let y = ScalarPoly::var(v.clone(), "y").unwrap();
        let l = scalar(&(&(&x.pow(2) + &y.pow(2)) + &ScalarPoly::one(v)), 0);
        let r = reduce_full(&l, &dom, &MultiplierSchedule::default(), &ReduceOptions::default()).unwrap();
        assert_eq!(r.trace.blocks.len(), 4);
        assert_eq!(r.trace.steps.len(), 2);
        assert_eq!(r.trace.steps[1].nodes.len(), 2);
        assert_eq!(r.trace.arity(), r.lmi.arity());
        let ranges: Vec<_> = r.trace.steps.iter().map(|s| s.aux.clone()).collect();
        assert_eq!(ranges[0].start, 0);
        assert_eq!(ranges[0].end, ranges[1].start);
    }

    #[test]
    fn no_parameters() {
        let dom = TriangularDomain::new(vars::<&str>(&[]), vec![]).unwrap();
        let m = MatrixPoly::from_constant(
            dom.vars().clone(),
            &CMatrix::from_row_slice(2, 2, &[c(2.0), c(1.0), c(1.0), c(2.0)]),
        );
        let l = DecisionAffineMatrixPoly::from_constant(m, 0);
        let r = reduce_full(&l, &dom, &MultiplierSchedule::default(), &ReduceOptions::default()).unwrap();
        assert_eq!(r.lmi.blocks().len(), 1);
        assert!((hermitian_min_eigenvalue(&r.lmi.blocks()[0].constant) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_input_reduces_hermitian() {
        let dom = TriangularDomain::boxed(&["p"], &[(0.0, 1.0)]).unwrap();
        let v = dom.vars().clone();
        let p = ScalarPoly::var(v.clone(), "p").unwrap().to_complex();
        let mut m = MatrixPoly::identity(v.clone(), 2);
        m.set(0, 1, p.scale(Complex64::new(0.0, 1.0)));
        m.set(1, 0, p.scale(Complex64::new(0.0, -1.0)));
        let l = DecisionAffineMatrixPoly::from_constant(m, 0);
        let r = reduce_full(&l, &dom, &MultiplierSchedule::default(), &ReduceOptions::default()).unwrap();
        assert_eq!(r.lmi.blocks().len(), 2);
        let back = zeta_expand(
            &MatrixPoly::from_constant(vars::<&str>(&[]), &r.lmi.blocks()[0].constant),
            2,
            1,
            &v,
        )
        .unwrap();
        // constant part of R1 is the Gram matrix of L
        for q in [0.2, 0.9] {
            assert!((back.eval(&[q]) - l.constant().eval(&[q])).norm() < 1e-12);
        }
    }

    #[test]
    fn oversized_blocks_rejected() {
        let dom = TriangularDomain::boxed(&["p"], &[(0.0, 1.0)]).unwrap();
        let v = dom.vars().clone();
        let p = ScalarPoly::var(v, "p").unwrap();
        let l = scalar(&p.pow(8), 0);
        let opts = ReduceOptions { max_block: 3, ..Default::default() };
        assert!(matches!(
            reduce_full(&l, &dom, &MultiplierSchedule::default(), &opts),
            Err(ReduceError::BlockTooLarge { step: 0, size: 5, .. })
        ));
    }
}
