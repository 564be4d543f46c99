//! Structural invariants checked on random instances.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pdlmi::apps::{polymin, PipelineOptions};
use pdlmi::kyp::{lyap_adjoint, lyap_op, ThetaSpec};
use pdlmi::linalg::{hermitian_eigenvalues, hermitian_min_eigenvalue, real_embedding, symmetric_eigenvalues, CMatrix};
use pdlmi::poly::{vars, DecisionAffineMatrixPoly, Field, HermitianParam, MatrixPoly, Monomial, ScalarPoly};
use pdlmi::reduce::{interval_theta, reduce_full, MultiplierSchedule, ReduceOptions, TriangularDomain};
use pdlmi::sdp::solve_feasible;

fn cmat(n: usize, m: usize, data: &[(f64, f64)]) -> CMatrix {
    CMatrix::from_fn(n, m, |i, j| {
        let (re, im) = data[(i * m + j) % data.len()];
        Complex64::new(re, im)
    })
}

fn herm(n: usize, data: &[(f64, f64)]) -> CMatrix {
    let a = cmat(n, n, data);
    (&a + a.adjoint()).map(|z| z * 0.5)
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..40)
}

fn univariate(coeffs: &[f64]) -> (ScalarPoly, TriangularDomain) {
    let dom = TriangularDomain::boxed(&["p"], &[(-1.0, 1.0)]).unwrap();
    let g = ScalarPoly::from_terms(
        dom.vars().clone(),
        coeffs.iter().enumerate().map(|(i, &c)| (Monomial::new(vec![i as u32]), c)),
    );
    (g, dom)
}

fn grid_min(g: &ScalarPoly, dom: &TriangularDomain, n: usize) -> f64 {
    dom.grid(n).iter().map(|p| g.eval(p)).fold(f64::INFINITY, f64::min)
}

/// `L(p, h) = C + H(p)` with `H` a real symmetric degree-2 parameterization.
fn random_affine(dom: &TriangularDomain, size: usize, shift: f64, data: &[(f64, f64)]) -> DecisionAffineMatrixPoly {
    let v = dom.vars().clone();
    let h = HermitianParam::new(v.clone(), size, 2, Field::Real, 0);
    let mut l = h.as_affine(h.len()).unwrap();
    let c = herm(size, data).map(|z| Complex64::new(z.re, 0.0)) + CMatrix::identity(size, size) * Complex64::new(shift, 0.0);
    l.add_constant(&MatrixPoly::from_constant(v, &c)).unwrap();
    l
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decision_dependence_is_affine(data in entries(), p in -1.0f64..1.0, a in prop::collection::vec(-2.0f64..2.0, 6), b in prop::collection::vec(-2.0f64..2.0, 6)) {
        let dom = TriangularDomain::boxed(&["p"], &[(-1.0, 1.0)]).unwrap();
        let h = HermitianParam::new(dom.vars().clone(), 2, 1, Field::Complex, 0);
        let mut l = h.as_affine(8).unwrap();
        l.add_constant(&MatrixPoly::from_constant(dom.vars().clone(), &herm(2, &data))).unwrap();
        let mut ya = a.clone();
        ya.resize(8, 0.5);
        let mut yb = b.clone();
        yb.resize(8, -0.25);
        let mid: Vec<f64> = ya.iter().zip(&yb).map(|(x, y)| 0.5 * (x + y)).collect();
        let lhs = l.eval(&[p], &mid);
        let rhs = (l.eval(&[p], &ya) + l.eval(&[p], &yb)).map(|z| z * 0.5);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn interval_theta_vanishes_at_endpoints(a in -3.0f64..3.0, w in 0.1f64..3.0, t in 0.0f64..1.0) {
        let v = vars::<&str>(&[]);
        let b = a + w;
        let th = interval_theta(&ScalarPoly::constant(v.clone(), a), &ScalarPoly::constant(v, b)).unwrap().to_constant();
        let form = |l: f64| (th[(0, 0)] * l * l + (th[(0, 1)] + th[(1, 0)]) * l + th[(1, 1)]).re;
        let lam = a - 1.0 + (w + 2.0) * t;
        prop_assert!((form(lam) + (lam - a) * (lam - b)).abs() < 1e-9 * (1.0 + lam * lam));
        prop_assert!(form(a).abs() < 1e-12 && form(b).abs() < 1e-12);
    }

    #[test]
    fn real_embedding_doubles_spectrum(data in entries(), n in 1usize..5) {
        let h = herm(n, &data);
        let mut want: Vec<f64> = hermitian_eigenvalues(&h).into_iter().flat_map(|e| [e, e]).collect();
        want.sort_by(f64::total_cmp);
        let mut got = symmetric_eigenvalues(&real_embedding(&h));
        got.sort_by(f64::total_cmp);
        for (x, y) in got.iter().zip(&want) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn adjoint_pairs_with_operator(data in entries(), n in 1usize..5, nz in 1usize..5, t in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)) {
        let Ok(theta) = ThetaSpec::from_real(t.0, t.1, t.2) else { return Ok(()) };
        let m = cmat(n, nz, &data);
        let nn = cmat(n, nz, &data[data.len() / 2..]);
        let s = herm(nz, &data[1..]);
        let h = herm(n, &data);
        let lhs = (lyap_op(&s, &m, &nn, &theta).unwrap().adjoint() * &h).trace().re;
        let rhs = (s.adjoint() * lyap_adjoint(&h, &m, &nn, &theta).unwrap()).trace().re;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + s.norm() * h.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn one_block_pair_per_eliminated_variable(k in 1usize..3, size in 1usize..3, data in entries()) {
        let names: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
        let ranges = vec![(-1.0, 1.0); k];
        let dom = TriangularDomain::boxed(&names, &ranges).unwrap();
        let l = random_affine(&dom, size, 0.0, &data);
        let red = reduce_full(&l, &dom, &MultiplierSchedule::default(), &ReduceOptions::default()).unwrap();
        prop_assert_eq!(red.trace.blocks.len(), 1 << k);
        prop_assert_eq!(red.trace.steps.len(), k);
    }

    #[test]
    fn reduced_feasibility_implies_original(size in 1usize..3, shift in -1.0f64..1.0, data in entries()) {
        let dom = TriangularDomain::boxed(&["x", "y"], &[(-1.0, 1.0), (0.0, 1.0)]).unwrap();
        let l = random_affine(&dom, size, shift, &data);
        let red = reduce_full(&l, &dom, &MultiplierSchedule::default(), &ReduceOptions::default()).unwrap();
        let sol = solve_feasible(&red.lmi.embed_real_compact(), 1e-6);
        if sol.is_feasible() {
            let h = &sol.y[..l.arity()];
            let worst = dom.grid(21).iter().map(|p| hermitian_min_eigenvalue(&l.eval(p, h))).fold(f64::INFINITY, f64::min);
            prop_assert!(worst > -1e-7, "worst eigenvalue {}", worst);
        }
    }

    #[test]
    fn univariate_bound_is_valid(coeffs in prop::collection::vec(-1.0f64..1.0, 1..7)) {
        let (g, dom) = univariate(&coeffs);
        let out = polymin(&g, &dom, &MultiplierSchedule::default(), &PipelineOptions::default()).unwrap();
        let h = out.bound.expect("univariate problems always have a bound");
        prop_assert!(h <= grid_min(&g, &dom, 2001) + 1e-6);
    }

    #[test]
    fn larger_multipliers_do_not_loosen(coeffs in prop::collection::vec(-1.0f64..1.0, 4..10)) {
        let dom = TriangularDomain::boxed(&["x", "y"], &[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let g = ScalarPoly::from_terms(
            dom.vars().clone(),
            coeffs.iter().enumerate().map(|(i, &c)| (Monomial::new(vec![(i % 3) as u32, (i / 3) as u32]), c)),
        );
        let opts = PipelineOptions::default();
        let base = polymin(&g, &dom, &MultiplierSchedule::fixed(&[2]), &opts).unwrap().bound;
        let more = polymin(&g, &dom, &MultiplierSchedule::fixed(&[4]), &opts).unwrap().bound;
        if let (Some(b), Some(m)) = (base, more) {
            prop_assert!(m >= b - 1e-5, "degree 4 bound {} below degree 2 bound {}", m, b);
        }
        prop_assert!(base.is_none() || more.is_some());
        if let Some(m) = more {
            prop_assert!(m <= grid_min(&g, &dom, 101) + 1e-6);
        }
    }
}

#[test]
fn product_of_squares_has_no_positive_bound() {
    let dom = TriangularDomain::boxed(&["x", "y"], &[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
    let v = dom.vars().clone();
    let x = ScalarPoly::var(v.clone(), "x").unwrap();
    let y = ScalarPoly::var(v, "y").unwrap();
    let g = &x.pow(2) * &y.pow(2);
    let out = polymin(&g, &dom, &MultiplierSchedule::default(), &PipelineOptions::default()).unwrap();
    if let Some(h) = out.bound {
        assert!(h <= 1e-6 && h > -1e-2, "bound {h}");
    }
}

#[test]
fn diagonal_embedding_is_block_diagonal() {
    let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0)]));
    let e = real_embedding(&h);
    assert_eq!(e.nrows(), 4);
    let mut ev = symmetric_eigenvalues(&e);
    ev.sort_by(f64::total_cmp);
    assert_eq!(ev, vec![-1.0, -1.0, 2.0, 2.0]);
}
