use super::TriangularDomain;
use crate::linalg::hermitian_min_eigenvalue;
use crate::poly::{DecisionAffineMatrixPoly, Monomial};
use crate::sdp::VarLabel;

/// `L(p, h(p))` with `h_i(p) = sum_alpha hhat_{i, alpha} p^alpha` over all
/// monomials of total degree `<= degree`; `hhat_{i, alpha}` has index
/// `i * monomials.len() + alpha`.
#[derive(Clone, Debug)]
pub struct Substitution {
    pub lifted: DecisionAffineMatrixPoly,
    pub monomials: Vec<Monomial>,
    pub original_arity: usize,
}

impl Substitution {
    pub fn labels(&self) -> Vec<VarLabel> {
        (0..self.original_arity)
            .flat_map(|i| (0..self.monomials.len()).map(move |a| VarLabel::Coefficient { original: i, monomial: a }))
            .collect()
    }

    /// `h(p)` for coefficient vector `hhat` (only its first
    /// `lifted.arity()` entries are read).
    pub fn eval_solution(&self, hhat: &[f64], p: &[f64]) -> Vec<f64> {
        let nm = self.monomials.len();
        (0..self.original_arity)
            .map(|i| {
                self.monomials
                    .iter()
                    .enumerate()
                    .map(|(a, m)| hhat[i * nm + a] * m.eval(p))
                    .sum()
            })
            .collect()
    }
}

/// Replaces every decision variable by a polynomial in the parameters of
/// total degree `<= degree` with fresh coefficients.
pub fn substitute_polynomial_solution(l: &DecisionAffineMatrixPoly, degree: u32) -> Substitution {
    let k = l.vars().len();
    let monomials = Monomial::up_to_degree(k, degree);
    let nm = monomials.len();
    let arity = l.arity() * nm;
    let mut lifted = DecisionAffineMatrixPoly::from_constant(l.constant().clone(), arity);
    for (i, term) in l.terms() {
        for (a, m) in monomials.iter().enumerate() {
            lifted
                .add_term(i * nm + a, &term.mul_monomial(m))
                .expect("index within the lifted arity");
        }
    }
    Substitution {
        lifted,
        monomials,
        original_arity: l.arity(),
    }
}

/// Worst minimum eigenvalue of `L(p, h)` over the adapted grid with
/// `per_axis` points per coordinate.
pub fn soundness_grid_check(l: &DecisionAffineMatrixPoly, dom: &TriangularDomain, h: &[f64], per_axis: usize) -> f64 {
    dom.grid(per_axis)
        .iter()
        .map(|p| hermitian_min_eigenvalue(&l.eval(p, h)))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{MatrixPoly, ScalarPoly};

    fn h_minus_p() -> (DecisionAffineMatrixPoly, TriangularDomain) {
        let dom = TriangularDomain::boxed(&["p"], &[(0.0, 1.0)]).unwrap();
        let v = dom.vars().clone();
        let p = ScalarPoly::var(v.clone(), "p").unwrap();
        let l = DecisionAffineMatrixPoly::new(
            MatrixPoly::scalar(p.scale(-1.0).to_complex()),
            1,
            [(0, MatrixPoly::identity(v, 1))],
        )
        .unwrap();
        (l, dom)
    }

    #[test]
    fn degree_zero_keeps_map() {
        let (l, _) = h_minus_p();
        let s = substitute_polynomial_solution(&l, 0);
        assert_eq!(s.lifted.arity(), 1);
        assert_eq!(s.lifted, l);
    }

    #[test]
    fn arity_counts_monomials() {
        let (l, _) = h_minus_p();
        let s = substitute_polynomial_solution(&l, 3);
        assert_eq!(s.lifted.arity(), 4);
        // two parameters, degree 2, two decisions: 2 * C(4, 2)
        let dom = TriangularDomain::boxed(&["x", "y"], &[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let c = DecisionAffineMatrixPoly::zeros(dom.vars().clone(), 1, 1, 2);
        assert_eq!(substitute_polynomial_solution(&c, 2).lifted.arity(), 12);
    }

    #[test]
    fn affine_solution_is_feasible_pointwise() {
        // h(p) = p + 0.1 makes h - p = 0.1
        let (l, dom) = h_minus_p();
        let s = substitute_polynomial_solution(&l, 1);
        let hhat = [0.1, 1.0];
        let worst = soundness_grid_check(&s.lifted, &dom, &hhat, 11);
        assert!((worst - 0.1).abs() < 1e-12);
        assert_eq!(s.eval_solution(&hhat, &[0.5]), vec![0.6]);
    }

    #[test]
    fn identity_grid_value() {
        let dom = TriangularDomain::boxed(&["p"], &[(0.0, 1.0)]).unwrap();
        let l = DecisionAffineMatrixPoly::from_constant(MatrixPoly::identity(dom.vars().clone(), 2), 0);
        assert_eq!(soundness_grid_check(&l, &dom, &[], 5), 1.0);
    }
}
