use super::ReduceError;
use crate::poly::{prefix_vars, MatrixPoly, ScalarPoly, Vars};

/// Points per axis used to validate `a_i < b_i` at construction.
pub const VALIDATION_POINTS: usize = 21;

/// `a_1 <= p_1 <= b_1`, `a_i(p_1..p_{i-1}) <= p_i <= b_i(p_1..p_{i-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularDomain {
    vars: Vars,
    bounds: Vec<(ScalarPoly, ScalarPoly)>,
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if n == 1 {
            0.5 * (a + b)
        } else {
            let t = i as f64 / (n - 1) as f64;
            a + (b - a) * t
        }
    })
}

impl TriangularDomain {
    /// Bound `i` must be a polynomial in the first `i` variables. The strict
    /// ordering `a_i < b_i` is checked on a sampled grid.
    pub fn new(vars: Vars, bounds: Vec<(ScalarPoly, ScalarPoly)>) -> Result<Self, ReduceError> {
        if bounds.len() != vars.len() {
            return Err(ReduceError::Domain(format!(
                "{} variables but {} bound pairs",
                vars.len(),
                bounds.len()
            )));
        }
        for (i, (a, b)) in bounds.iter().enumerate() {
            let prefix = prefix_vars(&vars, i);
            if a.vars() != &prefix || b.vars() != &prefix {
                return Err(ReduceError::Domain(format!(
                    "bounds of {} must be polynomials in {:?}",
                    vars[i],
                    prefix.to_vec()
                )));
            }
        }
        let dom = TriangularDomain { vars, bounds };
        dom.validate()?;
        Ok(dom)
    }

    /// Constant box `lo_i <= p_i <= hi_i`.
    pub fn boxed<S: AsRef<str>>(names: &[S], ranges: &[(f64, f64)]) -> Result<Self, ReduceError> {
        let vars = crate::poly::vars(names);
        let bounds = ranges
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let prefix = prefix_vars(&vars, i);
                (ScalarPoly::constant(prefix.clone(), lo), ScalarPoly::constant(prefix, hi))
            })
            .collect();
        Self::new(vars, bounds)
    }

    fn validate(&self) -> Result<(), ReduceError> {
        let mut prefix_points: Vec<Vec<f64>> = vec![Vec::new()];
        for (i, (a, b)) in self.bounds.iter().enumerate() {
            let mut next = Vec::new();
            for q in &prefix_points {
                let lo = a.eval(q);
                let hi = b.eval(q);
                if !(lo < hi) {
                    return Err(ReduceError::Domain(format!(
                        "empty range for {}: [{lo}, {hi}] at {q:?}",
                        self.vars[i]
                    )));
                }
                if i + 1 < self.bounds.len() {
                    for t in linspace(lo, hi, VALIDATION_POINTS) {
                        let mut p = q.clone();
                        p.push(t);
                        next.push(p);
                    }
                }
            }
            prefix_points = next;
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn bound(&self, i: usize) -> &(ScalarPoly, ScalarPoly) {
        &self.bounds[i]
    }

    pub fn bounds(&self) -> &[(ScalarPoly, ScalarPoly)] {
        &self.bounds
    }

    /// Domain of the first `len` variables.
    pub fn prefix(&self, len: usize) -> TriangularDomain {
        TriangularDomain {
            vars: prefix_vars(&self.vars, len),
            bounds: self.bounds[..len].to_vec(),
        }
    }

    /// Tensor grid adapted to the triangular structure: `p_i` takes `per_axis`
    /// equispaced values in `[a_i(prefix), b_i(prefix)]`.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let mut points: Vec<Vec<f64>> = vec![Vec::new()];
        for (a, b) in &self.bounds {
            let mut next = Vec::with_capacity(points.len() * per_axis);
            for q in &points {
                let (lo, hi) = (a.eval(q), b.eval(q));
                for t in linspace(lo, hi, per_axis) {
                    let mut p = q.clone();
                    p.push(t);
                    next.push(p);
                }
            }
            points = next;
        }
        points
    }

    /// Checks that `p` lies in the domain up to `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.len() == self.k()
            && self.bounds.iter().enumerate().all(|(i, (a, b))| {
                let q = &p[..i];
                a.eval(q) - tol <= p[i] && p[i] <= b.eval(q) + tol
            })
    }
}

/// `[[-1, (a+b)/2], [(a+b)/2, -ab]]`, so that
/// `(lambda, 1) Theta_2 (lambda, 1)^* = -(lambda - a)(lambda - b)`.
pub fn interval_theta(a: &ScalarPoly, b: &ScalarPoly) -> Result<MatrixPoly, ReduceError> {
    let vars = a.vars().clone();
    let half_sum = a.checked_add(b)?.scale(0.5);
    let prod = a.checked_mul(b)?.scale(-1.0);
    let minus_one = ScalarPoly::constant(vars.clone(), -1.0);
    Ok(MatrixPoly::from_entries(
        vars.clone(),
        2,
        2,
        vec![
            minus_one.to_complex(),
            half_sum.to_complex(),
            half_sum.to_complex(),
            prod.to_complex(),
        ],
    )?)
}

/// Pointwise `(lambda, 1) Theta (lambda, 1)^*` for a constant 2x2 matrix.
#[cfg(test)]
pub(crate) fn theta_form(theta: &nalgebra::DMatrix<num_complex::Complex64>, lambda: f64) -> f64 {
    (theta[(0, 0)] * lambda * lambda + (theta[(0, 1)] + theta[(1, 0)]) * lambda + theta[(1, 1)]).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    #[test]
    fn box_interval_theta() {
        let v = vars::<&str>(&[]);
        let a = ScalarPoly::constant(v.clone(), -2.0);
        let b = ScalarPoly::constant(v, 2.0);
        let t = interval_theta(&a, &b).unwrap().to_constant();
        assert_eq!(t[(0, 0)].re, -1.0);
        assert_eq!(t[(0, 1)].re, 0.0);
        assert_eq!(t[(1, 1)].re, 4.0);
    }

    #[test]
    fn unit_interval_theta() {
        let v = vars::<&str>(&[]);
        let t = interval_theta(&ScalarPoly::constant(v.clone(), 0.0), &ScalarPoly::constant(v, 1.0))
            .unwrap()
            .to_constant();
        assert_eq!(t[(0, 1)].re, 0.5);
        assert_eq!(t[(1, 0)].re, 0.5);
        assert_eq!(t[(1, 1)].re, 0.0);
        assert_eq!(t[(0, 0)].re, -1.0);
    }

    #[test]
    fn endpoints_on_curve() {
        let v = vars(&["x"]);
        let x = ScalarPoly::var(v.clone(), "x").unwrap();
        let a = &x.pow(2) - &ScalarPoly::constant(v.clone(), 1.0);
        let b = &x.scale(0.5) + &ScalarPoly::constant(v.clone(), 3.0);
        let t = interval_theta(&a, &b).unwrap();
        for q in [-0.7, 0.1, 1.3] {
            let tq = t.eval(&[q]);
            assert!(theta_form(&tq, a.eval(&[q])).abs() < 1e-12);
            assert!(theta_form(&tq, b.eval(&[q])).abs() < 1e-12);
            let mid = 0.5 * (a.eval(&[q]) + b.eval(&[q]));
            assert!(theta_form(&tq, mid) > 0.0);
        }
    }

    #[test]
    fn triangular_validation() {
        let v = vars(&["x", "y"]);
        let x = ScalarPoly::var(prefix_vars(&v, 1), "x").unwrap();
        let one = ScalarPoly::constant(prefix_vars(&v, 1), 1.0);
        let e = |c: f64| ScalarPoly::constant(prefix_vars(&v, 0), c);
        let ok = TriangularDomain::new(v.clone(), vec![(e(-1.0), e(1.0)), (&x - &one, &x + &one)]);
        assert!(ok.is_ok());
        let dom = ok.unwrap();
        let g = dom.grid(3);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], vec![-1.0, -2.0]);
        assert!(dom.contains(&[0.5, 1.4], 0.0));
        assert!(!dom.contains(&[0.5, 1.6], 0.0));
        // y in [-x, x] is empty at x = -1
        let bad = TriangularDomain::new(v.clone(), vec![(e(-1.0), e(1.0)), (x.scale(-1.0), x.clone())]);
        assert!(matches!(bad, Err(ReduceError::Domain(_))));
        assert!(TriangularDomain::boxed(&["x"], &[(1.0, 1.0)]).is_err());
    }
}
