use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::{Monomial, PolyError};

/// Ordered list of parameter names shared by a family of polynomials.
pub type Vars = Arc<[String]>;

/// Builds a [`Vars`] list from names.
pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// The first `len` variables of `vars`.
pub fn prefix_vars(vars: &Vars, len: usize) -> Vars {
    vars[..len].iter().cloned().collect()
}

/// Scalar field of polynomial coefficients: `f64` or `Complex64`.
pub trait Coefficient:
    Copy
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn to_complex(self) -> Complex64;
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Coefficient for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Degree of a polynomial in one variable; the zero polynomial has degree
/// `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Finite degree, with `NegInfinity` mapped to zero.
    pub fn or_zero(self) -> u32 {
        self.finite().unwrap_or(0)
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        match (self, rhs) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInfinity,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Sparse multivariate polynomial with coefficients in `C`.
///
/// Terms are kept in graded-lex order with no stored zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C: Coefficient> {
    vars: Vars,
    terms: BTreeMap<Monomial, C>,
}

pub type ScalarPoly = Polynomial<f64>;
pub type ComplexPoly = Polynomial<Complex64>;

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(vars: Vars) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vars, c: C) -> Self {
        let n = vars.len();
        Self::from_terms(vars, [(Monomial::one(n), c)])
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, C::one())
    }

    /// The polynomial `name`.
    pub fn var(vars: Vars, name: &str) -> Result<Self, PolyError> {
        let i = var_index(&vars, name)?;
        let n = vars.len();
        Ok(Self::from_terms(vars, [(Monomial::var_pow(n, i, 1), C::one())]))
    }

    /// Single term `c * m`.
    pub fn monomial(vars: Vars, m: Monomial, c: C) -> Self {
        Self::from_terms(vars, [(m, c)])
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(vars: Vars, terms: I) -> Self {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), p.vars.len(), "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).copied().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn degree_in(&self, name: &str) -> Result<Degree, PolyError> {
        Ok(self.degree_in_index(var_index(&self.vars, name)?))
    }

    pub fn degree_in_index(&self, var: usize) -> Degree {
        self.terms
            .keys()
            .map(|m| Degree::Finite(m.exp(var)))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| Degree::Finite(m.degree()))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Total degree in the first `len` variables.
    pub fn prefix_degree(&self, len: usize) -> Degree {
        self.terms
            .keys()
            .map(|m| Degree::Finite(m.exponents()[..len].iter().sum()))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    fn check_vars(&self, other: &Self) -> Result<(), PolyError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::VarMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = Polynomial::zero(self.vars.clone());
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: C) -> Self {
        Polynomial::from_terms(
            self.vars.clone(),
            self.terms.iter().map(|(m, &c)| (m.clone(), c * s)),
        )
    }

    /// Multiplies by the monomial `m`.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, &c)| (k.mul(m), c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Polynomial::one(self.vars.clone());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, point: &[f64]) -> C {
        assert_eq!(point.len(), self.nvars(), "evaluation point arity");
        self.terms
            .iter()
            .fold(C::zero(), |acc, (m, &c)| acc + c * C::from_real(m.eval(point)))
    }

    pub fn conj(&self) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), c.conj())).collect(),
        }
    }

    pub fn to_complex(&self) -> ComplexPoly {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), c.to_complex()))
                .collect(),
        }
    }

    /// Decomposes into `(exponent of last variable, coefficient polynomial in
    /// the remaining variables)`, ascending in the exponent.
    pub fn split_last(&self) -> Vec<(u32, Polynomial<C>)> {
        let n = self.nvars();
        assert!(n > 0, "split_last on a polynomial without variables");
        let prefix = prefix_vars(&self.vars, n - 1);
        let mut parts: BTreeMap<u32, Polynomial<C>> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let (rest, e) = m.split_last();
            parts
                .entry(e)
                .or_insert_with(|| Polynomial::zero(prefix.clone()))
                .add_term(rest, c);
        }
        parts.into_iter().collect()
    }

    /// Re-expresses a polynomial over a prefix of `target` in `target`.
    pub fn extend_vars(&self, target: &Vars) -> Result<Self, PolyError> {
        if target.len() < self.nvars() || target[..self.nvars()] != self.vars[..] {
            return Err(PolyError::VarMismatch {
                left: self.vars.to_vec(),
                right: target.to_vec(),
            });
        }
        Ok(Polynomial {
            vars: target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.extend_to(target.len()), c))
                .collect(),
        })
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_complex().norm())
            .fold(0.0, f64::max)
    }
}

impl ComplexPoly {
    /// Real part, or `None` if any coefficient has a nonzero imaginary part.
    pub fn to_real(&self) -> Option<ScalarPoly> {
        if self.terms.values().any(|c| c.im != 0.0) {
            return None;
        }
        Some(Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.re)).collect(),
        })
    }
}

pub(crate) fn var_index(vars: &Vars, name: &str) -> Result<usize, PolyError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
}

impl<C: Coefficient> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl<C: Coefficient> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl<C: Coefficient> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<C: Coefficient> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?} ", &self.vars[..])?;
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vars {
        vars(&["x", "y"])
    }

    #[test]
    fn difference_of_squares() {
        let v = vars(&["p1"]);
        let p = ScalarPoly::var(v.clone(), "p1").unwrap();
        let one = ScalarPoly::one(v.clone());
        let prod = &(&p + &one) * &(&p - &one);
        let expected = ScalarPoly::from_terms(
            v,
            [(Monomial::new(vec![2]), 1.0), (Monomial::new(vec![0]), -1.0)],
        );
        assert_eq!(prod, expected);
    }

    #[test]
    fn exponent_addition() {
        let a = ScalarPoly::monomial(xy(), Monomial::new(vec![4, 2]), 1.0);
        let b = ScalarPoly::monomial(xy(), Monomial::new(vec![2, 4]), 1.0);
        let c = &a * &b;
        assert_eq!(c.num_terms(), 1);
        assert_eq!(c.coeff(&Monomial::new(vec![6, 6])), 1.0);
    }

    #[test]
    fn degrees() {
        let x = ScalarPoly::var(xy(), "x").unwrap();
        let y = ScalarPoly::var(xy(), "y").unwrap();
        let one = ScalarPoly::one(xy());
        let x2y2 = &x.pow(2) * &y.pow(2);
        let g = &(&(&(&x.pow(4) * &y.pow(2)) + &(&x.pow(2) * &y.pow(4))) - &x2y2.scale(3.0)) + &one;
        assert_eq!(g.degree_in("y").unwrap(), Degree::Finite(4));
        assert_eq!(ScalarPoly::zero(xy()).degree_in("x").unwrap(), Degree::NegInfinity);
        assert_eq!(ScalarPoly::constant(xy(), 5.0).degree_in("x").unwrap(), Degree::Finite(0));
        assert!(matches!(g.degree_in("z"), Err(PolyError::UnknownVariable(_))));
    }

    #[test]
    fn mismatched_vars_rejected() {
        let a = ScalarPoly::one(vars(&["x"]));
        let b = ScalarPoly::one(vars(&["y"]));
        assert!(matches!(a.checked_add(&b), Err(PolyError::VarMismatch { .. })));
        assert!(matches!(a.checked_mul(&b), Err(PolyError::VarMismatch { .. })));
    }

    #[test]
    fn cancellation_normalizes() {
        let x = ScalarPoly::var(xy(), "x").unwrap();
        assert!((&x - &x).is_zero());
        assert!(x.scale(0.0).is_zero());
    }

    #[test]
    fn split_last_roundtrip() {
        let x = ScalarPoly::var(xy(), "x").unwrap();
        let y = ScalarPoly::var(xy(), "y").unwrap();
        let p = &(&x * &y.pow(2)) + &x.pow(3);
        let parts = p.split_last();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, 0);
        assert_eq!(parts[1].0, 2);
        let mut back = ScalarPoly::zero(xy());
        for (e, c) in parts {
            let c = c.extend_vars(&xy()).unwrap();
            back = &back + &(&c * &y.pow(e));
        }
        assert_eq!(back, p);
    }
}
