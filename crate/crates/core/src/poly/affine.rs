use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Degree, MatrixPoly, PolyError, Vars};

/// Matrix polynomial in the parameters whose coefficients are affine in a
/// real decision vector `h`: `constant + sum_i h_i * term_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionAffineMatrixPoly {
    arity: usize,
    constant: MatrixPoly,
    terms: BTreeMap<usize, MatrixPoly>,
}

impl DecisionAffineMatrixPoly {
    /// A decision-free matrix polynomial viewed with the given arity.
    pub fn from_constant(constant: MatrixPoly, arity: usize) -> Self {
        DecisionAffineMatrixPoly {
            arity,
            constant,
            terms: BTreeMap::new(),
        }
    }

    pub fn zeros(vars: Vars, rows: usize, cols: usize, arity: usize) -> Self {
        Self::from_constant(MatrixPoly::zeros(vars, rows, cols), arity)
    }

    pub fn new(
        constant: MatrixPoly,
        arity: usize,
        terms: impl IntoIterator<Item = (usize, MatrixPoly)>,
    ) -> Result<Self, PolyError> {
        let mut out = Self::from_constant(constant, arity);
        for (i, t) in terms {
            out.add_term(i, &t)?;
        }
        Ok(out)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> usize {
        self.constant.rows()
    }

    pub fn cols(&self) -> usize {
        self.constant.cols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.constant.dims()
    }

    pub fn vars(&self) -> &Vars {
        self.constant.vars()
    }

    pub fn constant(&self) -> &MatrixPoly {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &MatrixPoly)> {
        self.terms.iter().map(|(&i, t)| (i, t))
    }

    pub fn term(&self, i: usize) -> Option<&MatrixPoly> {
        self.terms.get(&i)
    }

    fn check(&self, m: &MatrixPoly) -> Result<(), PolyError> {
        if m.vars() != self.vars() {
            return Err(PolyError::VarMismatch {
                left: self.vars().to_vec(),
                right: m.vars().to_vec(),
            });
        }
        if m.dims() != self.dims() {
            return Err(PolyError::DimMismatch {
                expected: self.dims(),
                found: m.dims(),
            });
        }
        Ok(())
    }

    /// Adds `m` to the coefficient of `h_index`.
    pub fn add_term(&mut self, index: usize, m: &MatrixPoly) -> Result<(), PolyError> {
        self.check(m)?;
        if index >= self.arity {
            return Err(PolyError::DecisionIndex {
                index,
                arity: self.arity,
            });
        }
        let sum = match self.terms.get(&index) {
            Some(t) => t + m,
            None => m.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&index);
        } else {
            self.terms.insert(index, sum);
        }
        Ok(())
    }

    pub fn add_constant(&mut self, m: &MatrixPoly) -> Result<(), PolyError> {
        self.check(m)?;
        self.constant = &self.constant + m;
        Ok(())
    }

    /// Same map viewed over a larger decision vector.
    pub fn with_arity(&self, arity: usize) -> Self {
        assert!(arity >= self.arity, "arity can only grow");
        let mut out = self.clone();
        out.arity = arity;
        out
    }

    /// Applies the same linear map to the constant part and every term.
    pub fn map_linear(
        &self,
        f: impl Fn(&MatrixPoly) -> Result<MatrixPoly, PolyError>,
    ) -> Result<Self, PolyError> {
        let constant = f(&self.constant)?;
        let mut terms = BTreeMap::new();
        for (&i, t) in &self.terms {
            let v = f(t)?;
            if !v.is_zero() {
                terms.insert(i, v);
            }
        }
        Ok(DecisionAffineMatrixPoly {
            arity: self.arity,
            constant,
            terms,
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        let arity = self.arity.max(other.arity);
        let mut out = self.with_arity(arity);
        out.add_constant(&other.constant)?;
        for (&i, t) in &other.terms {
            out.add_term(i, t)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&other.map_linear(|m| Ok(-m))?)
    }

    /// True if the constant part and every term have real coefficients.
    pub fn is_real(&self) -> bool {
        self.constant.is_real() && self.terms.values().all(|t| t.is_real())
    }

    /// Exact Hermitian check of the constant part and every term.
    pub fn is_hermitian(&self) -> bool {
        self.constant.is_hermitian() && self.terms.values().all(|t| t.is_hermitian())
    }

    /// Max exponent of `var` over the constant part and all decision terms.
    pub fn degree_in(&self, name: &str) -> Result<Degree, PolyError> {
        let i = super::polynomial::var_index(self.vars(), name)?;
        Ok(self.degree_in_index(i))
    }

    pub fn degree_in_index(&self, var: usize) -> Degree {
        std::iter::once(&self.constant)
            .chain(self.terms.values())
            .map(|m| m.degree_in_index(var))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Total degree in the first `len` variables, over all parts.
    pub fn prefix_degree(&self, len: usize) -> Degree {
        std::iter::once(&self.constant)
            .chain(self.terms.values())
            .map(|m| m.prefix_degree(len))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn total_degree(&self) -> Degree {
        self.prefix_degree(self.vars().len())
    }

    /// Substitutes the decision vector, leaving a matrix polynomial in `p`.
    pub fn eval_decision(&self, h: &[f64]) -> Result<MatrixPoly, PolyError> {
        if h.len() != self.arity {
            return Err(PolyError::DecisionIndex {
                index: h.len(),
                arity: self.arity,
            });
        }
        let mut out = self.constant.clone();
        for (&i, t) in &self.terms {
            if h[i] != 0.0 {
                out = &out + &t.scale(Complex64::new(h[i], 0.0));
            }
        }
        Ok(out)
    }

    /// Numeric value at parameter point `p` and decision vector `h`.
    pub fn eval(&self, p: &[f64], h: &[f64]) -> DMatrix<Complex64> {
        assert_eq!(h.len(), self.arity, "decision vector length");
        let mut out = self.constant.eval(p);
        for (&i, t) in &self.terms {
            if h[i] != 0.0 {
                out += t.eval(p) * Complex64::new(h[i], 0.0);
            }
        }
        out
    }
}
