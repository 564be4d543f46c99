use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ComplexPoly, Degree, Monomial, PolyError, ScalarPoly, Vars};

/// Complex matrix whose entries are polynomials in a shared variable list.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    rows: usize,
    cols: usize,
    vars: Vars,
    entries: Vec<ComplexPoly>,
}

impl MatrixPoly {
    pub fn zeros(vars: Vars, rows: usize, cols: usize) -> Self {
        MatrixPoly {
            rows,
            cols,
            entries: vec![ComplexPoly::zero(vars.clone()); rows * cols],
            vars,
        }
    }

    pub fn identity(vars: Vars, n: usize) -> Self {
        let mut m = Self::zeros(vars.clone(), n, n);
        for i in 0..n {
            m.set(i, i, ComplexPoly::one(vars.clone()));
        }
        m
    }

    /// Row-major entries.
    pub fn from_entries(
        vars: Vars,
        rows: usize,
        cols: usize,
        entries: Vec<ComplexPoly>,
    ) -> Result<Self, PolyError> {
        if entries.len() != rows * cols {
            return Err(PolyError::DimMismatch {
                expected: (rows, cols),
                found: (entries.len(), 1),
            });
        }
        if let Some(bad) = entries.iter().find(|e| *e.vars() != vars) {
            return Err(PolyError::VarMismatch {
                left: vars.to_vec(),
                right: bad.vars().to_vec(),
            });
        }
        Ok(MatrixPoly {
            rows,
            cols,
            vars,
            entries,
        })
    }

    pub fn from_real_entries(
        vars: Vars,
        rows: usize,
        cols: usize,
        entries: Vec<ScalarPoly>,
    ) -> Result<Self, PolyError> {
        Self::from_entries(vars, rows, cols, entries.iter().map(|e| e.to_complex()).collect())
    }

    pub fn from_constant(vars: Vars, m: &DMatrix<Complex64>) -> Self {
        let mut out = Self::zeros(vars.clone(), m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.set(i, j, ComplexPoly::constant(vars.clone(), m[(i, j)]));
            }
        }
        out
    }

    /// `1x1` matrix holding `p`.
    pub fn scalar(p: ComplexPoly) -> Self {
        MatrixPoly {
            rows: 1,
            cols: 1,
            vars: p.vars().clone(),
            entries: vec![p],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn entry(&self, i: usize, j: usize) -> &ComplexPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: ComplexPoly) {
        assert_eq!(*p.vars(), self.vars, "entry variables");
        self.entries[i * self.cols + j] = p;
    }

    /// Adds `c * m` to entry `(i, j)`.
    pub fn add_term(&mut self, i: usize, j: usize, m: Monomial, c: Complex64) {
        self.entries[i * self.cols + j].add_term(m, c);
    }

    pub fn entries(&self) -> &[ComplexPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// True if every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.terms().all(|(_, c)| c.im == 0.0))
    }

    /// Hermitian matrix built from the upper triangle: `(j, i)` becomes the
    /// conjugate of `(i, j)` and diagonal imaginary parts are dropped.
    pub fn hermitian_from_upper(&self) -> Self {
        assert_eq!(self.rows, self.cols, "square matrix");
        let mut out = self.clone();
        for i in 0..self.rows {
            let d = self.entry(i, i);
            let re = ComplexPoly::from_terms(
                self.vars.clone(),
                d.terms().map(|(m, c)| (m.clone(), Complex64::new(c.re, 0.0))),
            );
            out.set(i, i, re);
            for j in i + 1..self.cols {
                out.set(j, i, self.entry(i, j).conj());
            }
        }
        out
    }

    /// Exact coefficient-wise Hermitian check.
    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (i..self.cols).all(|j| *self.entry(i, j) == self.entry(j, i).conj()))
    }

    pub fn degree_in(&self, name: &str) -> Result<Degree, PolyError> {
        let i = super::polynomial::var_index(&self.vars, name)?;
        Ok(self.degree_in_index(i))
    }

    pub fn degree_in_index(&self, var: usize) -> Degree {
        self.entries
            .iter()
            .map(|e| e.degree_in_index(var))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn total_degree(&self) -> Degree {
        self.entries
            .iter()
            .map(|e| e.total_degree())
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn prefix_degree(&self, len: usize) -> Degree {
        self.entries
            .iter()
            .map(|e| e.prefix_degree(len))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), PolyError> {
        if self.vars != other.vars {
            return Err(PolyError::VarMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            });
        }
        if self.dims() != other.dims() {
            return Err(PolyError::DimMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&ComplexPoly, &ComplexPoly) -> ComplexPoly) -> Self {
        MatrixPoly {
            rows: self.rows,
            cols: self.cols,
            vars: self.vars.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Matrix product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.vars != other.vars {
            return Err(PolyError::VarMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            });
        }
        if self.cols != other.rows {
            return Err(PolyError::DimMismatch {
                expected: (self.cols, other.cols),
                found: other.dims(),
            });
        }
        let mut out = Self::zeros(self.vars.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.entry(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn map_entries(&self, f: impl Fn(&ComplexPoly) -> ComplexPoly) -> Self {
        MatrixPoly {
            rows: self.rows,
            cols: self.cols,
            vars: self.vars.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_entries(|e| e.scale(s))
    }

    /// Entrywise product with a scalar polynomial.
    pub fn mul_poly(&self, p: &ComplexPoly) -> Self {
        self.map_entries(|e| e * p)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        self.map_entries(|e| e.mul_monomial(m))
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.vars.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.entry(i, j).conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self, PolyError> {
        if self.vars != other.vars {
            return Err(PolyError::VarMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            });
        }
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(self.vars.clone(), r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.entry(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.entry(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + k, j * other.cols + l, a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copies `block` into the submatrix starting at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &MatrixPoly) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.entry(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> MatrixPoly {
        let mut out = Self::zeros(self.vars.clone(), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.entry(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    pub fn eval(&self, point: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).eval(point))
    }

    /// Value of a matrix without variables.
    pub fn to_constant(&self) -> DMatrix<Complex64> {
        assert!(self.vars.is_empty() || self.total_degree() <= Degree::Finite(0));
        let zero = Monomial::one(self.vars.len());
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).coeff(&zero))
    }

    pub fn extend_vars(&self, target: &Vars) -> Result<Self, PolyError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.extend_vars(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixPoly {
            rows: self.rows,
            cols: self.cols,
            vars: target.clone(),
            entries,
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs_coeff()).fold(0.0, f64::max)
    }

    /// Real entries, if every coefficient is real.
    pub fn to_real_entries(&self) -> Option<Vec<ScalarPoly>> {
        self.entries.iter().map(|e| e.to_real()).collect()
    }
}

impl std::ops::Add for &MatrixPoly {
    type Output = MatrixPoly;
    fn add(self, rhs: &MatrixPoly) -> MatrixPoly {
        self.checked_add(rhs).expect("matrix polynomial addition")
    }
}

impl std::ops::Sub for &MatrixPoly {
    type Output = MatrixPoly;
    fn sub(self, rhs: &MatrixPoly) -> MatrixPoly {
        self.checked_sub(rhs).expect("matrix polynomial subtraction")
    }
}

impl std::ops::Mul for &MatrixPoly {
    type Output = MatrixPoly;
    fn mul(self, rhs: &MatrixPoly) -> MatrixPoly {
        self.checked_mul(rhs).expect("matrix polynomial product")
    }
}

impl std::ops::Neg for &MatrixPoly {
    type Output = MatrixPoly;
    fn neg(self) -> MatrixPoly {
        self.map_entries(|e| -e)
    }
}
