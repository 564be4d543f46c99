use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DecisionAffineMatrixPoly, MatrixPoly, Monomial, PolyError, Vars};

/// Scalar field of a parameterized Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    /// Real symmetric: `n(n+1)/2` coordinates per monomial.
    Real,
    /// Complex Hermitian: `n^2` real coordinates per monomial (symmetric real
    /// part plus skew imaginary part).
    Complex,
    /// Purely imaginary Hermitian `i K` with `K` real antisymmetric:
    /// `n(n-1)/2` coordinates per monomial.
    Imaginary,
}

/// Hermitian matrix polynomial `H(p) = sum_k y_k B_k m_k(p)` whose real
/// coordinates `y` occupy a contiguous range of a decision vector.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianParam {
    pub size: usize,
    pub field: Field,
    pub vars: Vars,
    pub monomials: Vec<Monomial>,
    pub offset: usize,
}

impl HermitianParam {
    /// All monomials of total degree `<= degree` in `vars`.
    pub fn new(vars: Vars, size: usize, degree: u32, field: Field, offset: usize) -> Self {
        let monomials = Monomial::up_to_degree(vars.len(), degree);
        HermitianParam {
            size,
            field,
            vars,
            monomials,
            offset,
        }
    }

    pub fn basis_len(&self) -> usize {
        match self.field {
            Field::Real => self.size * (self.size + 1) / 2,
            Field::Complex => self.size * self.size,
            Field::Imaginary => self.size * self.size.saturating_sub(1) / 2,
        }
    }

    pub fn len(&self) -> usize {
        self.basis_len() * self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len()
    }

    /// Constant basis matrix number `b` (`b < basis_len()`).
    pub fn basis_matrix(&self, b: usize) -> DMatrix<Complex64> {
        let n = self.size;
        let mut out = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        let mut k = 0;
        for r in 0..n {
            for c in r..n {
                if r == c {
                    if self.field == Field::Imaginary {
                        continue;
                    }
                    if k == b {
                        out[(r, r)] = Complex64::new(1.0, 0.0);
                        return out;
                    }
                    k += 1;
                    continue;
                }
                if self.field != Field::Imaginary {
                    if k == b {
                        out[(r, c)] = Complex64::new(1.0, 0.0);
                        out[(c, r)] = Complex64::new(1.0, 0.0);
                        return out;
                    }
                    k += 1;
                }
                if self.field != Field::Real {
                    if k == b {
                        out[(r, c)] = Complex64::new(0.0, 1.0);
                        out[(c, r)] = Complex64::new(0.0, -1.0);
                        return out;
                    }
                    k += 1;
                }
            }
        }
        panic!("basis index {b} out of range");
    }

    /// Iterates `(decision index, monomial, basis matrix)`.
    pub fn elements(&self) -> impl Iterator<Item = (usize, &Monomial, DMatrix<Complex64>)> + '_ {
        let bl = self.basis_len();
        let bases: Vec<_> = (0..bl).map(|b| self.basis_matrix(b)).collect();
        self.monomials.iter().enumerate().flat_map(move |(mi, mono)| {
            let bases = bases.clone();
            (0..bl).map(move |b| (self.offset + mi * bl + b, mono, bases[b].clone()))
        })
    }

    /// `H(p)` as a decision-affine matrix polynomial of the given arity.
    pub fn as_affine(&self, arity: usize) -> Result<DecisionAffineMatrixPoly, PolyError> {
        let mut out = DecisionAffineMatrixPoly::zeros(self.vars.clone(), self.size, self.size, arity);
        for (idx, mono, basis) in self.elements() {
            let t = MatrixPoly::from_constant(self.vars.clone(), &basis).mul_monomial(mono);
            out.add_term(idx, &t)?;
        }
        Ok(out)
    }

    /// Evaluates the coordinates stored in `y` (a full decision vector).
    pub fn assemble(&self, y: &[f64]) -> MatrixPoly {
        let mut out = MatrixPoly::zeros(self.vars.clone(), self.size, self.size);
        for (idx, mono, basis) in self.elements() {
            let v = y[idx];
            if v == 0.0 {
                continue;
            }
            for i in 0..self.size {
                for j in 0..self.size {
                    let c = basis[(i, j)];
                    if c != Complex64::new(0.0, 0.0) {
                        out.add_term(i, j, mono.clone(), c * v);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    #[test]
    fn counts_and_hermitian() {
        let v = vars(&["x"]);
        let p = HermitianParam::new(v.clone(), 3, 2, Field::Complex, 5);
        assert_eq!(p.basis_len(), 9);
        assert_eq!(p.len(), 27);
        assert_eq!(p.range(), 5..32);
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let h = p.assemble(&y);
        assert!(h.is_hermitian());
        let a = p.as_affine(40).unwrap();
        assert!(a.is_hermitian());
        let diff = (a.eval(&[0.4], &y) - h.eval(&[0.4])).norm();
        assert!(diff < 1e-12);
        let r = HermitianParam::new(v.clone(), 3, 0, Field::Real, 0);
        assert_eq!(r.len(), 6);
        let im = HermitianParam::new(v, 3, 1, Field::Imaginary, 0);
        assert_eq!(im.len(), 6);
        for b in 0..3 {
            let m = im.basis_matrix(b);
            assert!(m.iter().all(|z| z.re == 0.0));
            assert_eq!(m.adjoint(), m);
        }
    }
}
