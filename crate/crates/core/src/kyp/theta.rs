use num_complex::Complex64;

use super::KypError;
use crate::linalg::{c, CMatrix};

/// A point of the extended complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    pub fn real(x: f64) -> Self {
        ExtendedComplex::Finite(c(x))
    }

    /// Homogeneous coordinates `(lambda, 1)` or `(1, 0)`.
    pub fn homogeneous(self) -> (Complex64, Complex64) {
        match self {
            ExtendedComplex::Finite(l) => (l, c(1.0)),
            ExtendedComplex::Infinity => (c(1.0), c(0.0)),
        }
    }
}

/// 2x2 Hermitian matrix with negative determinant. It describes the curve
/// `{lambda : (lambda, 1) Theta (lambda, 1)^* = 0}` (a line or circle) and the
/// domain where the same form is nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSpec {
    theta: CMatrix,
}

impl ThetaSpec {
    pub fn new(theta: CMatrix) -> Result<Self, KypError> {
        if theta.shape() != (2, 2) {
            return Err(KypError::DimMismatch(format!(
                "theta must be 2x2, got {:?}",
                theta.shape()
            )));
        }
        if theta[(0, 0)].im != 0.0
            || theta[(1, 1)].im != 0.0
            || theta[(0, 1)] != theta[(1, 0)].conj()
        {
            return Err(KypError::InvalidTheta("theta is not Hermitian".into()));
        }
        let det = (theta[(0, 0)] * theta[(1, 1)] - theta[(0, 1)] * theta[(1, 0)]).re;
        let norm2 = theta.norm_squared();
        if det >= -1e-12 * norm2 {
            return Err(KypError::InvalidTheta(format!("det(theta) = {det} is not negative")));
        }
        Ok(ThetaSpec { theta })
    }

    pub fn from_real(t11: f64, t12: f64, t22: f64) -> Result<Self, KypError> {
        Self::new(CMatrix::from_row_slice(2, 2, &[c(t11), c(t12), c(t12), c(t22)]))
    }

    /// `[[0, 1], [1, 0]]`: the imaginary axis, domain `Re >= 0`.
    pub fn imaginary_axis() -> Self {
        Self::from_real(0.0, 1.0, 0.0).expect("valid theta")
    }

    /// `[[0, -i], [i, 0]]`: the real axis, domain `Im >= 0`.
    pub fn real_axis() -> Self {
        Self::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), c(0.0)],
        ))
        .expect("valid theta")
    }

    /// `[[-1, 0], [0, r^2]]`: circle `|lambda| = r`, domain the closed disk.
    pub fn disk(r: f64) -> Result<Self, KypError> {
        Self::from_real(-1.0, 0.0, r * r)
    }

    /// `[[-1, (a+b)/2], [(a+b)/2, -ab]]`: on the real axis the domain is `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self, KypError> {
        Self::from_real(-1.0, 0.5 * (a + b), -a * b)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.theta
    }

    pub fn theta11(&self) -> f64 {
        self.theta[(0, 0)].re
    }

    /// Membership tolerance `1e-9 (1 + |Theta|)`.
    pub fn tol(&self) -> f64 {
        1e-9 * (1.0 + self.theta.norm())
    }

    /// `(lambda, 1) Theta (lambda, 1)^*`, real by hermiticity.
    pub fn form(&self, lambda: Complex64) -> f64 {
        let t = &self.theta;
        t[(0, 0)].re * lambda.norm_sqr() + 2.0 * (lambda * t[(0, 1)]).re + t[(1, 1)].re
    }

    pub fn on_curve(&self, lambda: ExtendedComplex) -> bool {
        match lambda {
            ExtendedComplex::Finite(l) => self.form(l).abs() <= self.tol(),
            ExtendedComplex::Infinity => self.theta11().abs() <= self.tol(),
        }
    }

    pub fn in_domain(&self, lambda: ExtendedComplex) -> bool {
        match lambda {
            ExtendedComplex::Finite(l) => self.form(l) >= -self.tol(),
            ExtendedComplex::Infinity => self.theta11() >= -self.tol(),
        }
    }

    /// Points of the curve, uniform in an angle `s in [0, pi)` after the
    /// Möbius map sending the curve to the real projective line. Returned as
    /// homogeneous pairs `(num, den)` with `lambda = num / den`.
    pub fn curve_samples(&self, samples: usize) -> Vec<(Complex64, Complex64)> {
        let inv = self.normalizer_inverse();
        (0..samples)
            .map(|k| {
                let s = std::f64::consts::PI * (k as f64 + 0.5) / samples as f64;
                let w0 = c(s.cos());
                let w1 = c(s.sin());
                let v0 = w0 * inv[(0, 0)] + w1 * inv[(1, 0)];
                let v1 = w0 * inv[(0, 1)] + w1 * inv[(1, 1)];
                let scale = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
                (v0 / scale, v1 / scale)
            })
            .collect()
    }

    /// `(T^*)^{-1}` where `Theta = T^* Theta_R T` and `Theta_R` is the real-axis
    /// matrix. A row vector `w` on the real projective line maps to
    /// `(lambda, 1) ~ w (T^*)^{-1}` on this curve.
    fn normalizer_inverse(&self) -> CMatrix {
        let eig = self.theta.clone().symmetric_eigen();
        let (ip, ineg) = if eig.eigenvalues[0] > eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let u = CMatrix::from_columns(&[
            eig.eigenvectors.column(ip).into_owned(),
            eig.eigenvectors.column(ineg).into_owned(),
        ]);
        let alpha = eig.eigenvalues[ip];
        let beta = -eig.eigenvalues[ineg];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CMatrix::from_row_slice(
            2,
            2,
            &[c(s), c(s), Complex64::new(0.0, s), Complex64::new(0.0, -s)],
        );
        let w_inv = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0 / alpha.sqrt()),
            c(1.0 / beta.sqrt()),
        ]));
        v * w_inv * u.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(re: f64, im: f64) -> ExtendedComplex {
        ExtendedComplex::Finite(Complex64::new(re, im))
    }

    #[test]
    fn imaginary_axis_geometry() {
        let t = ThetaSpec::imaginary_axis();
        assert!(t.on_curve(fin(0.0, 3.0)));
        assert!(t.on_curve(ExtendedComplex::Infinity));
        assert!(!t.on_curve(fin(0.5, 0.0)));
        assert!(t.in_domain(fin(0.5, -2.0)));
        assert!(!t.in_domain(fin(-0.5, 1.0)));
        assert!(t.in_domain(ExtendedComplex::Infinity));
    }

    #[test]
    fn disk_geometry() {
        let t = ThetaSpec::disk(2.0).unwrap();
        assert!(t.on_curve(fin(0.0, 2.0)));
        assert!(t.on_curve(fin(2.0f64.sqrt(), 2.0f64.sqrt())));
        assert!(t.in_domain(fin(1.0, 1.0)));
        assert!(!t.in_domain(fin(2.0, 1.0)));
        assert!(!t.in_domain(ExtendedComplex::Infinity));
        assert!(!t.on_curve(ExtendedComplex::Infinity));
    }

    #[test]
    fn interval_geometry() {
        let t = ThetaSpec::interval(-1.0, 3.0).unwrap();
        for x in [-1.0, 0.0, 2.5, 3.0] {
            assert!(t.in_domain(ExtendedComplex::real(x)));
            assert!((t.form(c(x)) + (x + 1.0) * (x - 3.0)).abs() < 1e-12);
        }
        assert!(!t.in_domain(ExtendedComplex::real(3.1)));
        assert!(!t.in_domain(ExtendedComplex::real(-1.2)));
    }

    #[test]
    fn invalid_theta_rejected() {
        assert!(ThetaSpec::from_real(1.0, 0.0, 1.0).is_err());
        assert!(ThetaSpec::from_real(0.0, 0.0, 0.0).is_err());
        let nonherm = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(2.0), c(0.0)]);
        assert!(ThetaSpec::new(nonherm).is_err());
    }

    #[test]
    fn samples_lie_on_curve() {
        for t in [
            ThetaSpec::imaginary_axis(),
            ThetaSpec::real_axis(),
            ThetaSpec::disk(0.5).unwrap(),
            ThetaSpec::from_real(1.0, -2.0, -3.0).unwrap(),
            ThetaSpec::new(CMatrix::from_row_slice(
                2,
                2,
                &[c(2.0), Complex64::new(0.3, 1.0), Complex64::new(0.3, -1.0), c(-1.0)],
            ))
            .unwrap(),
        ] {
            for (num, den) in t.curve_samples(64) {
                // homogeneous form (num, den) Theta (num, den)^*
                let th = t.matrix();
                let v = th[(0, 0)] * num * num.conj()
                    + th[(0, 1)] * num * den.conj()
                    + th[(1, 0)] * den * num.conj()
                    + th[(1, 1)] * den * den.conj();
                assert!(v.norm() < 1e-12, "{v}");
            }
        }
    }
}
