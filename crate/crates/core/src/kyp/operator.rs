use super::{KypError, ThetaSpec};
use crate::linalg::{hermitian_part, CMatrix};

fn check(m: &CMatrix, n: &CMatrix) -> Result<(), KypError> {
    if m.shape() != n.shape() {
        return Err(KypError::DimMismatch(format!(
            "M is {:?} but N is {:?}",
            m.shape(),
            n.shape()
        )));
    }
    Ok(())
}

/// `Lambda(S) = (M, N)(Theta ⊗ S)(M, N)^* = sum_ab theta_ab X_a S X_b^*`
/// with `X_1 = M`, `X_2 = N`.
pub fn lyap_op(s: &CMatrix, m: &CMatrix, n: &CMatrix, theta: &ThetaSpec) -> Result<CMatrix, KypError> {
    check(m, n)?;
    let nz = m.ncols();
    if s.shape() != (nz, nz) {
        return Err(KypError::DimMismatch(format!("S must be {nz}x{nz}, got {:?}", s.shape())));
    }
    let x = [m, n];
    let t = theta.matrix();
    let mut out = CMatrix::zeros(m.nrows(), m.nrows());
    for a in 0..2 {
        let xs = x[a] * s;
        for b in 0..2 {
            if t[(a, b)].norm() != 0.0 {
                out += &xs * x[b].adjoint() * t[(a, b)];
            }
        }
    }
    Ok(hermitian_part(&out))
}

/// `Lambda'(H) = (M^*, N^*)(Theta^T ⊗ H)(M^*, N^*)^* = sum_ab theta_ba X_a^* H X_b`.
pub fn lyap_adjoint(h: &CMatrix, m: &CMatrix, n: &CMatrix, theta: &ThetaSpec) -> Result<CMatrix, KypError> {
    check(m, n)?;
    let rows = m.nrows();
    if h.shape() != (rows, rows) {
        return Err(KypError::DimMismatch(format!("H must be {rows}x{rows}, got {:?}", h.shape())));
    }
    let x = [m, n];
    let t = theta.matrix();
    let mut out = CMatrix::zeros(m.ncols(), m.ncols());
    for a in 0..2 {
        let xh = x[a].adjoint() * h;
        for b in 0..2 {
            if t[(b, a)].norm() != 0.0 {
                out += &xh * x[b] * t[(b, a)];
            }
        }
    }
    Ok(hermitian_part(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, frobenius};
    use num_complex::Complex64;

    fn sample(rows: usize, cols: usize, seed: f64) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| {
            let k = (i * cols + j) as f64 + seed;
            Complex64::new((k * 1.3).sin(), (k * 0.7).cos())
        })
    }

    #[test]
    fn zero_maps_to_zero() {
        let m = sample(2, 3, 0.0);
        let n = sample(2, 3, 1.0);
        let th = ThetaSpec::disk(1.5).unwrap();
        let out = lyap_adjoint(&CMatrix::zeros(2, 2), &m, &n, &th).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn adjoint_identity() {
        let m = sample(3, 4, 0.5);
        let n = sample(3, 4, 2.5);
        let th = ThetaSpec::from_real(1.0, 0.3, -2.0).unwrap();
        let s = hermitian_part(&sample(4, 4, 7.0));
        let h = hermitian_part(&sample(3, 3, 9.0));
        let lhs = frobenius(&lyap_op(&s, &m, &n, &th).unwrap(), &h);
        let rhs = frobenius(&s, &lyap_adjoint(&h, &m, &n, &th).unwrap());
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_special_case() {
        let a = CMatrix::from_row_slice(2, 2, &[c(-1.0), c(2.0), c(0.5), c(-3.0)]);
        let b = CMatrix::from_row_slice(2, 1, &[c(1.0), c(-2.0)]);
        let h = CMatrix::from_row_slice(2, 2, &[c(2.0), c(0.3), c(0.3), c(1.0)]);
        let mut m = CMatrix::zeros(2, 3);
        m.view_mut((0, 0), (2, 2)).copy_from(&a);
        m.view_mut((0, 2), (2, 1)).copy_from(&b);
        let mut n = CMatrix::zeros(2, 3);
        n[(0, 0)] = c(1.0);
        n[(1, 1)] = c(1.0);
        let out = lyap_adjoint(&h, &m, &n, &ThetaSpec::imaginary_axis()).unwrap();
        let top = &h * &a + a.adjoint() * &h;
        let hb = &h * &b;
        for i in 0..2 {
            for j in 0..2 {
                assert!((out[(i, j)] - top[(i, j)]).norm() < 1e-12);
            }
            assert!((out[(i, 2)] - hb[(i, 0)]).norm() < 1e-12);
        }
        assert!(out[(2, 2)].norm() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let m = sample(2, 3, 0.0);
        let n = sample(3, 3, 0.0);
        let th = ThetaSpec::imaginary_axis();
        assert!(lyap_adjoint(&CMatrix::zeros(2, 2), &m, &n, &th).is_err());
        assert!(lyap_op(&CMatrix::zeros(2, 2), &m, &m, &th).is_err());
    }
}
