//! Small dense helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(A + A^*) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5)
}

pub fn symmetric_part(a: &RMatrix) -> RMatrix {
    (a + a.transpose()) * 0.5
}

/// Ascending eigenvalues of a Hermitian matrix (upper and lower triangles
/// are averaged first).
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn symmetric_eigenvalues(a: &RMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = symmetric_part(a).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue; `+inf` for an empty matrix.
pub fn hermitian_min_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(f64::INFINITY)
}

pub fn symmetric_min_eigenvalue(a: &RMatrix) -> f64 {
    symmetric_eigenvalues(a).first().copied().unwrap_or(f64::INFINITY)
}

/// Real symmetric embedding `[[Re X, -Im X], [Im X, Re X]]`.
pub fn real_embedding(x: &CMatrix) -> RMatrix {
    let n = x.nrows();
    let m = x.ncols();
    let mut out = RMatrix::zeros(2 * n, 2 * m);
    for i in 0..n {
        for j in 0..m {
            let v = x[(i, j)];
            out[(i, j)] = v.re;
            out[(i + n, j + m)] = v.re;
            out[(i, j + m)] = -v.im;
            out[(i + n, j)] = v.im;
        }
    }
    out
}

/// Real Frobenius inner product `Re tr(A^* B)`.
pub fn frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Orthonormal basis (as columns) of the numerical null space of `a`, using
/// the singular value decomposition of `a` padded with zero rows to a square
/// matrix. Returns the basis and the singular values in ascending order.
pub fn null_space(a: &CMatrix, tol: f64) -> (CMatrix, Vec<f64>) {
    let (rows, cols) = a.shape();
    let mut padded = CMatrix::zeros(cols.max(rows), cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    let mut basis = CMatrix::zeros(cols, kept.len());
    for (k, &i) in kept.iter().enumerate() {
        for j in 0..cols {
            basis[(j, k)] = v_t[(i, j)].conj();
        }
    }
    (basis, sv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_doubles_spectrum() {
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[c(2.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), c(2.0)],
        );
        let ev = symmetric_eigenvalues(&real_embedding(&x));
        let expected = [1.0, 1.0, 3.0, 3.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_shift_pencil() {
        // (lambda N - M) z = 0 for M = (I_2, 0), N = (0, I_2): z ~ (l^2, l, 1)
        let l = 0.7;
        let a = CMatrix::from_row_slice(
            2,
            3,
            &[c(-1.0), c(l), c(0.0), c(0.0), c(-1.0), c(l)],
        );
        let (basis, sv) = null_space(&a, 1e-10);
        assert_eq!(basis.ncols(), 1);
        assert!(sv[0] < 1e-12);
        let z = basis.column(0);
        let ratio0 = z[0] / z[2];
        let ratio1 = z[1] / z[2];
        assert!((ratio0 - c(l * l)).norm() < 1e-12);
        assert!((ratio1 - c(l)).norm() < 1e-12);
    }
}
