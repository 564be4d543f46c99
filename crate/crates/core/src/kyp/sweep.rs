use num_complex::Complex64;

use super::{lyap_adjoint, ExtendedComplex, KypError, ThetaSpec};
use crate::linalg::{c, hermitian_min_eigenvalue, null_space, CMatrix};
use crate::poly::{vars, Field, HermitianParam};
use crate::sdp::{AffineLmi, VarLabel};

/// Pencil `lambda N - M` (both `n x n_z`) with an `m x m` array of Hermitian
/// `n_z x n_z` blocks `G_ij = G_ji^*`.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilSystem {
    m_mat: CMatrix,
    n_mat: CMatrix,
    g: Vec<Vec<CMatrix>>,
}

impl PencilSystem {
    pub fn new(m_mat: CMatrix, n_mat: CMatrix, g: Vec<Vec<CMatrix>>) -> Result<Self, KypError> {
        if m_mat.shape() != n_mat.shape() {
            return Err(KypError::DimMismatch(format!(
                "M is {:?}, N is {:?}",
                m_mat.shape(),
                n_mat.shape()
            )));
        }
        let nz = m_mat.ncols();
        let mb = g.len();
        if mb == 0 {
            return Err(KypError::DimMismatch("G has no blocks".into()));
        }
        for (i, row) in g.iter().enumerate() {
            if row.len() != mb {
                return Err(KypError::DimMismatch(format!("G row {i} has {} blocks, expected {mb}", row.len())));
            }
            for blk in row {
                if blk.shape() != (nz, nz) {
                    return Err(KypError::DimMismatch(format!(
                        "G block is {:?}, expected {nz}x{nz}",
                        blk.shape()
                    )));
                }
            }
        }
        for i in 0..mb {
            for j in i..mb {
                if g[i][j] != g[j][i].adjoint() {
                    return Err(KypError::NotHermitian(i, j));
                }
            }
        }
        Ok(PencilSystem { m_mat, n_mat, g })
    }

    /// Single-block system (`m = 1`).
    pub fn single(m_mat: CMatrix, n_mat: CMatrix, g: CMatrix) -> Result<Self, KypError> {
        Self::new(m_mat, n_mat, vec![vec![g]])
    }

    pub fn m(&self) -> &CMatrix {
        &self.m_mat
    }

    pub fn n(&self) -> &CMatrix {
        &self.n_mat
    }

    /// Number of block rows `m`.
    pub fn blocks(&self) -> usize {
        self.g.len()
    }

    /// Row count `n` of the pencil.
    pub fn rows(&self) -> usize {
        self.m_mat.nrows()
    }

    /// Column count `n_z` of the pencil.
    pub fn nz(&self) -> usize {
        self.m_mat.ncols()
    }

    pub fn g_block(&self, i: usize, j: usize) -> &CMatrix {
        &self.g[i][j]
    }

    /// Assembled `m n_z x m n_z` matrix `(G_ij)`.
    pub fn block_g(&self) -> CMatrix {
        let nz = self.nz();
        let mb = self.blocks();
        let mut out = CMatrix::zeros(mb * nz, mb * nz);
        for i in 0..mb {
            for j in 0..mb {
                out.view_mut((i * nz, j * nz), (nz, nz)).copy_from(&self.g[i][j]);
            }
        }
        out
    }

    fn kron_pencil(&self) -> (CMatrix, CMatrix) {
        let eye = CMatrix::identity(self.blocks(), self.blocks());
        (eye.kronecker(&self.m_mat), eye.kronecker(&self.n_mat))
    }
}

/// `Lambda'_{I⊗M, I⊗N, Theta1}(H1) + Lambda'_{I⊗M, I⊗N, Theta2}(H2)`; the
/// second term is dropped when `theta2` is `None`.
pub fn kyp_rhs(
    sys: &PencilSystem,
    h1: &CMatrix,
    h2: Option<&CMatrix>,
    theta1: &ThetaSpec,
    theta2: Option<&ThetaSpec>,
) -> Result<CMatrix, KypError> {
    let (km, kn) = sys.kron_pencil();
    let mut out = lyap_adjoint(h1, &km, &kn, theta1)?;
    match (h2, theta2) {
        (Some(h2), Some(t2)) => out += lyap_adjoint(h2, &km, &kn, t2)?,
        (None, None) => {}
        _ => return Err(KypError::DimMismatch("H2 and theta2 must be given together".into())),
    }
    Ok(out)
}

/// The LMI `G - Lambda'_1(H1) - Lambda'_2(H2) ≻ 0`, `H2 ≻ 0` over complex
/// Hermitian `H1`, `H2` of size `m n` (the second block and `H2` only when
/// `theta2` is given). Variables are the real coordinates of `H1` then `H2`.
pub fn kyp_lmi(
    sys: &PencilSystem,
    theta1: &ThetaSpec,
    theta2: Option<&ThetaSpec>,
) -> Result<AffineLmi<Complex64>, KypError> {
    let size = sys.blocks() * sys.rows();
    let none: [&str; 0] = [];
    let p1 = HermitianParam::new(vars(&none), size, 0, Field::Complex, 0);
    let p2 = theta2.map(|_| HermitianParam::new(vars(&none), size, 0, Field::Complex, p1.len()));
    let mut labels: Vec<VarLabel> = (0..p1.len())
        .map(|_| VarLabel::Multiplier { step: 0, node: 0, which: 1 })
        .collect();
    if let Some(p2) = &p2 {
        labels.extend((0..p2.len()).map(|_| VarLabel::Multiplier { step: 0, node: 0, which: 2 }));
    }
    let mut lmi = AffineLmi::with_labels(labels);
    let (km, kn) = sys.kron_pencil();
    let mut terms = Vec::new();
    for (idx, _, basis) in p1.elements() {
        terms.push((idx, -lyap_adjoint(&basis, &km, &kn, theta1)?));
    }
    let mut h2_terms = Vec::new();
    if let (Some(p2), Some(t2)) = (&p2, theta2) {
        for (idx, _, basis) in p2.elements() {
            terms.push((idx, -lyap_adjoint(&basis, &km, &kn, t2)?));
            h2_terms.push((idx, basis));
        }
    }
    let push = |lmi: &mut AffineLmi<Complex64>, c0: CMatrix, t: Vec<(usize, CMatrix)>| {
        lmi.push_block(c0, t).map_err(|e| KypError::DimMismatch(e.to_string()))
    };
    push(&mut lmi, sys.block_g(), terms)?;
    if p2.is_some() {
        push(&mut lmi, CMatrix::zeros(size, size), h2_terms)?;
    }
    Ok(lmi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    /// Worst minimum eigenvalue of `[z^* G_ij z]` over the sampled points.
    pub margin: f64,
    /// Where the worst value was attained.
    pub worst: ExtendedComplex,
    /// Sampled points of the curve that lie in the domain of `theta2`.
    pub points: usize,
}

fn to_extended(num: Complex64, den: Complex64) -> ExtendedComplex {
    if den.norm() <= 1e-14 * num.norm() {
        ExtendedComplex::Infinity
    } else {
        ExtendedComplex::Finite(num / den)
    }
}

/// Samples the frequency-domain inequality over the part of the curve of
/// `theta1` inside the domain of `theta2`.
pub fn fdi_sweep(
    sys: &PencilSystem,
    theta1: &ThetaSpec,
    theta2: Option<&ThetaSpec>,
    samples: usize,
) -> Result<SweepReport, KypError> {
    let mb = sys.blocks();
    if mb > 1 && sys.nz() != sys.rows() + 1 {
        return Err(KypError::DimMismatch(format!(
            "block sweep needs n_z = n + 1, got n = {}, n_z = {}",
            sys.rows(),
            sys.nz()
        )));
    }
    let mut points: Vec<(Complex64, Complex64)> = theta1.curve_samples(samples);
    if theta1.on_curve(ExtendedComplex::Infinity) {
        points.push((c(1.0), c(0.0)));
    }
    let mut report = SweepReport {
        margin: f64::INFINITY,
        worst: ExtendedComplex::Infinity,
        points: 0,
    };
    for (num, den) in points {
        let lambda = to_extended(num, den);
        if let Some(t2) = theta2 {
            if !t2.in_domain(lambda) {
                continue;
            }
        }
        report.points += 1;
        // (lambda N - M) up to the factor den
        let pencil = sys.n() * num - sys.m() * den;
        let smax = pencil.norm();
        let (basis, sv) = null_space(&pencil, 1e-8 * (1.0 + smax));
        let value = if mb == 1 {
            if basis.ncols() == 0 {
                continue;
            }
            let form = basis.adjoint() * sys.g_block(0, 0) * &basis;
            hermitian_min_eigenvalue(&form)
        } else {
            if sv.len() > 1 && sv[1] < 1e-8 {
                return Err(KypError::RankViolation(lambda));
            }
            let z = basis.column(0).into_owned();
            let form = CMatrix::from_fn(mb, mb, |i, j| (z.adjoint() * sys.g_block(i, j) * &z)[(0, 0)]);
            hermitian_min_eigenvalue(&form)
        };
        if value < report.margin {
            report.margin = value;
            report.worst = lambda;
        }
    }
    if report.points == 0 {
        return Err(KypError::EmptyIntersection);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift_pencil(d: usize) -> (CMatrix, CMatrix) {
        let mut m = CMatrix::zeros(d, d + 1);
        let mut n = CMatrix::zeros(d, d + 1);
        for i in 0..d {
            m[(i, i)] = c(1.0);
            n[(i, i + 1)] = c(1.0);
        }
        (m, n)
    }

    #[test]
    fn zero_multipliers_give_zero_rhs() {
        let (m, n) = shift_pencil(2);
        let sys = PencilSystem::single(m, n, CMatrix::identity(3, 3)).unwrap();
        let z = CMatrix::zeros(2, 2);
        let t1 = ThetaSpec::real_axis();
        let t2 = ThetaSpec::interval(-1.0, 1.0).unwrap();
        let rhs = kyp_rhs(&sys, &z, Some(&z), &t1, Some(&t2)).unwrap();
        assert_eq!(rhs.norm(), 0.0);
    }

    #[test]
    fn positive_g_sweeps_positive() {
        let (m, n) = shift_pencil(2);
        let g = CMatrix::from_row_slice(3, 3, &[c(2.0), c(0.5), c(0.0), c(0.5), c(2.0), c(0.0), c(0.0), c(0.0), c(1.0)]);
        let sys = PencilSystem::single(m, n, g).unwrap();
        let r = fdi_sweep(&sys, &ThetaSpec::imaginary_axis(), None, 500).unwrap();
        assert!(r.margin > 0.0);
    }

    #[test]
    fn indefinite_g_fails_where_expected() {
        // z = (l, 1) on the real segment [-1, 1]; z* diag(1, -1/4) z < 0 iff |l| < 1/2
        let (m, n) = shift_pencil(1);
        let g = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-0.25)]);
        let sys = PencilSystem::single(m, n, g).unwrap();
        let t2 = ThetaSpec::interval(-1.0, 1.0).unwrap();
        let r = fdi_sweep(&sys, &ThetaSpec::real_axis(), Some(&t2), 2001).unwrap();
        assert!(r.margin < 0.0);
        match r.worst {
            ExtendedComplex::Finite(l) => assert!(l.norm() < 0.01, "{l}"),
            ExtendedComplex::Infinity => panic!("worst at infinity"),
        }
        // scalar oracle: min over |l| <= 1 of (l^2 - 1/4) / (1 + l^2) is -1/4 at l = 0
        assert!((r.margin + 0.25).abs() < 1e-4);
    }

    #[test]
    fn empty_intersection() {
        let (m, n) = shift_pencil(1);
        let sys = PencilSystem::single(m, n, CMatrix::identity(2, 2)).unwrap();
        // real axis vs the disk |l - 10i| <= 1
        let t2 = ThetaSpec::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(-1.0), Complex64::new(0.0, -10.0), Complex64::new(0.0, 10.0), c(-99.0)],
        ))
        .unwrap();
        assert!(matches!(
            fdi_sweep(&sys, &ThetaSpec::real_axis(), Some(&t2), 100),
            Err(KypError::EmptyIntersection)
        ));
    }

    #[test]
    fn block_rhs_matches_kronecker_expansion() {
        let (m, n) = shift_pencil(1);
        let g = CMatrix::identity(2, 2);
        let sys = PencilSystem::new(m.clone(), n.clone(), vec![vec![g.clone(), g.clone() * c(0.0)], vec![g.clone() * c(0.0), g]]).unwrap();
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0), Complex64::new(0.2, 0.3), Complex64::new(0.2, -0.3), c(-0.5)]);
        let t1 = ThetaSpec::real_axis();
        let rhs = kyp_rhs(&sys, &h, None, &t1, None).unwrap();
        // oracle: sum_ab theta_ba (I⊗X_a)^* H (I⊗X_b)
        let eye = CMatrix::identity(2, 2);
        let x = [eye.kronecker(&m), eye.kronecker(&n)];
        let t = t1.matrix();
        let mut oracle = CMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                oracle += x[a].adjoint() * &h * &x[b] * t[(b, a)];
            }
        }
        assert!((rhs - oracle).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_blocks() {
        let (m, n) = shift_pencil(1);
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(0.0), c(1.0)]);
        let b = CMatrix::identity(2, 2);
        assert!(PencilSystem::new(m, n, vec![vec![b.clone(), a.clone()], vec![a, b]]).is_err());
    }
}
