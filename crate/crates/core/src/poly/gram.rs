//! Gram lifting in the last variable.
//!
//! A Hermitian matrix polynomial `L(p, h)` of size `m` with degree at most
//! `2d` in the last variable `p_k` is written as
//! `L_ij = zeta(p_k) G_ij(p', h) zeta(p_k)^*` with `zeta = (p_k^d, ..., p_k, 1)`
//! and `p' = (p_1, ..., p_{k-1})`. The coefficient of `p_k^t` must be spread
//! over the anti-diagonal `r + s = 2d - t` of `G_ij`; the balanced convention
//! spreads it (almost) equally, with parts summing to the coefficient exactly.

use std::ops::Range;

use num_complex::Complex64;

use super::{prefix_vars, ComplexPoly, DecisionAffineMatrixPoly, Degree, MatrixPoly, Monomial, PolyError, Vars};

/// How the anti-diagonal freedom of the Gram matrix is handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GramMode {
    /// Deterministic balanced split only.
    #[default]
    Balanced,
    /// Balanced split plus fresh decision variables spanning the
    /// (parameter-independent) anti-diagonal kernel. For real input only the
    /// real kernel directions are added.
    Free,
}

/// Result of [`gram_lift`].
#[derive(Clone, Debug)]
pub struct GramLift {
    /// Half degree: `zeta` has `d + 1` entries.
    pub d: usize,
    /// Number of block rows (the size of the lifted input).
    pub m: usize,
    /// Assembled `m(d+1) x m(d+1)` matrix `(G_ij)` in the prefix variables.
    pub matrix: DecisionAffineMatrixPoly,
    /// Decision variables added by [`GramMode::Free`] (empty otherwise).
    pub free_vars: Range<usize>,
}

impl GramLift {
    /// Block `G_ij` of size `(d+1) x (d+1)`.
    pub fn block(&self, i: usize, j: usize) -> DecisionAffineMatrixPoly {
        let n = self.d + 1;
        self.matrix
            .map_linear(|m| Ok(m.block(i * n, j * n, n, n)))
            .expect("block extraction")
    }
}

/// `floor((deg + 1) / 2)`, with the zero polynomial mapped to 0.
pub fn gram_half_degree(deg: Degree) -> usize {
    match deg {
        Degree::NegInfinity => 0,
        Degree::Finite(t) => t.div_ceil(2) as usize,
    }
}

/// Lifts `l` in its last variable.
pub fn gram_lift(l: &DecisionAffineMatrixPoly, mode: GramMode) -> Result<GramLift, PolyError> {
    let k = l.vars().len();
    if k == 0 {
        return Err(PolyError::NoVariables);
    }
    if !l.is_hermitian() {
        return Err(PolyError::NotHermitian);
    }
    let d = gram_half_degree(l.degree_in_index(k - 1));
    let m = l.rows();
    let mut matrix = l.map_linear(|t| Ok(lift_matrix(t, d)))?;
    let mut free_vars = l.arity()..l.arity();
    if mode == GramMode::Free {
        let dirs = kernel_directions(matrix.vars(), m, d, l.is_real());
        let start = l.arity();
        matrix = matrix.with_arity(start + dirs.len());
        for (i, dir) in dirs.iter().enumerate() {
            matrix.add_term(start + i, dir)?;
        }
        free_vars = start..start + dirs.len();
    }
    Ok(GramLift {
        d,
        m,
        matrix,
        free_vars,
    })
}

/// Balanced lift of one Hermitian matrix polynomial with half degree `d`.
///
/// Panics if the degree in the last variable exceeds `2d`.
pub fn lift_matrix(l: &MatrixPoly, d: usize) -> MatrixPoly {
    let k = l.vars().len();
    let m = l.rows();
    let n = d + 1;
    let prefix = prefix_vars(l.vars(), k - 1);
    let mut g = MatrixPoly::zeros(prefix, m * n, m * n);
    for a in 0..m {
        for b in a..m {
            for (mono, &c) in l.entry(a, b).terms() {
                let (rest, t) = mono.split_last();
                let t = t as usize;
                assert!(t <= 2 * d, "degree {t} exceeds 2d = {}", 2 * d);
                let s = 2 * d - t;
                let lo = s.saturating_sub(d);
                let hi = s.min(d);
                let count = hi - lo + 1;
                if a == b {
                    let parts = split_palindromic(c.re, count);
                    for (idx, r) in (lo..=hi).enumerate() {
                        g.add_term(a * n + r, a * n + (s - r), rest.clone(), Complex64::new(parts[idx], 0.0));
                    }
                } else {
                    let re = split_linear(c.re, count);
                    let im = split_linear(c.im, count);
                    for (idx, r) in (lo..=hi).enumerate() {
                        let v = Complex64::new(re[idx], im[idx]);
                        g.add_term(a * n + r, b * n + (s - r), rest.clone(), v);
                        g.add_term(b * n + (s - r), a * n + r, rest.clone(), v.conj());
                    }
                }
            }
        }
    }
    g
}

/// Expands `zeta (G_ij) zeta^*` back into an `m x m` matrix polynomial over
/// `full` (the prefix variables of `g` followed by the lifted variable).
pub fn zeta_expand(g: &MatrixPoly, m: usize, d: usize, full: &Vars) -> Result<MatrixPoly, PolyError> {
    let n = d + 1;
    if g.dims() != (m * n, m * n) {
        return Err(PolyError::DimMismatch {
            expected: (m * n, m * n),
            found: g.dims(),
        });
    }
    let k = full.len();
    let mut out = MatrixPoly::zeros(full.clone(), m, m);
    for a in 0..m {
        for b in 0..m {
            let mut acc = ComplexPoly::zero(full.clone());
            for r in 0..n {
                for s in 0..n {
                    let cell = g.entry(a * n + r, b * n + s);
                    if cell.is_zero() {
                        continue;
                    }
                    let shift = Monomial::var_pow(k, k - 1, (2 * d - r - s) as u32);
                    acc = &acc + &cell.extend_vars(full)?.mul_monomial(&shift);
                }
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Parts of `c` for `count` cells: `count - 1` copies of `q` and a final
/// remainder, whose exact real sum is `c`.
///
/// `q` is `c / count` with its low mantissa bits cleared, which makes both
/// `(count - 1) * q` and `c - (count - 1) * q` exactly representable.
pub(crate) fn split_linear(c: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1);
    if count == 1 || c == 0.0 {
        let mut v = vec![0.0; count];
        v[count - 1] = c;
        return v;
    }
    let q = truncate_mantissa(c / count as f64, usize::BITS - (count - 1).leading_zeros() + 1);
    let last = c - (count - 1) as f64 * q;
    let mut v = vec![q; count];
    v[count - 1] = last;
    v
}

/// Symmetric variant: the part for cell `idx` equals the part for cell
/// `count - 1 - idx`. Remainders sit in the middle cell or middle pair.
pub(crate) fn split_palindromic(c: f64, count: usize) -> Vec<f64> {
    let pairs = count / 2;
    let mut v = vec![0.0; count];
    if count % 2 == 1 {
        let parts = split_linear(c, count);
        // parts[..count-1] are equal; the remainder goes to the center.
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = if i == pairs { parts[count - 1] } else { parts[0] };
        }
    } else {
        let units = split_linear(c, pairs);
        for u in 0..pairs {
            // outermost pair first; the remainder lands on the innermost pair
            let half = units[u] * 0.5;
            v[u] = half;
            v[count - 1 - u] = half;
        }
    }
    v
}

fn truncate_mantissa(x: f64, bits: u32) -> f64 {
    let bits = bits.min(52);
    let mask = !((1u64 << bits) - 1);
    f64::from_bits(x.to_bits() & mask)
}

/// Constant-coefficient kernel of the map `G -> zeta G zeta^*`, as Hermitian
/// basis directions of the assembled block matrix.
fn kernel_directions(prefix: &Vars, m: usize, d: usize, real: bool) -> Vec<MatrixPoly> {
    let n = d + 1;
    let one = Monomial::one(prefix.len());
    let unit = |entries: &[(usize, usize, Complex64)]| {
        let mut mp = MatrixPoly::zeros(prefix.clone(), m * n, m * n);
        for &(i, j, v) in entries {
            mp.add_term(i, j, one.clone(), v);
        }
        mp
    };
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    let mut dirs = Vec::new();
    for a in 0..m {
        for b in a..m {
            for s in 0..=2 * d {
                let lo = s.saturating_sub(d);
                let hi = s.min(d);
                if hi == lo {
                    continue;
                }
                if a == b {
                    // units: pairs (r, s - r) with r < s - r, then the center
                    let mut units: Vec<Vec<(usize, usize, Complex64)>> = Vec::new();
                    for r in lo..=hi {
                        let c = s - r;
                        if r < c {
                            units.push(vec![(a * n + r, a * n + c, re(1.0)), (a * n + c, a * n + r, re(1.0))]);
                            if !real {
                                dirs.push(unit(&[(a * n + r, a * n + c, im(1.0)), (a * n + c, a * n + r, im(-1.0))]));
                            }
                        } else if r == c {
                            units.push(vec![(a * n + r, a * n + r, re(2.0))]);
                        }
                    }
                    for w in units.windows(2) {
                        let mut e = w[0].clone();
                        e.extend(w[1].iter().map(|&(i, j, v)| (i, j, -v)));
                        dirs.push(unit(&e));
                    }
                } else {
                    for r in lo..hi {
                        let (c0, c1) = (s - r, s - r - 1);
                        let kinds: &[Complex64] = if real { &[Complex64::new(1.0, 0.0)] } else { &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] };
                        for &v in kinds {
                            dirs.push(unit(&[
                                (a * n + r, b * n + c0, v),
                                (b * n + c0, a * n + r, v.conj()),
                                (a * n + r + 1, b * n + c1, -v),
                                (b * n + c1, a * n + r + 1, -v.conj()),
                            ]));
                        }
                    }
                }
            }
        }
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{vars, ScalarPoly};
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn exact_sum(parts: &[f64]) -> BigRational {
        parts
            .iter()
            .map(|&x| BigRational::from_float(x).unwrap())
            .fold(BigRational::zero(), |a, b| a + b)
    }

    proptest! {
        #[test]
        fn linear_split_is_exact(c in -1e6f64..1e6, count in 1usize..12) {
            let parts = split_linear(c, count);
            prop_assert_eq!(parts.len(), count);
            prop_assert_eq!(exact_sum(&parts), BigRational::from_float(c).unwrap());
        }

        #[test]
        fn palindromic_split_is_exact(c in -1e6f64..1e6, count in 1usize..12) {
            let parts = split_palindromic(c, count);
            prop_assert_eq!(exact_sum(&parts), BigRational::from_float(c).unwrap());
            for i in 0..count {
                prop_assert_eq!(parts[i], parts[count - 1 - i]);
            }
        }
    }

    #[test]
    fn split_is_balanced() {
        let parts = split_linear(1.0, 3);
        for p in &parts {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(BigRational::from_float(1.0).unwrap(), exact_sum(&parts));
    }

    #[test]
    fn square_lifts_to_corner() {
        let v = vars(&["p"]);
        let p = ScalarPoly::var(v.clone(), "p").unwrap();
        let l = DecisionAffineMatrixPoly::from_constant(MatrixPoly::scalar(p.pow(2).to_complex()), 0);
        let lift = gram_lift(&l, GramMode::Balanced).unwrap();
        assert_eq!(lift.d, 1);
        let g = lift.matrix.constant().to_constant();
        assert_eq!(g[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(g[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(g[(1, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn constant_lifts_to_itself() {
        let v = vars(&["p"]);
        let l = DecisionAffineMatrixPoly::from_constant(
            MatrixPoly::scalar(ScalarPoly::one(v).to_complex()),
            0,
        );
        let lift = gram_lift(&l, GramMode::Balanced).unwrap();
        assert_eq!(lift.d, 0);
        assert_eq!(lift.matrix.constant().to_constant()[(0, 0)], Complex64::new(1.0, 0.0));
    }

    fn motzkin_minus_h() -> DecisionAffineMatrixPoly {
        let v = vars(&["x", "y"]);
        let x = ScalarPoly::var(v.clone(), "x").unwrap();
        let y = ScalarPoly::var(v.clone(), "y").unwrap();
        let g = &(&(&(&x.pow(4) * &y.pow(2)) + &(&x.pow(2) * &y.pow(4)))
            - &(&x.pow(2) * &y.pow(2)).scale(3.0))
            + &ScalarPoly::one(v.clone());
        DecisionAffineMatrixPoly::new(
            MatrixPoly::scalar(g.to_complex()),
            1,
            [(0, MatrixPoly::scalar(ScalarPoly::constant(v, -1.0).to_complex()))],
        )
        .unwrap()
    }

    #[test]
    fn decision_only_in_corner() {
        let lift = gram_lift(&motzkin_minus_h(), GramMode::Balanced).unwrap();
        assert_eq!(lift.d, 2);
        assert_eq!(lift.matrix.dims(), (3, 3));
        let h_term = lift.matrix.term(0).unwrap().to_constant();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if (i, j) == (2, 2) { -1.0 } else { 0.0 };
                assert_eq!(h_term[(i, j)], Complex64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn free_mode_reconstructs() {
        let l = motzkin_minus_h();
        let lift = gram_lift(&l, GramMode::Free).unwrap();
        assert!(!lift.free_vars.is_empty());
        let mut h = vec![0.0; lift.matrix.arity()];
        h[0] = 0.25;
        for (k, i) in lift.free_vars.clone().enumerate() {
            h[i] = 0.5 + k as f64;
        }
        let g = lift.matrix.eval_decision(&h).unwrap();
        assert!(g.is_hermitian());
        let back = zeta_expand(&g, 1, lift.d, l.vars()).unwrap();
        let orig = l.eval_decision(&[0.25]).unwrap();
        for pt in [[0.3, -1.2], [1.5, 0.7], [-2.0, 2.0]] {
            let diff = (back.eval(&pt) - orig.eval(&pt)).norm();
            assert!(diff < 1e-9, "diff {diff}");
        }
    }
}
