use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial over a fixed variable list.
///
/// Ordering is graded lexicographic: total degree first, then the first
/// differing exponent (a larger exponent on an earlier variable is larger).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The monomial `1` in `nvars` variables.
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// `p_var^exp` in `nvars` variables.
    pub fn var_pow(nvars: usize, var: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = exp;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .map(|(&e, &x)| x.powi(e as i32))
            .product()
    }

    /// Splits off the exponent of the last variable.
    pub fn split_last(&self) -> (Monomial, u32) {
        let (last, rest) = self.0.split_last().expect("monomial has no variables");
        (Monomial(rest.to_vec()), *last)
    }

    /// Appends a new last variable with the given exponent.
    pub fn push_var(&self, exp: u32) -> Monomial {
        let mut e = self.0.clone();
        e.push(exp);
        Monomial(e)
    }

    /// Pads with trailing zero exponents up to `nvars` variables.
    pub fn extend_to(&self, nvars: usize) -> Monomial {
        let mut e = self.0.clone();
        e.resize(nvars, 0);
        Monomial(e)
    }

    /// All monomials of total degree `<= degree`, in ascending graded-lex order.
    pub fn up_to_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for total in 0..=degree {
            let mut cur = vec![0u32; nvars];
            compositions(&mut cur, 0, total, &mut out);
        }
        out.sort();
        out
    }
}

fn compositions(cur: &mut Vec<u32>, idx: usize, left: u32, out: &mut Vec<Monomial>) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if idx + 1 == cur.len() {
        cur[idx] = left;
        out.push(Monomial(cur.clone()));
        cur[idx] = 0;
        return;
    }
    for e in 0..=left {
        cur[idx] = e;
        compositions(cur, idx + 1, left - e, out);
    }
    cur[idx] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let a = Monomial::new(vec![2, 0]);
        let b = Monomial::new(vec![1, 1]);
        let c = Monomial::new(vec![0, 3]);
        assert!(a > b);
        assert!(c > a);
        assert!(Monomial::one(2) < b);
    }

    #[test]
    fn enumerate_counts() {
        // binomial(k + d, k)
        assert_eq!(Monomial::up_to_degree(2, 3).len(), 10);
        assert_eq!(Monomial::up_to_degree(3, 2).len(), 10);
        assert_eq!(Monomial::up_to_degree(0, 4).len(), 1);
        let m = Monomial::up_to_degree(2, 2);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }
}
