use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use super::SdpError;
use crate::linalg::{real_embedding, RMatrix};

/// Where a decision variable came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarLabel {
    /// Coordinate `i` of the user's decision vector.
    Original(usize),
    /// Coefficient of monomial `monomial` in the polynomial replacing
    /// original variable `original`.
    Coefficient { original: usize, monomial: usize },
    /// Multiplier coordinate introduced by a reduction step. `node` indexes
    /// the inequality being reduced at that step, `which` is 1 or 2.
    Multiplier { step: usize, node: usize, which: u8 },
    /// Gram-kernel coordinate (free Gram mode).
    Gram { step: usize, node: usize },
    /// Anything else, e.g. a Lyapunov matrix entry.
    Named(String),
}

/// One block `F_0 + sum_i y_i F_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LmiBlock<T: ComplexField<RealField = f64>> {
    pub constant: DMatrix<T>,
    /// Sorted by variable index, no zero matrices.
    pub terms: Vec<(usize, DMatrix<T>)>,
}

/// Parameter-free block-diagonal affine map `y -> diag_j(F_0j + sum_i y_i F_ij)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineLmi<T: ComplexField<RealField = f64>> {
    arity: usize,
    labels: Vec<VarLabel>,
    blocks: Vec<LmiBlock<T>>,
}

fn herm<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> DMatrix<T> {
    let half = T::from_real(0.5);
    (m + m.adjoint()) * half
}

impl<T: ComplexField<RealField = f64> + Copy> AffineLmi<T> {
    /// Empty map; variables are labeled `Original(i)`.
    pub fn new(arity: usize) -> Self {
        AffineLmi {
            arity,
            labels: (0..arity).map(VarLabel::Original).collect(),
            blocks: Vec::new(),
        }
    }

    pub fn with_labels(labels: Vec<VarLabel>) -> Self {
        AffineLmi {
            arity: labels.len(),
            labels,
            blocks: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn blocks(&self) -> &[LmiBlock<T>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.constant.nrows()).collect()
    }

    /// Appends one variable and returns its index.
    pub fn add_var(&mut self, label: VarLabel) -> usize {
        self.labels.push(label);
        self.arity += 1;
        self.arity - 1
    }

    pub fn set_label(&mut self, i: usize, label: VarLabel) {
        self.labels[i] = label;
    }

    /// Adds a block; all matrices are replaced by their Hermitian parts.
    pub fn push_block(
        &mut self,
        constant: DMatrix<T>,
        terms: impl IntoIterator<Item = (usize, DMatrix<T>)>,
    ) -> Result<(), SdpError> {
        let n = constant.nrows();
        if constant.ncols() != n {
            return Err(SdpError::Shape(format!("block constant is {:?}", constant.shape())));
        }
        let mut collected: Vec<(usize, DMatrix<T>)> = Vec::new();
        for (i, f) in terms {
            if i >= self.arity {
                return Err(SdpError::VarIndex { index: i, arity: self.arity });
            }
            if f.shape() != (n, n) {
                return Err(SdpError::Shape(format!("term {i} is {:?}, block is {n}x{n}", f.shape())));
            }
            match collected.iter_mut().find(|(j, _)| *j == i) {
                Some((_, acc)) => *acc += f,
                None => collected.push((i, f)),
            }
        }
        collected.retain(|(_, f)| f.iter().any(|v| !v.is_zero()));
        collected.sort_by_key(|(i, _)| *i);
        self.blocks.push(LmiBlock {
            constant: herm(&constant),
            terms: collected.into_iter().map(|(i, f)| (i, herm(&f))).collect(),
        });
        Ok(())
    }

    /// Appends the blocks of `other`, which must share this decision vector
    /// (its variables are a prefix of, or equal to, ours after growth).
    pub fn stack(&mut self, other: &AffineLmi<T>) -> Result<(), SdpError> {
        if other.arity > self.arity {
            for l in &other.labels[self.arity..] {
                self.labels.push(l.clone());
            }
            self.arity = other.arity;
        }
        for (i, l) in other.labels.iter().enumerate() {
            if &self.labels[i] != l {
                return Err(SdpError::LabelConflict(i));
            }
        }
        self.blocks.extend(other.blocks.iter().cloned());
        Ok(())
    }

    pub fn eval_block(&self, b: usize, y: &[f64]) -> DMatrix<T> {
        let blk = &self.blocks[b];
        let mut out = blk.constant.clone();
        for (i, f) in &blk.terms {
            if y[*i] != 0.0 {
                out += f * T::from_real(y[*i]);
            }
        }
        out
    }

    /// Minimum eigenvalue of each block at `y`.
    pub fn block_margins(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.arity, "decision vector length");
        (0..self.blocks.len())
            .map(|b| {
                let m = self.eval_block(b, y);
                if m.nrows() == 0 {
                    return f64::INFINITY;
                }
                herm(&m)
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Smallest eigenvalue over all blocks (`+inf` without blocks).
    pub fn margin(&self, y: &[f64]) -> f64 {
        self.block_margins(y).into_iter().fold(f64::INFINITY, f64::min)
    }
}

impl AffineLmi<Complex64> {
    /// `[[Re X, -Im X], [Im X, Re X]]` for every matrix of every block.
    pub fn embed_real(&self) -> AffineLmi<f64> {
        self.to_real_with(|_| true)
    }

    /// Like [`embed_real`](Self::embed_real) but blocks whose data are all
    /// real are kept at their own size instead of being doubled.
    pub fn embed_real_compact(&self) -> AffineLmi<f64> {
        self.to_real_with(|b| {
            std::iter::once(&b.constant)
                .chain(b.terms.iter().map(|(_, f)| f))
                .any(|m| m.iter().any(|v| v.im != 0.0))
        })
    }

    fn to_real_with(&self, double: impl Fn(&LmiBlock<Complex64>) -> bool) -> AffineLmi<f64> {
        let mut out = AffineLmi::<f64>::with_labels(self.labels.clone());
        for b in &self.blocks {
            let conv = |m: &DMatrix<Complex64>| -> RMatrix {
                if double(b) {
                    real_embedding(m)
                } else {
                    m.map(|v| v.re)
                }
            };
            out.push_block(conv(&b.constant), b.terms.iter().map(|(i, f)| (*i, conv(f))))
                .expect("embedding preserves shapes");
        }
        out
    }
}

impl AffineLmi<f64> {
    pub fn to_complex(&self) -> AffineLmi<Complex64> {
        let mut out = AffineLmi::<Complex64>::with_labels(self.labels.clone());
        let conv = |m: &RMatrix| m.map(|v| Complex64::new(v, 0.0));
        for b in &self.blocks {
            out.push_block(conv(&b.constant), b.terms.iter().map(|(i, f)| (*i, conv(f))))
                .expect("same shapes");
        }
        out
    }
}
