use super::ext::{CExt, Ext};
use crate::formats::{DenseView, SparseOperand};
use crate::scalar::{Scalar, SpIndex};

/// Dense extended-precision copy of a matrix or of an expected result.
///
/// Besides the values and the pattern, every entry carries what the error
/// bound needs: the sum of the magnitudes of the terms that produced it and
/// the number of rounding stages `m` (see [`ErrorBoundSpec`](super::ErrorBoundSpec)).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMirror {
    pub nrows: usize,
    pub ncols: usize,
    /// Row-major values; zero wherever `pattern` is false.
    pub data: Vec<CExt>,
    pub pattern: Vec<bool>,
    pub magnitude: Vec<f64>,
    pub terms: Vec<usize>,
}

impl DenseMirror {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let n = nrows * ncols;
        DenseMirror {
            nrows,
            ncols,
            data: vec![CExt::ZERO; n],
            pattern: vec![false; n],
            magnitude: vec![0.0; n],
            terms: vec![0; n],
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ncols + j
    }

    pub fn at(&self, i: usize, j: usize) -> CExt {
        self.data[self.index(i, j)]
    }

    pub fn is_stored(&self, i: usize, j: usize) -> bool {
        self.pattern[self.index(i, j)]
    }

    pub fn nnz(&self) -> usize {
        self.pattern.iter().filter(|&&p| p).count()
    }

    /// Stores `v` at `(i, j)` with its bound bookkeeping.
    pub fn set(&mut self, i: usize, j: usize, v: CExt, magnitude: f64, terms: usize) {
        let k = self.index(i, j);
        self.data[k] = v;
        self.pattern[k] = true;
        self.magnitude[k] = magnitude;
        self.terms[k] = terms;
    }

    /// `op(A)` without its scalar factor, read from the view's triples.
    pub fn unscaled<T, I, O>(a: impl SparseOperand<T, I, O>) -> Self
    where
        T: Scalar,
        I: SpIndex,
        O: SpIndex,
    {
        let op = a.operand();
        let (t, c) = (op.is_transposed(), op.is_conjugated());
        let mut m = DenseMirror::zeros(op.nrows(), op.ncols());
        for (i, j, v) in op.view().triples() {
            let (i, j) = if t { (j, i) } else { (i, j) };
            let v = if c { CExt::of(v).conj() } else { CExt::of(v) };
            m.set(i, j, v, v.abs().to_f64(), 0);
        }
        m
    }

    /// `alpha * op(A)` in extended precision. A zero `alpha` gives stored
    /// zeros whatever the values hold; other factors count as one rounding.
    pub fn from_sparse<T, I, O>(a: impl SparseOperand<T, I, O>) -> Self
    where
        T: Scalar,
        I: SpIndex,
        O: SpIndex,
    {
        let alpha = a.operand().alpha();
        let mut m = Self::unscaled(a);
        let scaled = alpha != T::one();
        for k in 0..m.data.len() {
            if !m.pattern[k] {
                continue;
            }
            let v = if alpha.is_zero() {
                CExt::ZERO
            } else {
                CExt::of(alpha) * m.data[k]
            };
            m.data[k] = v;
            m.magnitude[k] = v.abs().to_f64();
            m.terms[k] = scaled as usize;
        }
        m
    }

    /// Dense input; every position is stored.
    pub fn from_dense<T: Scalar>(d: &DenseView<'_, T>) -> Self {
        let mut m = DenseMirror::zeros(d.nrows(), d.ncols());
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                let v = CExt::of(d.get(i, j));
                m.set(i, j, v, v.abs().to_f64(), 0);
            }
        }
        m
    }

    /// Stored positions of row `i` in ascending column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, CExt)> + '_ {
        (0..self.ncols).filter(move |&j| self.is_stored(i, j)).map(move |j| (j, self.at(i, j)))
    }
}

/// Sum of magnitudes in binary64, for bound bookkeeping.
pub(crate) fn magnitude_sum(terms: impl IntoIterator<Item = CExt>) -> f64 {
    terms.into_iter().fold(Ext::ZERO, |acc, t| acc + t.abs()).to_f64()
}
