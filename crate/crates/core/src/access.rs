//! Normalized compressed access to `op(A)`.
//!
//! Kernels work on a [`Compressed`] view of the operand in the orientation
//! they need. Native orientations are borrowed; the other orientation is
//! materialized with a stable counting sort, so entries stay ordered by
//! (major, minor) and the summation order of every output element is the
//! same whichever orientation the input came in.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::ops::Range;

use crate::error::Result;
use crate::formats::{validate, Operand, Values, ViewRef};
use crate::scalar::{Scalar, SpIndex};

enum Offsets<'a, O> {
    Borrowed(&'a [O], usize),
    Owned(Vec<usize>),
}

enum Indices<'a, I> {
    Borrowed(&'a [I], usize),
    Owned(Vec<usize>),
}

enum Vals<'a, T> {
    Borrowed(&'a Values<'a, T>),
    Owned(Vec<T>),
}

pub(crate) struct Compressed<'a, T, I, O> {
    pub nmajor: usize,
    pub nminor: usize,
    offsets: Offsets<'a, O>,
    indices: Indices<'a, I>,
    values: Vals<'a, T>,
    conj: bool,
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Compressed<'a, T, I, O> {
    #[inline]
    pub fn range(&self, m: usize) -> Range<usize> {
        match &self.offsets {
            Offsets::Borrowed(s, b) => (s[m].index() - b)..(s[m + 1].index() - b),
            Offsets::Owned(v) => v[m]..v[m + 1],
        }
    }

    #[inline]
    pub fn minor(&self, k: usize) -> usize {
        match &self.indices {
            Indices::Borrowed(s, b) => s[k].index() - b,
            Indices::Owned(v) => v[k],
        }
    }

    #[inline]
    pub fn value(&self, k: usize) -> T {
        let v = match &self.values {
            Vals::Borrowed(vals) => vals.get(k),
            Vals::Owned(v) => v[k],
        };
        if self.conj {
            v.conj()
        } else {
            v
        }
    }

    /// Entries in major slices `0..m` (`m <= nmajor`).
    #[inline]
    pub fn start(&self, m: usize) -> usize {
        if m == 0 {
            0
        } else {
            self.range(m - 1).end - self.range(0).start
        }
    }

    pub fn nnz(&self) -> usize {
        if self.nmajor == 0 {
            0
        } else {
            self.range(self.nmajor - 1).end - self.range(0).start
        }
    }

    /// Length of major slice `m`.
    #[inline]
    pub fn len_of(&self, m: usize) -> usize {
        self.range(m).len()
    }

    /// Materializes the other orientation.
    pub fn transpose(&self) -> Compressed<'a, T, I, O> {
        let nnz = self.nnz();
        let mut offsets = vec![0usize; self.nminor + 1];
        for m in 0..self.nmajor {
            for k in self.range(m) {
                offsets[self.minor(k) + 1] += 1;
            }
        }
        for j in 0..self.nminor {
            offsets[j + 1] += offsets[j];
        }
        let mut next = offsets.clone();
        let mut indices = vec![0usize; nnz];
        let mut values = vec![T::zero(); nnz];
        for m in 0..self.nmajor {
            for k in self.range(m) {
                let j = self.minor(k);
                let pos = next[j];
                next[j] += 1;
                indices[pos] = m;
                values[pos] = match &self.values {
                    Vals::Borrowed(vals) => vals.get(k),
                    Vals::Owned(v) => v[k],
                };
            }
        }
        Compressed {
            nmajor: self.nminor,
            nminor: self.nmajor,
            offsets: Offsets::Owned(offsets),
            indices: Indices::Owned(indices),
            values: Vals::Owned(values),
            conj: self.conj,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Orientation {
    Row,
    Col,
}

/// Validates the operand unless it comes from a handle (validated once).
pub(crate) fn ensure_valid<T: Scalar, I: SpIndex, O: SpIndex>(
    op: &Operand<'_, T, I, O>,
) -> Result<()> {
    if op.handle.is_some() {
        return Ok(());
    }
    validate(op.view).into_result()
}

/// Stored structure in its native orientation, before `op` is applied.
fn native<'a, T: Scalar, I: SpIndex, O: SpIndex>(
    view: ViewRef<'a, T, I, O>,
    row_counts: Option<&[usize]>,
) -> (Compressed<'a, T, I, O>, Orientation) {
    match view {
        ViewRef::Csr(v) => (
            Compressed {
                nmajor: v.nrows(),
                nminor: v.ncols(),
                offsets: Offsets::Borrowed(v.row_offsets(), v.base().offset()),
                indices: Indices::Borrowed(v.col_indices(), v.base().offset()),
                values: Vals::Borrowed(v.values()),
                conj: false,
            },
            Orientation::Row,
        ),
        ViewRef::Csc(v) => (
            Compressed {
                nmajor: v.ncols(),
                nminor: v.nrows(),
                offsets: Offsets::Borrowed(v.col_offsets(), v.base().offset()),
                indices: Indices::Borrowed(v.row_indices(), v.base().offset()),
                values: Vals::Borrowed(v.values()),
                conj: false,
            },
            Orientation::Col,
        ),
        ViewRef::Coo(v) => {
            let b = v.base().offset();
            let mut offsets = vec![0usize; v.nrows() + 1];
            match row_counts {
                Some(counts) => {
                    for (i, c) in counts.iter().enumerate() {
                        offsets[i + 1] = offsets[i] + c;
                    }
                }
                None => {
                    for r in &v.row_indices()[..v.nnz()] {
                        offsets[r.index() - b + 1] += 1;
                    }
                    for i in 0..v.nrows() {
                        offsets[i + 1] += offsets[i];
                    }
                }
            }
            (
                Compressed {
                    nmajor: v.nrows(),
                    nminor: v.ncols(),
                    offsets: Offsets::Owned(offsets),
                    indices: Indices::Borrowed(v.col_indices(), b),
                    values: Vals::Borrowed(v.values()),
                    conj: false,
                },
                Orientation::Row,
            )
        }
    }
}

fn oriented<'a, T: Scalar, I: SpIndex, O: SpIndex>(
    op: &Operand<'a, T, I, O>,
    want: Orientation,
) -> Compressed<'a, T, I, O> {
    let guard = op.handle.map(|h| h.lock());
    let counts = guard
        .as_ref()
        .and_then(|d| d.row_counts.as_ref())
        .map(|c| &c[..]);
    let (mut c, mut have) = native(op.view, counts);
    drop(guard);
    if op.transpose {
        have = match have {
            Orientation::Row => Orientation::Col,
            Orientation::Col => Orientation::Row,
        };
    }
    c.conj = op.conjugate;
    if have == want {
        c
    } else {
        c.transpose()
    }
}

/// The stored structure in its native orientation, with value positions
/// equal to positions in the view's values array. The flag is true for
/// row-major storage (CSR, COO).
pub(crate) fn stored<'a, T: Scalar, I: SpIndex, O: SpIndex>(
    view: ViewRef<'a, T, I, O>,
) -> (Compressed<'a, T, I, O>, bool) {
    let (c, o) = native(view, None);
    (c, o == Orientation::Row)
}

/// Row-major access to `op(A)`: major index = row of `op(A)`.
pub(crate) fn rows_of<'a, T: Scalar, I: SpIndex, O: SpIndex>(
    op: &Operand<'a, T, I, O>,
) -> Compressed<'a, T, I, O> {
    oriented(op, Orientation::Row)
}

/// Column-major access to `op(A)`.
#[cfg(test)]
pub(crate) fn cols_of<'a, T: Scalar, I: SpIndex, O: SpIndex>(
    op: &Operand<'a, T, I, O>,
) -> Compressed<'a, T, I, O> {
    oriented(op, Orientation::Col)
}

/// Feeds the structure of `op(A)` (never its values) into `h`.
pub(crate) fn hash_structure<T: Scalar, I: SpIndex, O: SpIndex>(
    op: &Operand<'_, T, I, O>,
    h: &mut impl Hasher,
) {
    let v = op.view;
    (v.format() as u8, v.nrows(), v.ncols(), v.nnz(), v.base().offset()).hash(h);
    (op.transpose, op.conjugate).hash(h);
    let (major, minor): (Vec<usize>, &[I]) = match v {
        ViewRef::Csr(c) => (
            c.row_offsets().iter().map(|o| o.index()).collect(),
            c.col_indices(),
        ),
        ViewRef::Csc(c) => (
            c.col_offsets().iter().map(|o| o.index()).collect(),
            c.row_indices(),
        ),
        ViewRef::Coo(c) => (
            c.row_indices().iter().map(|o| o.index()).collect(),
            c.col_indices(),
        ),
    };
    major.hash(h);
    for i in minor {
        i.index().hash(h);
    }
}

pub(crate) fn new_hasher() -> DefaultHasher {
    DefaultHasher::new()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{transposed, CooView, CscView, CsrView, SparseOperand};

    fn rows<T: Scalar, I: SpIndex, O: SpIndex>(c: &Compressed<'_, T, I, O>) -> Vec<Vec<(usize, T)>> {
        (0..c.nmajor)
            .map(|m| c.range(m).map(|k| (c.minor(k), c.value(k))).collect())
            .collect()
    }

    #[test]
    fn all_formats_agree_row_major() {
        // [[1, 0, 2], [0, 3, 0]]
        let csr = CsrView::<f64>::new(2, 3, 3, &[0, 2, 3], &[0, 2, 1], &[1.0, 2.0, 3.0]);
        let csc = CscView::<f64>::new(2, 3, 3, &[0, 1, 2, 3], &[0, 1, 0], &[1.0, 3.0, 2.0]);
        let coo = CooView::<f64>::new(2, 3, 3, &[0, 0, 1], &[0, 2, 1], &[1.0, 2.0, 3.0]);
        let a = rows(&rows_of(&csr.operand()));
        assert_eq!(a, rows(&rows_of(&csc.operand())));
        assert_eq!(a, rows(&rows_of(&SparseOperand::<f64, usize, usize>::operand(&coo))));
        let t = rows(&rows_of(&transposed(&csr, false).operand()));
        assert_eq!(t, vec![vec![(0, 1.0)], vec![(1, 3.0)], vec![(0, 2.0)]]);
        assert_eq!(t, rows(&cols_of(&csr.operand())));
    }
}
