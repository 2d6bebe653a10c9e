use thiserror::Error;

use super::{CooView, CscView, CsrView, Format, IndexBase, IsoValue, SparseView, Values, ViewRef};
use crate::error::Result;
use crate::runtime::OperationState;
use crate::scalar::Scalar;
use crate::staged::OutputShell;

/// Why a list of triples cannot become a canonical matrix.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("entry ({row}, {col}) outside a {nrows}x{ncols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("duplicate entry ({row}, {col})")]
    Duplicate { row: usize, col: usize },
}

/// Values of a [`SparseMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub enum OwnedValues<T> {
    Array(Vec<T>),
    /// Every stored entry reads as this value (pattern matrices).
    Iso(T),
}

/// A sparse matrix owning its arrays, in any format and index base.
///
/// Purely a container: it hands out views for the kernels and binds its
/// arrays to an [`OutputShell`] for staged results.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    format: Format,
    nrows: usize,
    ncols: usize,
    nnz: usize,
    base: IndexBase,
    /// Row offsets (CSR), column offsets (CSC) or row indices (COO).
    major: Vec<usize>,
    /// Column indices (CSR, COO) or row indices (CSC).
    minor: Vec<usize>,
    values: OwnedValues<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Sorts zero-based triples into canonical order for `format`.
    pub fn from_triples(
        nrows: usize,
        ncols: usize,
        mut triples: Vec<(usize, usize, T)>,
        format: Format,
        base: IndexBase,
    ) -> Result<Self, TripleError> {
        if let Some(&(row, col, _)) = triples.iter().find(|t| t.0 >= nrows || t.1 >= ncols) {
            return Err(TripleError::OutOfRange {
                row,
                col,
                nrows,
                ncols,
            });
        }
        match format {
            Format::Csc => triples.sort_by_key(|t| (t.1, t.0)),
            _ => triples.sort_by_key(|t| (t.0, t.1)),
        }
        if let Some(w) = triples.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(TripleError::Duplicate {
                row: w[0].0,
                col: w[0].1,
            });
        }
        let b = base.offset();
        let nnz = triples.len();
        let compress = |nmajor: usize, key: fn(&(usize, usize, T)) -> usize| {
            let mut offsets = vec![b; nmajor + 1];
            for t in &triples {
                offsets[key(t) + 1] += 1;
            }
            for m in 0..nmajor {
                offsets[m + 1] += offsets[m] - b;
            }
            offsets
        };
        let (major, minor) = match format {
            Format::Csr => (compress(nrows, |t| t.0), triples.iter().map(|t| t.1 + b).collect()),
            Format::Csc => (compress(ncols, |t| t.1), triples.iter().map(|t| t.0 + b).collect()),
            Format::Coo => (
                triples.iter().map(|t| t.0 + b).collect(),
                triples.iter().map(|t| t.1 + b).collect(),
            ),
        };
        Ok(SparseMatrix {
            format,
            nrows,
            ncols,
            nnz,
            base,
            major,
            minor,
            values: OwnedValues::Array(triples.into_iter().map(|t| t.2).collect()),
        })
    }

    /// Copies any valid view, keeping its format and base.
    pub fn from_view<I: crate::scalar::SpIndex, O: crate::scalar::SpIndex>(
        view: ViewRef<'_, T, I, O>,
    ) -> Self {
        let mut m = Self::from_triples(
            view.nrows(),
            view.ncols(),
            view.triples().collect(),
            view.format(),
            view.base(),
        )
        .expect("a valid view has canonical triples");
        if let Values::Iso(iso) = view.values() {
            m.values = OwnedValues::Iso(iso.value);
        }
        m
    }

    /// Zero-filled arrays for an `nnz`-entry result, ready for [`shell`](Self::shell).
    pub fn allocate(format: Format, nrows: usize, ncols: usize, nnz: usize, base: IndexBase) -> Self {
        let major = match format {
            Format::Csr => nrows + 1,
            Format::Csc => ncols + 1,
            Format::Coo => nnz,
        };
        SparseMatrix {
            format,
            nrows,
            ncols,
            nnz,
            base,
            major: vec![0; major],
            minor: vec![0; nnz],
            values: OwnedValues::Array(vec![T::zero(); nnz]),
        }
    }

    /// Replaces the values by a single iso value.
    pub fn with_iso_value(mut self, value: T) -> Self {
        self.values = OwnedValues::Iso(value);
        self
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn base(&self) -> IndexBase {
        self.base
    }

    pub fn values(&self) -> &OwnedValues<T> {
        &self.values
    }

    /// Stored values as an array; fails for iso matrices.
    pub fn values_mut(&mut self) -> Option<&mut [T]> {
        match &mut self.values {
            OwnedValues::Array(v) => Some(v),
            OwnedValues::Iso(_) => None,
        }
    }

    pub fn view(&self) -> SparseView<'_, T> {
        let values: Values<'_, T> = match &self.values {
            OwnedValues::Array(v) => Values::Slice(v),
            OwnedValues::Iso(v) => Values::Iso(IsoValue::new(*v, self.nnz)),
        };
        self.build(values)
    }

    /// A view whose values kernels may overwrite (iso values stay read-only).
    pub fn view_mut(&mut self) -> SparseView<'_, T> {
        let nnz = self.nnz;
        let (major, minor) = (&self.major[..], &self.minor[..]);
        let values: Values<'_, T> = match &mut self.values {
            OwnedValues::Array(v) => Values::SliceMut(v),
            OwnedValues::Iso(v) => Values::Iso(IsoValue::new(*v, nnz)),
        };
        build(self.format, self.nrows, self.ncols, nnz, self.base, major, minor, values)
    }

    fn build<'s>(&'s self, values: Values<'s, T>) -> SparseView<'s, T> {
        build(
            self.format,
            self.nrows,
            self.ncols,
            self.nnz,
            self.base,
            &self.major,
            &self.minor,
            values,
        )
    }

    /// Binds every array to a fresh shell of the same format and base.
    /// Iso matrices cannot receive values.
    pub fn shell(&mut self) -> OutputShell<'_, T> {
        let mut shell = OutputShell::new(self.format, self.nrows, self.ncols).with_base(self.base);
        match self.format {
            Format::Coo => shell.bind_row_indices(&mut self.major),
            _ => shell.bind_offsets(&mut self.major),
        };
        shell.bind_indices(&mut self.minor);
        if let OwnedValues::Array(v) = &mut self.values {
            shell.bind_values(v);
        }
        shell
    }

    /// Runs `compute`, allocates `result_nnz` entries and runs `fill`.
    pub fn staged(
        state: &mut OperationState<T>,
        format: Format,
        nrows: usize,
        ncols: usize,
        base: IndexBase,
        compute: impl FnOnce(&mut OperationState<T>, &OutputShell<'_, T>) -> Result<()>,
        fill: impl FnOnce(&mut OperationState<T>, &mut OutputShell<'_, T>) -> Result<()>,
    ) -> Result<Self> {
        compute(state, &OutputShell::new(format, nrows, ncols).with_base(base))?;
        let mut m = Self::allocate(format, nrows, ncols, state.result_nnz()?, base);
        fill(state, &mut m.shell())?;
        Ok(m)
    }

    /// Zero-based `(row, col, value)` in storage order.
    pub fn triples(&self) -> Vec<(usize, usize, T)> {
        self.view().as_ref().triples().collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn build<'s, T: Scalar>(
    format: Format,
    nrows: usize,
    ncols: usize,
    nnz: usize,
    base: IndexBase,
    major: &'s [usize],
    minor: &'s [usize],
    values: Values<'s, T>,
) -> SparseView<'s, T> {
    match format {
        Format::Csr => CsrView::new(nrows, ncols, nnz, major, minor, values).with_base(base).into(),
        Format::Csc => CscView::new(nrows, ncols, nnz, major, minor, values).with_base(base).into(),
        Format::Coo => CooView::new(nrows, ncols, nnz, major, minor, values).with_base(base).into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::validate;

    #[test]
    fn canonical_in_every_format() {
        let t = vec![(1, 0, 3.0), (0, 2, 2.0), (0, 0, 1.0)];
        for format in [Format::Csr, Format::Csc, Format::Coo] {
            for base in [IndexBase::Zero, IndexBase::One] {
                let m = SparseMatrix::from_triples(2, 3, t.clone(), format, base).unwrap();
                assert!(validate(m.view().as_ref()).is_ok(), "{format:?} {base:?}");
                let mut got = m.triples();
                got.sort_by_key(|t| (t.0, t.1));
                assert_eq!(got, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 0, 3.0)]);
            }
        }
    }

    #[test]
    fn rejects_duplicates_and_range() {
        let dup = SparseMatrix::from_triples(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0)], Format::Coo, IndexBase::Zero);
        assert_eq!(dup, Err(TripleError::Duplicate { row: 0, col: 0 }));
        let out = SparseMatrix::from_triples(2, 2, vec![(2, 0, 1.0)], Format::Csr, IndexBase::Zero);
        assert!(matches!(out, Err(TripleError::OutOfRange { .. })));
    }

    #[test]
    fn iso_and_mutable_views() {
        let mut m = SparseMatrix::from_triples(2, 2, vec![(0, 0, 1.0f32), (1, 1, 2.0)], Format::Csr, IndexBase::Zero)
            .unwrap();
        m.view_mut().values_mut().as_mut_slice().unwrap()[1] = 5.0;
        assert_eq!(m.triples()[1].2, 5.0);
        let iso = m.with_iso_value(1.0);
        assert!(iso.view().values().as_slice().is_none());
        assert_eq!(iso.triples()[1].2, 1.0);
    }
}
