use super::{Format, IndexBase, IsoValue, Values};
use crate::scalar::{Scalar, SpIndex};

macro_rules! compressed_view {
    (
        $(#[$meta:meta])*
        $name:ident, $offsets:ident, $indices:ident, $major:ident, $minor:ident, $format:expr
    ) => {
        $(#[$meta])*
        #[derive(Debug)]
        pub struct $name<'a, T, I = usize, O = usize> {
            nrows: usize,
            ncols: usize,
            nnz: usize,
            $offsets: &'a [O],
            $indices: &'a [I],
            values: Values<'a, T>,
            base: IndexBase,
        }

        impl<'a, T: Scalar, I: SpIndex, O: SpIndex> $name<'a, T, I, O> {
            pub fn new(
                nrows: usize,
                ncols: usize,
                nnz: usize,
                $offsets: &'a [O],
                $indices: &'a [I],
                values: impl Into<Values<'a, T>>,
            ) -> Self {
                $name {
                    nrows,
                    ncols,
                    nnz,
                    $offsets,
                    $indices,
                    values: values.into(),
                    base: IndexBase::Zero,
                }
            }

            pub fn with_base(mut self, base: IndexBase) -> Self {
                self.base = base;
                self
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
            pub fn $offsets(&self) -> &'a [O] {
                self.$offsets
            }
            pub fn $indices(&self) -> &'a [I] {
                self.$indices
            }
            pub fn values(&self) -> &Values<'a, T> {
                &self.values
            }
            pub fn values_mut(&mut self) -> &mut Values<'a, T> {
                &mut self.values
            }
            pub fn base(&self) -> IndexBase {
                self.base
            }
            pub fn format(&self) -> Format {
                $format
            }

            /// Same structure arrays, values replaced by an iso placeholder.
            pub(crate) fn structure(&self) -> $name<'a, T, I, O> {
                $name {
                    nrows: self.nrows,
                    ncols: self.ncols,
                    nnz: self.nnz,
                    $offsets: self.$offsets,
                    $indices: self.$indices,
                    values: Values::Iso(IsoValue::new(T::zero(), self.values.len())),
                    base: self.base,
                }
            }

            /// Stored entries as zero-based `(row, col, value)`, storage order.
            /// The view must be valid.
            pub fn triples(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
                let b = self.base.offset();
                let nmajor = self.$major;
                (0..nmajor).flat_map(move |m| {
                    let lo = self.$offsets[m].index() - b;
                    let hi = self.$offsets[m + 1].index() - b;
                    (lo..hi).map(move |k| {
                        let n = self.$indices[k].index() - b;
                        let (r, c) = if $format == Format::Csr { (m, n) } else { (n, m) };
                        (r, c, self.values.get(k))
                    })
                })
            }
        }
    };
}

compressed_view!(
    /// Compressed sparse row view.
    ///
    /// `row_offsets` has `nrows + 1` entries starting at the index base;
    /// `col_indices` and `values` hold `nnz` entries with strictly increasing
    /// column indices inside each row.
    CsrView, row_offsets, col_indices, nrows, ncols, Format::Csr
);

compressed_view!(
    /// Compressed sparse column view, the column-major analog of [`CsrView`].
    CscView, col_offsets, row_indices, ncols, nrows, Format::Csc
);

/// Coordinate view: entries sorted by `(row, col)` without duplicates.
#[derive(Debug)]
pub struct CooView<'a, T, I = usize> {
    nrows: usize,
    ncols: usize,
    nnz: usize,
    row_indices: &'a [I],
    col_indices: &'a [I],
    values: Values<'a, T>,
    base: IndexBase,
}

impl<'a, T: Scalar, I: SpIndex> CooView<'a, T, I> {
    pub fn new(
        nrows: usize,
        ncols: usize,
        nnz: usize,
        row_indices: &'a [I],
        col_indices: &'a [I],
        values: impl Into<Values<'a, T>>,
    ) -> Self {
        CooView {
            nrows,
            ncols,
            nnz,
            row_indices,
            col_indices,
            values: values.into(),
            base: IndexBase::Zero,
        }
    }

    pub fn with_base(mut self, base: IndexBase) -> Self {
        self.base = base;
        self
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
    pub fn row_indices(&self) -> &'a [I] {
        self.row_indices
    }
    pub fn col_indices(&self) -> &'a [I] {
        self.col_indices
    }
    pub fn values(&self) -> &Values<'a, T> {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut Values<'a, T> {
        &mut self.values
    }
    pub fn base(&self) -> IndexBase {
        self.base
    }
    pub fn format(&self) -> Format {
        Format::Coo
    }

    pub(crate) fn structure(&self) -> CooView<'a, T, I> {
        CooView {
            nrows: self.nrows,
            ncols: self.ncols,
            nnz: self.nnz,
            row_indices: self.row_indices,
            col_indices: self.col_indices,
            values: Values::Iso(IsoValue::new(T::zero(), self.values.len())),
            base: self.base,
        }
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let b = self.base.offset();
        (0..self.nnz).map(move |k| {
            (
                self.row_indices[k].index() - b,
                self.col_indices[k].index() - b,
                self.values.get(k),
            )
        })
    }
}

/// Any of the sparse views, owned.
#[derive(Debug)]
pub enum SparseView<'a, T, I = usize, O = usize> {
    Csr(CsrView<'a, T, I, O>),
    Csc(CscView<'a, T, I, O>),
    Coo(CooView<'a, T, I>),
}

/// Any of the sparse views, borrowed.
#[derive(Debug)]
pub enum ViewRef<'a, T, I = usize, O = usize> {
    Csr(&'a CsrView<'a, T, I, O>),
    Csc(&'a CscView<'a, T, I, O>),
    Coo(&'a CooView<'a, T, I>),
}

impl<'a, T, I, O> Clone for ViewRef<'a, T, I, O> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<'a, T, I, O> Copy for ViewRef<'a, T, I, O> {}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseView<'a, T, I, O> {
    pub fn as_ref(&self) -> ViewRef<'_, T, I, O> {
        match self {
            SparseView::Csr(v) => ViewRef::Csr(v),
            SparseView::Csc(v) => ViewRef::Csc(v),
            SparseView::Coo(v) => ViewRef::Coo(v),
        }
    }

    pub fn nrows(&self) -> usize {
        self.as_ref().nrows()
    }

    pub fn ncols(&self) -> usize {
        self.as_ref().ncols()
    }

    pub fn nnz(&self) -> usize {
        self.as_ref().nnz()
    }

    pub fn base(&self) -> IndexBase {
        self.as_ref().base()
    }

    pub fn format(&self) -> Format {
        self.as_ref().format()
    }

    pub fn values(&self) -> &Values<'a, T> {
        match self {
            SparseView::Csr(v) => v.values(),
            SparseView::Csc(v) => v.values(),
            SparseView::Coo(v) => v.values(),
        }
    }

    pub fn values_mut(&mut self) -> &mut Values<'a, T> {
        match self {
            SparseView::Csr(v) => v.values_mut(),
            SparseView::Csc(v) => v.values_mut(),
            SparseView::Coo(v) => v.values_mut(),
        }
    }

    pub(crate) fn structure(&self) -> SparseView<'a, T, I, O> {
        match self {
            SparseView::Csr(v) => SparseView::Csr(v.structure()),
            SparseView::Csc(v) => SparseView::Csc(v.structure()),
            SparseView::Coo(v) => SparseView::Coo(v.structure()),
        }
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> ViewRef<'a, T, I, O> {
    pub fn nrows(&self) -> usize {
        match self {
            ViewRef::Csr(v) => v.nrows(),
            ViewRef::Csc(v) => v.nrows(),
            ViewRef::Coo(v) => v.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            ViewRef::Csr(v) => v.ncols(),
            ViewRef::Csc(v) => v.ncols(),
            ViewRef::Coo(v) => v.ncols(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            ViewRef::Csr(v) => v.nnz(),
            ViewRef::Csc(v) => v.nnz(),
            ViewRef::Coo(v) => v.nnz(),
        }
    }

    pub fn base(&self) -> IndexBase {
        match self {
            ViewRef::Csr(v) => v.base(),
            ViewRef::Csc(v) => v.base(),
            ViewRef::Coo(v) => v.base(),
        }
    }

    pub fn format(&self) -> Format {
        match self {
            ViewRef::Csr(_) => Format::Csr,
            ViewRef::Csc(_) => Format::Csc,
            ViewRef::Coo(_) => Format::Coo,
        }
    }

    pub fn values(&self) -> &'a Values<'a, T> {
        match self {
            ViewRef::Csr(v) => v.values(),
            ViewRef::Csc(v) => v.values(),
            ViewRef::Coo(v) => v.values(),
        }
    }

    /// Zero-based triples in storage order.
    pub fn triples(&self) -> Box<dyn Iterator<Item = (usize, usize, T)> + 'a> {
        match *self {
            ViewRef::Csr(v) => Box::new(v.triples()),
            ViewRef::Csc(v) => Box::new(v.triples()),
            ViewRef::Coo(v) => Box::new(v.triples()),
        }
    }
}

impl<'a, T, I, O> From<CsrView<'a, T, I, O>> for SparseView<'a, T, I, O> {
    fn from(v: CsrView<'a, T, I, O>) -> Self {
        SparseView::Csr(v)
    }
}

impl<'a, T, I, O> From<CscView<'a, T, I, O>> for SparseView<'a, T, I, O> {
    fn from(v: CscView<'a, T, I, O>) -> Self {
        SparseView::Csc(v)
    }
}

impl<'a, T, I, O> From<CooView<'a, T, I>> for SparseView<'a, T, I, O> {
    fn from(v: CooView<'a, T, I>) -> Self {
        SparseView::Coo(v)
    }
}

impl<'a, T, I, O> From<&'a CsrView<'a, T, I, O>> for ViewRef<'a, T, I, O> {
    fn from(v: &'a CsrView<'a, T, I, O>) -> Self {
        ViewRef::Csr(v)
    }
}

impl<'a, T, I, O> From<&'a CscView<'a, T, I, O>> for ViewRef<'a, T, I, O> {
    fn from(v: &'a CscView<'a, T, I, O>) -> Self {
        ViewRef::Csc(v)
    }
}

impl<'a, T, I, O> From<&'a CooView<'a, T, I>> for ViewRef<'a, T, I, O> {
    fn from(v: &'a CooView<'a, T, I>) -> Self {
        ViewRef::Coo(v)
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> From<&'a SparseView<'a, T, I, O>>
    for ViewRef<'a, T, I, O>
{
    fn from(v: &'a SparseView<'a, T, I, O>) -> Self {
        v.as_ref()
    }
}
