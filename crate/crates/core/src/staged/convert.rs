use std::hash::Hasher;

use super::engine::{self, fingerprint_of, Family};
use super::OutputShell;
use crate::access::{ensure_valid, new_hasher, rows_of, Compressed};
use crate::error::Result;
use crate::formats::{
    CooView, CscView, CsrView, DenseView, Operand, Scaled, SparseOperand, SparseView, Transposed,
};
use crate::runtime::{ExecutionPolicy, Fingerprint, MatrixHandle, OperationKind, OperationState};
use crate::scalar::{Scalar, SpIndex};

/// Copies `alpha * op(A)` entry for entry, optionally keeping only the
/// entries a predicate accepts.
struct Copy<'a, T, I, O, P> {
    kind: OperationKind,
    r: Compressed<'a, T, I, O>,
    alpha: T,
    pred: Option<P>,
    fp: Fingerprint,
}

impl<'a, T, I, O, P> Copy<'a, T, I, O, P>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
    P: Fn(usize, usize, T) -> bool + Sync,
{
    fn new(kind: OperationKind, op: &Operand<'a, T, I, O>, pred: Option<P>) -> Result<Self> {
        ensure_valid(op)?;
        let shape = (op.nrows(), op.ncols());
        Ok(Copy {
            kind,
            r: rows_of(op),
            alpha: op.alpha,
            pred,
            fp: fingerprint_of(kind, shape, &[op], 0),
        })
    }

    /// `alpha * v`; a zero `alpha` never reads the value.
    #[inline]
    fn value(&self, k: usize) -> T {
        if self.alpha == T::one() {
            self.r.value(k)
        } else if self.alpha.is_zero() {
            T::zero()
        } else {
            self.alpha * self.r.value(k)
        }
    }
}

impl<'a, T, I, O, P> Family<T> for Copy<'a, T, I, O, P>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
    P: Fn(usize, usize, T) -> bool + Sync,
{
    type Scratch = ();

    fn kind(&self) -> OperationKind {
        self.kind
    }

    fn shape(&self) -> (usize, usize) {
        (self.r.nmajor, self.r.nminor)
    }

    fn fingerprint(&self) -> Fingerprint {
        self.fp
    }

    fn value_dependent(&self) -> bool {
        self.pred.is_some()
    }

    fn work(&self, i: usize) -> usize {
        self.r.start(i) + i
    }

    fn mask_start(&self, i: usize) -> usize {
        if self.pred.is_some() {
            self.r.start(i)
        } else {
            0
        }
    }

    fn scratch(&self) {}

    fn count_row(&self, i: usize, _s: &mut (), mask: &mut [u8]) -> usize {
        let range = self.r.range(i);
        match &self.pred {
            None => range.len(),
            Some(pred) => {
                let start = range.start;
                let mut n = 0;
                for k in range {
                    let keep = pred(i, self.r.minor(k), self.value(k));
                    mask[k - start] = keep as u8;
                    n += keep as usize;
                }
                n
            }
        }
    }

    fn fill_row(
        &self,
        i: usize,
        _s: &mut (),
        mask: &[u8],
        cols: &mut Vec<usize>,
        mut vals: Option<&mut Vec<T>>,
    ) {
        let range = self.r.range(i);
        let start = range.start;
        for k in range {
            if self.pred.is_some() && mask[k - start] == 0 {
                continue;
            }
            cols.push(self.r.minor(k));
            if let Some(vals) = vals.as_deref_mut() {
                vals.push(self.value(k));
            }
        }
    }
}

/// A dense matrix as a conversion source: `alpha * op(D)`.
#[derive(Debug, Clone, Copy)]
pub struct DenseSource<'s, T> {
    pub view: &'s DenseView<'s, T>,
    pub alpha: T,
    pub transpose: bool,
    pub conjugate: bool,
}

impl<T: Scalar> DenseSource<'_, T> {
    fn shape(&self) -> (usize, usize) {
        if self.transpose {
            (self.view.ncols(), self.view.nrows())
        } else {
            (self.view.nrows(), self.view.ncols())
        }
    }

    /// Stored entry behind `op(D)(i, j)`, before scaling and conjugation.
    fn raw(&self, i: usize, j: usize) -> T {
        if self.transpose {
            self.view.get(j, i)
        } else {
            self.view.get(i, j)
        }
    }
}

/// Dense to sparse: every entry of `D` that is not `+0` or `-0` (NaN
/// included), whatever the scaling.
struct FromDense<'a, T> {
    d: DenseSource<'a, T>,
    shape: (usize, usize),
    fp: Fingerprint,
}

impl<'a, T: Scalar> FromDense<'a, T> {
    fn new(d: DenseSource<'a, T>) -> Self {
        let shape = d.shape();
        let mut h = new_hasher();
        h.write_u8(OperationKind::Convert as u8);
        h.write_usize(shape.0);
        h.write_usize(shape.1);
        FromDense {
            d,
            shape,
            fp: Fingerprint(h.finish()),
        }
    }

    fn value(&self, i: usize, j: usize) -> T {
        let v = self.d.raw(i, j);
        let v = if self.d.conjugate { v.conj() } else { v };
        if self.d.alpha == T::one() {
            v
        } else if self.d.alpha.is_zero() {
            T::zero()
        } else {
            self.d.alpha * v
        }
    }
}

impl<'a, T: Scalar> Family<T> for FromDense<'a, T> {
    type Scratch = ();

    fn kind(&self) -> OperationKind {
        OperationKind::Convert
    }

    fn shape(&self) -> (usize, usize) {
        self.shape
    }

    fn fingerprint(&self) -> Fingerprint {
        self.fp
    }

    fn value_dependent(&self) -> bool {
        true
    }

    fn mask_start(&self, i: usize) -> usize {
        i * self.shape.1
    }

    fn scratch(&self) {}

    fn count_row(&self, i: usize, _s: &mut (), mask: &mut [u8]) -> usize {
        let mut n = 0;
        for (j, m) in mask.iter_mut().enumerate() {
            let keep = !self.d.raw(i, j).is_zero();
            *m = keep as u8;
            n += keep as usize;
        }
        n
    }

    fn fill_row(
        &self,
        i: usize,
        _s: &mut (),
        mask: &[u8],
        cols: &mut Vec<usize>,
        mut vals: Option<&mut Vec<T>>,
    ) {
        for (j, &m) in mask.iter().enumerate() {
            if m != 0 {
                cols.push(j);
                if let Some(vals) = vals.as_deref_mut() {
                    vals.push(self.value(i, j));
                }
            }
        }
    }
}

/// Source of a conversion: a sparse operand or a dense matrix.
#[derive(Debug)]
pub enum Source<'s, T, I, O> {
    Sparse(Operand<'s, T, I, O>),
    Dense(DenseSource<'s, T>),
}

/// Anything [`convert_compute`] accepts as input: sparse views and handles,
/// dense views, and the scaled/transposed wrappers around either.
pub trait ConvertSource<T: Scalar> {
    type Index: SpIndex;
    type Offset: SpIndex;
    fn source(&self) -> Source<'_, T, Self::Index, Self::Offset>;
}

macro_rules! sparse_source {
    ($($ty:ty),*) => {$(
        impl<'a, T: Scalar, I: SpIndex, O: SpIndex> ConvertSource<T> for $ty {
            type Index = I;
            type Offset = O;
            fn source(&self) -> Source<'_, T, I, O> {
                Source::Sparse(self.operand())
            }
        }
    )*};
}

sparse_source!(
    CsrView<'a, T, I, O>,
    CscView<'a, T, I, O>,
    SparseView<'a, T, I, O>,
    MatrixHandle<'a, T, I, O>,
    Operand<'a, T, I, O>
);

impl<'a, T: Scalar, I: SpIndex> ConvertSource<T> for CooView<'a, T, I> {
    type Index = I;
    type Offset = I;
    fn source(&self) -> Source<'_, T, I, I> {
        Source::Sparse(self.operand())
    }
}

impl<'a, T: Scalar> ConvertSource<T> for DenseView<'a, T> {
    type Index = usize;
    type Offset = usize;
    fn source(&self) -> Source<'_, T, usize, usize> {
        Source::Dense(DenseSource {
            view: self,
            alpha: T::one(),
            transpose: false,
            conjugate: false,
        })
    }
}

impl<T: Scalar, V: ConvertSource<T>> ConvertSource<T> for Scaled<T, V> {
    type Index = V::Index;
    type Offset = V::Offset;
    fn source(&self) -> Source<'_, T, V::Index, V::Offset> {
        match self.inner.source() {
            Source::Sparse(mut op) => {
                op.alpha = self.alpha * op.alpha;
                Source::Sparse(op)
            }
            Source::Dense(mut d) => {
                d.alpha = self.alpha * d.alpha;
                Source::Dense(d)
            }
        }
    }
}

impl<T: Scalar, V: ConvertSource<T>> ConvertSource<T> for Transposed<V> {
    type Index = V::Index;
    type Offset = V::Offset;
    fn source(&self) -> Source<'_, T, V::Index, V::Offset> {
        match self.inner.source() {
            Source::Sparse(op) => Source::Sparse(flipped(op, self.conjugate)),
            Source::Dense(mut d) => {
                d.transpose = !d.transpose;
                if self.conjugate {
                    d.conjugate = !d.conjugate;
                    d.alpha = d.alpha.conj();
                }
                Source::Dense(d)
            }
        }
    }
}

impl<T: Scalar, X: ConvertSource<T> + ?Sized> ConvertSource<T> for &X {
    type Index = X::Index;
    type Offset = X::Offset;
    fn source(&self) -> Source<'_, T, X::Index, X::Offset> {
        (**self).source()
    }
}

type NoPred<T> = fn(usize, usize, T) -> bool;

/// The two conversion paths behind one family type.
enum Convert<'a, T, I, O> {
    Sparse(Copy<'a, T, I, O, NoPred<T>>),
    Dense(FromDense<'a, T>),
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Convert<'a, T, I, O> {
    fn new(src: &Source<'a, T, I, O>) -> Result<Self> {
        Ok(match src {
            Source::Sparse(op) => Convert::Sparse(Copy::new(OperationKind::Convert, op, None)?),
            Source::Dense(d) => Convert::Dense(FromDense::new(*d)),
        })
    }
}

macro_rules! delegate {
    ($self:ident, $f:ident ( $($arg:expr),* )) => {
        match $self {
            Convert::Sparse(c) => c.$f($($arg),*),
            Convert::Dense(d) => d.$f($($arg),*),
        }
    };
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Family<T> for Convert<'a, T, I, O> {
    type Scratch = ();

    fn kind(&self) -> OperationKind {
        OperationKind::Convert
    }

    fn shape(&self) -> (usize, usize) {
        delegate!(self, shape())
    }

    fn fingerprint(&self) -> Fingerprint {
        delegate!(self, fingerprint())
    }

    fn value_dependent(&self) -> bool {
        delegate!(self, value_dependent())
    }

    fn work(&self, i: usize) -> usize {
        delegate!(self, work(i))
    }

    fn mask_start(&self, i: usize) -> usize {
        delegate!(self, mask_start(i))
    }

    fn scratch(&self) {}

    fn count_row(&self, i: usize, s: &mut (), mask: &mut [u8]) -> usize {
        delegate!(self, count_row(i, s, mask))
    }

    fn fill_row(&self, i: usize, s: &mut (), mask: &[u8], cols: &mut Vec<usize>, vals: Option<&mut Vec<T>>) {
        delegate!(self, fill_row(i, s, mask, cols, vals))
    }
}

/// Optional inspect for a conversion; validates the source.
pub fn convert_inspect<T, CI, CO>(
    _policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl ConvertSource<T>,
    _b: &OutputShell<'_, T, CI, CO>,
) -> Result<()>
where
    T: Scalar,
    CI: SpIndex,
    CO: SpIndex,
{
    let src = a.source();
    engine::inspect(state, OperationKind::Convert, || Convert::new(&src).map(drop))
}

/// `B = sparse(A)` structure. Sparse sources keep every stored entry,
/// explicit zeros included; dense sources keep the entries that are not
/// `+0` or `-0`, NaN included. `B`'s format picks the output layout.
pub fn convert_compute<T, CI, CO>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl ConvertSource<T>,
    b: &OutputShell<'_, T, CI, CO>,
) -> Result<()>
where
    T: Scalar,
    CI: SpIndex,
    CO: SpIndex,
{
    let src = a.source();
    engine::compute(policy, state, OperationKind::Convert, false, b, || Convert::new(&src))
}

/// Writes the converted matrix. Dense sources emit exactly the positions
/// selected by the compute.
pub fn convert_fill<T, CI, CO>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl ConvertSource<T>,
    b: &mut OutputShell<'_, T, CI, CO>,
) -> Result<()>
where
    T: Scalar,
    CI: SpIndex,
    CO: SpIndex,
{
    let src = a.source();
    engine::fill(policy, state, OperationKind::Convert, b, || Convert::new(&src))
}

/// Structure of `B = A(pred)`: the stored entries of `op(A)` for which
/// `pred(i, j, v)` holds, with zero-based `i`, `j` and the scaled value.
/// The decisions are recorded in the state; the fill never calls `pred`.
pub fn filter_compute<T, I, O, CI, CO>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
    b: &OutputShell<'_, T, CI, CO>,
    pred: impl Fn(usize, usize, T) -> bool + Sync,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
    CI: SpIndex,
    CO: SpIndex,
{
    let op = a.operand();
    engine::compute(policy, state, OperationKind::Filter, false, b, || {
        Copy::new(OperationKind::Filter, &op, Some(pred))
    })
}

/// Writes the entries accepted by [`filter_compute`]. `pred` is taken for
/// symmetry with the compute and is not evaluated.
pub fn filter_fill<T, I, O, CI, CO>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
    b: &mut OutputShell<'_, T, CI, CO>,
    pred: impl Fn(usize, usize, T) -> bool + Sync,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
    CI: SpIndex,
    CO: SpIndex,
{
    let op = a.operand();
    engine::fill(policy, state, OperationKind::Filter, b, || {
        Copy::new(OperationKind::Filter, &op, Some(pred))
    })
}

fn flipped<'a, T: Scalar, I: SpIndex, O: SpIndex>(mut op: Operand<'a, T, I, O>, conjugate: bool) -> Operand<'a, T, I, O> {
    op.transpose = !op.transpose;
    if conjugate {
        op.conjugate = !op.conjugate;
        op.alpha = op.alpha.conj();
    }
    op
}

/// Structure of `B = op(A)^T` (or `^H` with `conjugate`); `result_nnz`
/// equals `nnz(A)`.
pub fn transpose_compute<T, I, O, CI, CO>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
    b: &OutputShell<'_, T, CI, CO>,
    conjugate: bool,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
    CI: SpIndex,
    CO: SpIndex,
{
    let op = flipped(a.operand(), conjugate);
    engine::compute(policy, state, OperationKind::Transpose, false, b, || {
        Copy::<T, I, O, NoPred<T>>::new(OperationKind::Transpose, &op, None)
    })
}

/// Writes the transposed matrix in canonical order.
pub fn transpose_fill<T, I, O, CI, CO>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
    b: &mut OutputShell<'_, T, CI, CO>,
    conjugate: bool,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
    CI: SpIndex,
    CO: SpIndex,
{
    let op = flipped(a.operand(), conjugate);
    engine::fill(policy, state, OperationKind::Transpose, b, || {
        Copy::<T, I, O, NoPred<T>>::new(OperationKind::Transpose, &op, None)
    })
}
