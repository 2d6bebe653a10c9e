//! Scaled and (conjugate-)transposed wrappers.
//!
//! Both are purely symbolic: building one stores a scalar or a flag next to
//! a reference and never touches element data. Kernels fold the wrappers into
//! a single [`Operand`] description before running.

use super::{CooView, CscView, CsrView, SparseView, ViewRef};
use crate::runtime::OptStore;
use crate::scalar::{Scalar, SpIndex};

pub(crate) type HandleLink<'a> = &'a OptStore;

/// `alpha * inner`.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<S, V> {
    pub alpha: S,
    pub inner: V,
}

/// `inner^T`, or `inner^H` when `conjugate` is set.
#[derive(Debug, Clone, Copy)]
pub struct Transposed<V> {
    pub conjugate: bool,
    pub inner: V,
}

pub fn scaled<S, V>(alpha: S, inner: V) -> Scaled<S, V> {
    Scaled { alpha, inner }
}

pub fn transposed<V>(inner: V, conjugate: bool) -> Transposed<V> {
    Transposed { conjugate, inner }
}

/// A sparse operand reduced to `alpha * op(view)`.
#[derive(Debug, Clone, Copy)]
pub struct Operand<'a, T, I, O> {
    pub(crate) view: ViewRef<'a, T, I, O>,
    pub(crate) alpha: T,
    pub(crate) transpose: bool,
    pub(crate) conjugate: bool,
    pub(crate) handle: Option<HandleLink<'a>>,
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> Operand<'a, T, I, O> {
    pub(crate) fn plain(view: ViewRef<'a, T, I, O>) -> Self {
        Operand {
            view,
            alpha: T::one(),
            transpose: false,
            conjugate: false,
            handle: None,
        }
    }

    pub fn view(&self) -> ViewRef<'a, T, I, O> {
        self.view
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn is_transposed(&self) -> bool {
        self.transpose
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugate
    }

    pub fn has_handle(&self) -> bool {
        self.handle.is_some()
    }

    /// Rows of `op(view)`.
    pub fn nrows(&self) -> usize {
        if self.transpose {
            self.view.ncols()
        } else {
            self.view.nrows()
        }
    }

    /// Columns of `op(view)`.
    pub fn ncols(&self) -> usize {
        if self.transpose {
            self.view.nrows()
        } else {
            self.view.ncols()
        }
    }
}

/// Anything a kernel accepts as a sparse input: views, handles, and the
/// scaled/transposed wrappers around them.
pub trait SparseOperand<T: Scalar, I: SpIndex = usize, O: SpIndex = usize> {
    fn operand(&self) -> Operand<'_, T, I, O>;
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseOperand<T, I, O> for CsrView<'a, T, I, O> {
    fn operand(&self) -> Operand<'_, T, I, O> {
        Operand::plain(ViewRef::Csr(self))
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseOperand<T, I, O> for CscView<'a, T, I, O> {
    fn operand(&self) -> Operand<'_, T, I, O> {
        Operand::plain(ViewRef::Csc(self))
    }
}

/// Coordinate views carry no offset array; they pair with operands whose
/// offset type equals their index type.
impl<'a, T: Scalar, I: SpIndex> SparseOperand<T, I, I> for CooView<'a, T, I> {
    fn operand(&self) -> Operand<'_, T, I, I> {
        Operand::plain(ViewRef::Coo(self))
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseOperand<T, I, O> for SparseView<'a, T, I, O> {
    fn operand(&self) -> Operand<'_, T, I, O> {
        Operand::plain(self.as_ref())
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseOperand<T, I, O> for Operand<'a, T, I, O> {
    fn operand(&self) -> Operand<'_, T, I, O> {
        *self
    }
}

impl<T: Scalar, I: SpIndex, O: SpIndex, X: SparseOperand<T, I, O> + ?Sized> SparseOperand<T, I, O>
    for &X
{
    fn operand(&self) -> Operand<'_, T, I, O> {
        (**self).operand()
    }
}

impl<T: Scalar, I: SpIndex, O: SpIndex, X: SparseOperand<T, I, O> + ?Sized> SparseOperand<T, I, O>
    for &mut X
{
    fn operand(&self) -> Operand<'_, T, I, O> {
        (**self).operand()
    }
}

impl<T: Scalar, I: SpIndex, O: SpIndex, V: SparseOperand<T, I, O>> SparseOperand<T, I, O>
    for Scaled<T, V>
{
    fn operand(&self) -> Operand<'_, T, I, O> {
        let mut op = self.inner.operand();
        op.alpha = self.alpha * op.alpha;
        op
    }
}

impl<T: Scalar, I: SpIndex, O: SpIndex, V: SparseOperand<T, I, O>> SparseOperand<T, I, O>
    for Transposed<V>
{
    fn operand(&self) -> Operand<'_, T, I, O> {
        let mut op = self.inner.operand();
        op.transpose = !op.transpose;
        if self.conjugate {
            // (alpha A)^H = conj(alpha) A^H
            op.conjugate = !op.conjugate;
            op.alpha = op.alpha.conj();
        }
        op
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn nested_scaling_multiplies() {
        let v = CsrView::<f64>::new(1, 1, 1, &[0, 1], &[0], &[1.0]);
        let a = scaled(2.0, scaled(3.0, &v));
        let b = scaled(6.0, &v);
        assert_eq!(a.operand().alpha, b.operand().alpha);
    }

    #[test]
    fn double_transpose_cancels() {
        let v = CsrView::<f64>::new(2, 3, 0, &[0, 0, 0], &[], &[]);
        let t = transposed(&v, false);
        assert_eq!((t.operand().nrows(), t.operand().ncols()), (3, 2));
        let tt = transposed(transposed(&v, true), true);
        let op = tt.operand();
        assert!(!op.transpose && !op.conjugate);
    }

    #[test]
    fn conjugate_transpose_conjugates_scalar() {
        let vals = [Complex::new(1.0f64, 0.0)];
        let v = CsrView::new(1, 1, 1, &[0usize, 1], &[0usize], &vals);
        let alpha = Complex::new(0.0, 2.0);
        let w = transposed(scaled(alpha, &v), true);
        let op = w.operand();
        assert_eq!(op.alpha, Complex::new(0.0, -2.0));
        assert!(op.conjugate && op.transpose);
    }
}
