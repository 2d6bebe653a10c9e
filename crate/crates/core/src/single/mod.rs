//! Single-stage kernels: the output structure is known before the call.
//!
//! Every kernel takes an [`ExecutionPolicy`](crate::runtime::ExecutionPolicy)
//! and an [`OperationState`](crate::runtime::OperationState) bound to its
//! family, and accepts either plain views or matrix handles (optionally
//! wrapped in [`scaled`](crate::formats::scaled) /
//! [`transposed`](crate::formats::transposed)). The optional `*_inspect`
//! entry points may cache data in a handle but never change results.

mod multiply;
mod norm;
mod sampled;
mod scale;
mod trisolve;

pub use multiply::{
    multiply, multiply_add, multiply_inspect, scaled_output, Addend, DenseAddend, ScaledOutput,
};
pub use norm::{matrix_frob_norm, matrix_frob_norm_default, matrix_inf_norm, norm_inspect};
pub use sampled::{sampled_multiply, sampled_multiply_inspect};
pub use scale::scale;
pub use trisolve::{triangular_solve, triangular_solve_inspect};

use crate::error::Result;
use crate::formats::{CooView, CscView, CsrView, SparseView};
use crate::runtime::{MatrixHandle, OperationKind, OperationState, Phase};
use crate::scalar::{Scalar, SpIndex};

/// A sparse matrix whose values a kernel may overwrite in place.
pub trait SparseTarget<T: Scalar, I: SpIndex = usize, O: SpIndex = usize> {
    /// The structure (values replaced by a placeholder), the writable values
    /// (or why they are not writable), and whether the structure has already
    /// been validated.
    fn target(&mut self) -> (SparseView<'_, T, I, O>, Result<&mut [T]>, bool);
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseTarget<T, I, O> for CsrView<'a, T, I, O> {
    fn target(&mut self) -> (SparseView<'_, T, I, O>, Result<&mut [T]>, bool) {
        let s = self.structure();
        (SparseView::Csr(s), self.values_mut().as_mut_slice(), false)
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseTarget<T, I, O> for CscView<'a, T, I, O> {
    fn target(&mut self) -> (SparseView<'_, T, I, O>, Result<&mut [T]>, bool) {
        let s = self.structure();
        (SparseView::Csc(s), self.values_mut().as_mut_slice(), false)
    }
}

impl<'a, T: Scalar, I: SpIndex> SparseTarget<T, I, I> for CooView<'a, T, I> {
    fn target(&mut self) -> (SparseView<'_, T, I, I>, Result<&mut [T]>, bool) {
        let s = self.structure();
        (SparseView::Coo(s), self.values_mut().as_mut_slice(), false)
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseTarget<T, I, O> for SparseView<'a, T, I, O> {
    fn target(&mut self) -> (SparseView<'_, T, I, O>, Result<&mut [T]>, bool) {
        let s = self.structure();
        (s, self.values_mut().as_mut_slice(), false)
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseTarget<T, I, O> for MatrixHandle<'a, T, I, O> {
    fn target(&mut self) -> (SparseView<'_, T, I, O>, Result<&mut [T]>, bool) {
        let (s, v, _) = self.view_mut().target();
        (s, v, true)
    }
}

impl<T: Scalar, I: SpIndex, O: SpIndex, X: SparseTarget<T, I, O> + ?Sized> SparseTarget<T, I, O>
    for &mut X
{
    fn target(&mut self) -> (SparseView<'_, T, I, O>, Result<&mut [T]>, bool) {
        (**self).target()
    }
}

/// Shared inspect bookkeeping: kind check, then advance to `Inspected`.
fn mark_inspected<T: Scalar>(state: &mut OperationState<T>, kind: OperationKind) -> Result<()> {
    state.check_kind(kind)?;
    state.set_phase(Phase::Inspected);
    Ok(())
}

/// Stored entries per row of the untransposed matrix behind `view`.
/// Reads structure arrays only.
fn row_counts<T: Scalar, I: SpIndex, O: SpIndex>(
    view: crate::formats::ViewRef<'_, T, I, O>,
) -> Vec<usize> {
    let (c, row_major) = crate::access::stored(view);
    if row_major {
        (0..c.nmajor).map(|m| c.len_of(m)).collect()
    } else {
        let mut counts = vec![0usize; c.nminor];
        for m in 0..c.nmajor {
            for k in c.range(m) {
                counts[c.minor(k)] += 1;
            }
        }
        counts
    }
}
