use super::{mark_inspected, SparseTarget};
use crate::access::{ensure_valid, stored};
use crate::error::{Error, Result};
use crate::exec::{fold_terms, for_each_split, weighted_bounds};
use crate::formats::{validate, DenseView, SparseOperand};
use crate::runtime::{get_cnr_property, ExecutionPolicy, OperationKind, OperationState, Reduction};
use crate::scalar::{Scalar, SpIndex};

/// SDDMM: for every stored position `(i, j)` of `C`, `C(i, j) = sum_t X(i, t) * Y(t, j)`.
///
/// The pattern of `C` is the mask: its structure is never written and the
/// old values are never read.
pub fn sampled_multiply<T, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    x: &DenseView<'_, T>,
    y: &DenseView<'_, T>,
    c: &mut impl SparseTarget<T, I, O>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::SampledMultiply)?;
    let chunked = policy.reduction(get_cnr_property()) == Reduction::FixedChunks;
    let (structure, values, prevalidated) = c.target();
    let view = structure.as_ref();
    if !prevalidated {
        validate(view).into_result()?;
    }
    check_shapes(x, y, view.nrows(), view.ncols())?;
    let values = values?;
    let (s, row_major) = stored(view);
    let bounds = weighted_bounds(s.nmajor, policy.threads(), |m| s.start(m) + m);
    let cuts: Vec<usize> = bounds.iter().map(|&m| s.start(m)).collect();
    let inner = x.ncols();
    for_each_split(&bounds, values, &cuts, |majors, chunk| {
        let base = s.start(majors.start);
        for m in majors {
            for k in s.range(m) {
                let (i, j) = if row_major { (m, s.minor(k)) } else { (s.minor(k), m) };
                chunk[k - base] = fold_terms(inner, chunked, |t| x.get(i, t) * y.get(t, j))
                    .unwrap_or_else(T::zero);
            }
        }
    });
    Ok(())
}

/// Optional inspection; validates operands and advances the state.
pub fn sampled_multiply_inspect<T, I, O>(
    _policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    x: &DenseView<'_, T>,
    y: &DenseView<'_, T>,
    c: impl SparseOperand<T, I, O>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::SampledMultiply)?;
    let op = c.operand();
    ensure_valid(&op)?;
    check_shapes(x, y, op.view.nrows(), op.view.ncols())?;
    mark_inspected(state, OperationKind::SampledMultiply)
}

fn check_shapes<T: Scalar>(x: &DenseView<'_, T>, y: &DenseView<'_, T>, m: usize, n: usize) -> Result<()> {
    if x.nrows() != m || y.ncols() != n || x.ncols() != y.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "X is {}x{}, Y is {}x{}, C is {m}x{n}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{CooView, CscView, CsrView, DenseLayout, IsoValue};
    use crate::runtime::make_handle;

    fn st() -> OperationState<f64> {
        OperationState::new(OperationKind::SampledMultiply)
    }

    const EYE3: [f64; 9] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];

    #[test]
    fn identity_product_on_diagonal() {
        let x = DenseView::matrix(3, 3, DenseLayout::RowMajor, &EYE3).unwrap();
        let mut vals = [f64::NAN; 3];
        let mut c = CsrView::new(3, 3, 3, &[0usize, 1, 2, 3], &[0usize, 1, 2], &mut vals[..]);
        sampled_multiply(&ExecutionPolicy::sequential(), &mut st(), &x, &x, &mut c).unwrap();
        assert_eq!(vals, [1.0; 3]);
    }

    #[test]
    fn empty_mask_is_noop() {
        let x = DenseView::matrix(3, 3, DenseLayout::RowMajor, &EYE3).unwrap();
        let mut vals: [f64; 0] = [];
        let mut c = CsrView::new(3, 3, 0, &[0usize; 4], &[] as &[usize], &mut vals[..]);
        sampled_multiply(&ExecutionPolicy::sequential(), &mut st(), &x, &x, &mut c).unwrap();
    }

    #[test]
    fn formats_agree() {
        // X 2x3, Y 3x2
        let xd = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x = DenseView::matrix(2, 3, DenseLayout::RowMajor, &xd).unwrap();
        let y = DenseView::matrix(3, 2, DenseLayout::ColMajor, &xd).unwrap();
        // full product [[14, 32], [32, 77]], mask {(0,1), (1,0), (1,1)}
        let mut a = [0.0; 3];
        let mut csr = CsrView::new(2, 2, 3, &[0usize, 1, 3], &[1usize, 0, 1], &mut a[..]);
        sampled_multiply(&ExecutionPolicy::parallel(2), &mut st(), &x, &y, &mut csr).unwrap();
        assert_eq!(a, [32.0, 32.0, 77.0]);
        let mut b = [0.0; 3];
        let mut csc = CscView::new(2, 2, 3, &[0usize, 1, 3], &[1usize, 0, 1], &mut b[..]);
        sampled_multiply(&ExecutionPolicy::sequential(), &mut st(), &x, &y, &mut csc).unwrap();
        assert_eq!(b, [32.0, 32.0, 77.0]);
        let mut c = [0.0; 3];
        let mut coo = CooView::new(2, 2, 3, &[0usize, 1, 1], &[1usize, 0, 1], &mut c[..]);
        sampled_multiply::<f64, usize, usize>(&ExecutionPolicy::sequential(), &mut st(), &x, &y, &mut coo).unwrap();
        assert_eq!(c, [32.0, 32.0, 77.0]);
        let mut d = [0.0; 3];
        let mut h = make_handle(CsrView::new(2, 2, 3, &[0usize, 1, 3], &[1usize, 0, 1], &mut d[..]), None).unwrap();
        let mut s = st();
        sampled_multiply_inspect(&ExecutionPolicy::sequential(), &mut s, &x, &y, &h).unwrap();
        sampled_multiply(&ExecutionPolicy::sequential(), &mut s, &x, &y, &mut h).unwrap();
        drop(h);
        assert_eq!(d, [32.0, 32.0, 77.0]);
    }

    #[test]
    fn errors() {
        let x = DenseView::matrix(3, 3, DenseLayout::RowMajor, &EYE3).unwrap();
        let mut c = CsrView::new(3, 3, 1, &[0usize, 1, 1, 1], &[0usize], IsoValue::new(1.0, 1));
        assert_eq!(
            sampled_multiply(&ExecutionPolicy::sequential(), &mut st(), &x, &x, &mut c),
            Err(Error::ReadOnlyValues)
        );
        let mut v = [0.0];
        let mut c = CsrView::new(2, 3, 1, &[0usize, 1, 1], &[0usize], &mut v[..]);
        assert!(matches!(
            sampled_multiply(&ExecutionPolicy::sequential(), &mut st(), &x, &x, &mut c),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
