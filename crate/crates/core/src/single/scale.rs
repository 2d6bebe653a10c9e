use super::SparseTarget;
use crate::error::Result;
use crate::exec::{even_bounds, for_each_split};
use crate::formats::validate;
use crate::runtime::{ExecutionPolicy, OperationKind, OperationState};
use crate::scalar::{Scalar, SpIndex};

/// `A := alpha * A`, in place on the stored values.
///
/// The pattern never changes: entries that become zero stay stored.
pub fn scale<T, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    alpha: T,
    a: &mut impl SparseTarget<T, I, O>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::Scale)?;
    let (structure, values, prevalidated) = a.target();
    if !prevalidated {
        validate(structure.as_ref()).into_result()?;
    }
    let values = values?;
    if alpha == T::one() {
        return Ok(());
    }
    let bounds = even_bounds(values.len(), policy.threads());
    let cuts = bounds.clone();
    for_each_split(&bounds, values, &cuts, |_, chunk| {
        for v in chunk {
            *v = alpha * *v;
        }
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::formats::{CsrView, IsoValue};
    use crate::runtime::make_handle;

    fn st() -> OperationState<f64> {
        OperationState::new(OperationKind::Scale)
    }

    #[test]
    fn powers_of_two_exact() {
        let mut vals = [1.0, -3.0, 0.5];
        let mut a = CsrView::new(2, 2, 3, &[0usize, 2, 3], &[0usize, 1, 1], &mut vals[..]);
        scale(&ExecutionPolicy::sequential(), &mut st(), 2.0, &mut a).unwrap();
        assert_eq!(vals, [2.0, -6.0, 1.0]);
    }

    #[test]
    fn zero_keeps_pattern() {
        let mut vals = [1.0, f64::MAX, -7.0];
        let mut a = CsrView::new(2, 2, 3, &[0usize, 2, 3], &[0usize, 1, 1], &mut vals[..]);
        scale(&ExecutionPolicy::sequential(), &mut st(), 0.0, &mut a).unwrap();
        assert_eq!(a.nnz(), 3);
        assert!(vals.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn identity_scalar_bitwise() {
        let orig = [f64::NAN, -0.0, 1e-310];
        let mut vals = orig;
        let mut a = CsrView::new(1, 3, 3, &[0usize, 3], &[0usize, 1, 2], &mut vals[..]);
        scale(&ExecutionPolicy::parallel(3), &mut st(), 1.0, &mut a).unwrap();
        for (x, y) in vals.iter().zip(orig.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn iso_and_borrowed_are_read_only() {
        let mut a = CsrView::new(1, 1, 1, &[0usize, 1], &[0usize], IsoValue::new(1.0, 1));
        assert_eq!(
            scale(&ExecutionPolicy::sequential(), &mut st(), 2.0, &mut a),
            Err(Error::ReadOnlyValues)
        );
        let vals = [1.0];
        let mut b = CsrView::new(1, 1, 1, &[0usize, 1], &[0usize], &vals);
        assert_eq!(
            scale(&ExecutionPolicy::sequential(), &mut st(), 2.0, &mut b),
            Err(Error::ReadOnlyValues)
        );
    }

    #[test]
    fn scale_through_handle() {
        let mut vals = [1.0, 2.0];
        let view = CsrView::new(2, 2, 2, &[0usize, 1, 2], &[0usize, 1], &mut vals[..]);
        let mut h = make_handle(view, None).unwrap();
        scale(&ExecutionPolicy::parallel(2), &mut st(), -4.0, &mut h).unwrap();
        drop(h);
        assert_eq!(vals, [-4.0, -8.0]);
    }

    #[test]
    fn invalid_view_rejected() {
        let mut vals = [1.0, 2.0];
        let mut a = CsrView::new(2, 2, 2, &[0usize, 2, 1], &[0usize, 1], &mut vals[..]);
        assert!(matches!(
            scale(&ExecutionPolicy::sequential(), &mut st(), 2.0, &mut a),
            Err(Error::InvalidView(_))
        ));
    }
}
