use crate::access::{ensure_valid, rows_of};
use crate::error::{Error, Result};
use crate::exec::{even_bounds, fold_terms, map_ranges, weighted_bounds};
use crate::formats::SparseOperand;
use crate::runtime::{get_cnr_property, ExecutionPolicy, OperationKind, OperationState, Phase, Reduction};
use crate::scalar::{Real, Scalar, SpIndex};

/// `max_i sum_j |op(A)(i, j)|` over stored entries, times `|alpha|`.
///
/// A NaN anywhere in a row sum makes the result NaN. Rows without entries
/// count as 0, and an empty matrix has norm 0.
pub fn matrix_inf_norm<T, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
) -> Result<T::Real>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::InfNorm)?;
    let op = a.operand();
    ensure_valid(&op)?;
    if op.alpha.is_zero() {
        return Ok(<T::Real as Scalar>::zero());
    }
    let chunked = policy.reduction(get_cnr_property()) == Reduction::FixedChunks;
    let r = rows_of(&op);
    let m = r.nmajor;
    let bounds = weighted_bounds(m, policy.threads(), |i| r.start(i) + i);
    let partial = map_ranges(&bounds, |rows| {
        let mut best = <T::Real as Scalar>::zero();
        for i in rows {
            let range = r.range(i);
            let s = fold_terms(range.len(), chunked, |t| r.value(range.start + t).modulus())
                .unwrap_or_else(<T::Real as Scalar>::zero);
            if s.is_nan() {
                return s;
            }
            if s > best {
                best = s;
            }
        }
        best
    });
    let mut best = <T::Real as Scalar>::zero();
    for s in partial {
        if s.is_nan() {
            return Ok(s);
        }
        if s > best {
            best = s;
        }
    }
    Ok(scale_by(op.alpha, best))
}

/// `sqrt(sum |v|^2)` over stored entries, times `|alpha|`.
///
/// The summation grouping follows the policy's reduction (see
/// [`Reduction`]); only `Reduction::ThreadPartitioned` depends on the thread
/// count.
pub fn matrix_frob_norm<T, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
) -> Result<T::Real>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::FrobNorm)?;
    let op = a.operand();
    ensure_valid(&op)?;
    if op.alpha.is_zero() {
        return Ok(<T::Real as Scalar>::zero());
    }
    let vals = op.view.values();
    let nnz = op.view.nnz();
    let sq = |k: usize| vals.get(k).modulus_sqr();
    let sum = match policy.reduction(get_cnr_property()) {
        Reduction::Serial => fold_terms(nnz, false, sq),
        Reduction::FixedChunks => fold_terms(nnz, true, sq),
        Reduction::ThreadPartitioned => {
            let bounds = even_bounds(nnz, policy.threads());
            let parts = map_ranges(&bounds, |r| fold_terms(r.len(), false, |t| sq(r.start + t)));
            parts.into_iter().flatten().reduce(|acc, p| acc + p)
        }
    };
    let sum = sum.unwrap_or_else(<T::Real as Scalar>::zero);
    Ok(scale_by(op.alpha, sum.sqrt()))
}

/// [`matrix_frob_norm`] under the default policy.
pub fn matrix_frob_norm_default<T, I, O>(
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
) -> Result<T::Real>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    matrix_frob_norm(&ExecutionPolicy::default(), state, a)
}

/// Optional inspection for either norm; nothing is cached.
pub fn norm_inspect<T, I, O>(
    _policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let kind = state.kind();
    if kind != OperationKind::InfNorm && kind != OperationKind::FrobNorm {
        return Err(Error::StateKind {
            expected: OperationKind::InfNorm,
            found: kind,
        });
    }
    ensure_valid(&a.operand())?;
    state.set_phase(Phase::Inspected);
    Ok(())
}

fn scale_by<T: Scalar>(alpha: T, norm: T::Real) -> T::Real {
    if alpha == T::one() {
        norm
    } else {
        alpha.modulus() * norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{scaled, transposed, CsrView, IsoValue};
    use crate::runtime::make_handle;
    use num_complex::Complex32;

    fn inf() -> OperationState<f64> {
        OperationState::new(OperationKind::InfNorm)
    }

    fn frob() -> OperationState<f64> {
        OperationState::new(OperationKind::FrobNorm)
    }

    fn seq() -> ExecutionPolicy {
        ExecutionPolicy::sequential()
    }

    #[test]
    fn identity_norms() {
        let ro: Vec<usize> = (0..=4).collect();
        let ci: Vec<usize> = (0..4).collect();
        let a = CsrView::new(4, 4, 4, &ro, &ci, IsoValue::new(1.0, 4));
        assert_eq!(matrix_inf_norm(&seq(), &mut inf(), &a).unwrap(), 1.0);
        assert_eq!(matrix_frob_norm(&seq(), &mut frob(), &a).unwrap(), 2.0);
        assert_eq!(matrix_frob_norm_default(&mut frob(), &a).unwrap(), 2.0);
    }

    #[test]
    fn small_cases() {
        // [[1, -2], [0, 3]]
        let a = CsrView::new(2, 2, 3, &[0usize, 2, 3], &[0usize, 1, 1], &[1.0, -2.0, 3.0]);
        assert_eq!(matrix_inf_norm(&seq(), &mut inf(), &a).unwrap(), 3.0);
        // column sums of op(A) = A^T rows: [1, 5]
        assert_eq!(matrix_inf_norm(&seq(), &mut inf(), transposed(&a, false)).unwrap(), 5.0);
        assert_eq!(matrix_inf_norm(&seq(), &mut inf(), scaled(-2.0, &a)).unwrap(), 6.0);
        let b = CsrView::new(1, 2, 2, &[0usize, 2], &[0usize, 1], &[3.0, 4.0]);
        assert_eq!(matrix_frob_norm(&seq(), &mut frob(), &b).unwrap(), 5.0);
    }

    #[test]
    fn empty_and_nan() {
        let e = CsrView::<f64>::new(3, 3, 0, &[0usize, 0, 0, 0], &[], &[]);
        assert_eq!(matrix_inf_norm(&seq(), &mut inf(), &e).unwrap(), 0.0);
        assert_eq!(matrix_frob_norm(&seq(), &mut frob(), &e).unwrap(), 0.0);
        let a = CsrView::new(2, 2, 2, &[0usize, 1, 2], &[0usize, 1], &[f64::NAN, 5.0]);
        assert!(matrix_inf_norm(&seq(), &mut inf(), &a).unwrap().is_nan());
        assert!(matrix_inf_norm(&ExecutionPolicy::parallel(2), &mut inf(), &a).unwrap().is_nan());
        assert!(matrix_frob_norm(&seq(), &mut frob(), &a).unwrap().is_nan());
    }

    #[test]
    fn complex_modulus() {
        let v = [Complex32::new(3.0, 4.0)];
        let a = CsrView::new(1, 1, 1, &[0usize, 1], &[0usize], &v);
        let mut s = OperationState::<Complex32>::new(OperationKind::InfNorm);
        assert_eq!(matrix_inf_norm(&seq(), &mut s, &a).unwrap(), 5.0f32);
    }

    #[test]
    fn reductions_agree_on_exact_data() {
        let n = 1000;
        let ro = [0usize, n];
        let ci: Vec<usize> = (0..n).collect();
        let v: Vec<f64> = (0..n).map(|k| (k % 7) as f64).collect();
        let a = CsrView::new(1, n, n, &ro, &ci, &v);
        let want = matrix_frob_norm(&seq(), &mut frob(), &a).unwrap();
        for p in [
            ExecutionPolicy::parallel(3),
            ExecutionPolicy::deterministic_parallel(4),
            ExecutionPolicy::sequential().with_reduction(Reduction::FixedChunks),
        ] {
            assert_eq!(matrix_frob_norm(&p, &mut frob(), &a).unwrap(), want);
        }
    }

    #[test]
    fn inspect_kinds_and_handles() {
        let a = CsrView::new(1, 1, 1, &[0usize, 1], &[0usize], &[2.0]);
        let h = make_handle(CsrView::new(1, 1, 1, &[0usize, 1], &[0usize], &[2.0]), None).unwrap();
        let mut s = inf();
        norm_inspect(&seq(), &mut s, &h).unwrap();
        assert_eq!(s.phase(), Phase::Inspected);
        assert_eq!(
            matrix_inf_norm(&seq(), &mut s, &h).unwrap(),
            matrix_inf_norm(&seq(), &mut inf(), &a).unwrap()
        );
        let mut wrong = OperationState::<f64>::new(OperationKind::Scale);
        assert!(norm_inspect(&seq(), &mut wrong, &a).is_err());
    }
}
