use super::{mark_inspected, row_counts};
use crate::access::{ensure_valid, rows_of};
use crate::error::{Error, Result};
use crate::exec::{fold_terms, map_ranges, weighted_bounds};
use crate::formats::{DenseView, Operand, Scaled, SparseOperand};
use crate::runtime::{
    get_cnr_property, ExecutionPolicy, OperationKind, OperationState, Reduction, ResBuf,
};
use crate::scalar::{Scalar, SpIndex};

/// The `beta * D` term of `Y = alpha * op(A) * X + beta * D`.
#[derive(Debug)]
pub enum Addend<'d, T> {
    None,
    /// `D` is the output itself (old contents of `Y`).
    Output(T),
    Other(T, &'d DenseView<'d, T>),
}

/// Anything usable as the `D` operand of [`multiply_add`].
pub trait DenseAddend<T: Scalar> {
    fn addend(&self) -> Addend<'_, T>;
}

impl<T: Scalar> DenseAddend<T> for () {
    fn addend(&self) -> Addend<'_, T> {
        Addend::None
    }
}

impl<'a, T: Scalar> DenseAddend<T> for DenseView<'a, T> {
    fn addend(&self) -> Addend<'_, T> {
        Addend::Other(T::one(), self)
    }
}

impl<T: Scalar, X: DenseAddend<T> + ?Sized> DenseAddend<T> for &X {
    fn addend(&self) -> Addend<'_, T> {
        (**self).addend()
    }
}

impl<T: Scalar, V: DenseAddend<T>> DenseAddend<T> for Scaled<T, V> {
    fn addend(&self) -> Addend<'_, T> {
        match self.inner.addend() {
            Addend::None => Addend::None,
            Addend::Output(b) => Addend::Output(self.alpha * b),
            Addend::Other(b, d) => Addend::Other(self.alpha * b, d),
        }
    }
}

/// `beta * Y` where `Y` is the output of the same call.
#[derive(Debug, Clone, Copy)]
pub struct ScaledOutput<T> {
    pub beta: T,
}

pub fn scaled_output<T>(beta: T) -> ScaledOutput<T> {
    ScaledOutput { beta }
}

impl<T: Scalar> DenseAddend<T> for ScaledOutput<T> {
    fn addend(&self) -> Addend<'_, T> {
        Addend::Output(self.beta)
    }
}

/// `Y = op(A) * X` (SpMV when `X` and `Y` are vectors, SpMM otherwise).
pub fn multiply<T, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
    x: &DenseView<'_, T>,
    y: &mut DenseView<'_, T>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    multiply_add(policy, state, a, x, (), y)
}

/// `Y = alpha * op(A) * X + beta * D`.
///
/// `alpha` comes from [`scaled`](crate::formats::scaled) around `A`; `D` is
/// `()`, a dense view, `scaled(beta, &d)` or [`scaled_output`]`(beta)` for
/// `D = Y`. With `alpha == 0` no element of `A` or `X` is read; with
/// `beta == 0` no element of `D` is read. Each output element sums its row's
/// stored terms in stored column order; rows without stored terms contribute
/// nothing, so values of `X` facing implicit zeros never reach `Y`.
pub fn multiply_add<T, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
    x: &DenseView<'_, T>,
    d: impl DenseAddend<T>,
    y: &mut DenseView<'_, T>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::Multiply)?;
    let op = a.operand();
    ensure_valid(&op)?;
    let addend = d.addend();
    check_shapes(&op, x, y.nrows(), y.ncols(), &addend)?;
    let chunked = policy.reduction(get_cnr_property()) == Reduction::FixedChunks;

    let (m, n) = (y.nrows(), y.ncols());
    let alpha = op.alpha;
    let beta = match addend {
        Addend::None => T::zero(),
        Addend::Output(b) | Addend::Other(b, _) => b,
    };
    let use_a = !alpha.is_zero();
    let use_d = !beta.is_zero() && !matches!(addend, Addend::None);
    let r = use_a.then(|| rows_of(&op));
    let bounds = match &r {
        Some(r) => weighted_bounds(m, policy.threads(), |i| r.start(i) + i),
        None => weighted_bounds(m, policy.threads(), |i| i),
    };

    let old: &DenseView<'_, T> = y;
    let parts = map_ranges(&bounds, |rows| {
        let mut out = Vec::with_capacity(rows.len() * n);
        for i in rows {
            let range = r.as_ref().map(|r| (r, r.range(i)));
            for c in 0..n {
                let prod = range.as_ref().and_then(|(r, range)| {
                    let base = range.start;
                    fold_terms(range.len(), chunked, |t| {
                        let k = base + t;
                        r.value(k) * x.get(r.minor(k), c)
                    })
                    .map(|s| if alpha == T::one() { s } else { alpha * s })
                });
                let dterm = if use_d {
                    let dv = match addend {
                        Addend::Output(_) => old.get(i, c),
                        Addend::Other(_, dv) => dv.get(i, c),
                        Addend::None => unreachable!(),
                    };
                    Some(if beta == T::one() { dv } else { beta * dv })
                } else {
                    None
                };
                out.push(match (prod, dterm) {
                    (Some(p), Some(q)) => p + q,
                    (Some(p), None) => p,
                    (None, Some(q)) => q,
                    (None, None) => T::zero(),
                });
            }
        }
        out
    });

    let (rs, cs) = y.strides();
    let data = y.as_mut_slice()?;
    for (part, w) in parts.iter().zip(bounds.windows(2)) {
        for (off, i) in (w[0]..w[1]).enumerate() {
            for c in 0..n {
                data[i * rs + c * cs] = part[off * n + c];
            }
        }
    }
    Ok(())
}

/// Optional inspection. For a handle operand this caches per-row entry
/// counts in the handle; a plain view only advances the state.
pub fn multiply_inspect<T, I, O>(
    _policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    a: impl SparseOperand<T, I, O>,
    x: &DenseView<'_, T>,
    y: &DenseView<'_, T>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::Multiply)?;
    let op = a.operand();
    ensure_valid(&op)?;
    check_shapes(&op, x, y.nrows(), y.ncols(), &Addend::None)?;
    if let Some(store) = op.handle {
        let mut data = store.lock();
        if data.row_counts.is_none() {
            let counts = row_counts(op.view);
            data.row_counts = Some(ResBuf::from_slice(store.resource(), &counts));
        }
    }
    mark_inspected(state, OperationKind::Multiply)
}

fn check_shapes<T: Scalar, I: SpIndex, O: SpIndex>(
    op: &Operand<'_, T, I, O>,
    x: &DenseView<'_, T>,
    ym: usize,
    yn: usize,
    addend: &Addend<'_, T>,
) -> Result<()> {
    let (m, k) = (op.nrows(), op.ncols());
    if x.nrows() != k || ym != m || x.ncols() != yn {
        return Err(Error::ShapeMismatch(format!(
            "op(A) is {m}x{k}, X is {}x{}, Y is {ym}x{yn}",
            x.nrows(),
            x.ncols()
        )));
    }
    if let Addend::Other(_, d) = addend {
        if (d.nrows(), d.ncols()) != (ym, yn) {
            return Err(Error::ShapeMismatch(format!(
                "D is {}x{}, Y is {ym}x{yn}",
                d.nrows(),
                d.ncols()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{scaled, transposed, CooView, CscView, CsrView, DenseLayout, IsoValue};
    use crate::runtime::make_handle;
    use num_complex::Complex64;

    fn st<T: Scalar>() -> OperationState<T> {
        OperationState::new(OperationKind::Multiply)
    }

    fn seq() -> ExecutionPolicy {
        ExecutionPolicy::sequential()
    }

    // [[1, 0, 2], [0, 3, 0]]
    fn a_csr() -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        (vec![0, 2, 3], vec![0, 2, 1], vec![1.0, 2.0, 3.0])
    }

    #[test]
    fn identity_copies_bitwise() {
        let x = [f64::MIN_POSITIVE, -0.0, 7.25];
        let mut y = [0.0; 3];
        let a = CsrView::new(3, 3, 3, &[0usize, 1, 2, 3], &[0usize, 1, 2], IsoValue::new(1.0, 3));
        multiply(&seq(), &mut st(), &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y)).unwrap();
        for (p, q) in x.iter().zip(y.iter()) {
            assert_eq!(p.to_bits(), q.to_bits());
        }
    }

    #[test]
    fn small_spmv_all_formats() {
        let (ro, ci, v) = a_csr();
        let csr = CsrView::new(2, 3, 3, &ro, &ci, &v);
        let csc = CscView::new(2, 3, 3, &[0usize, 1, 2, 3], &[0usize, 1, 0], &[1.0, 3.0, 2.0]);
        let coo = CooView::new(2, 3, 3, &[0usize, 0, 1], &[0usize, 2, 1], &v);
        let x = [1.0, 10.0, 100.0];
        for k in 0..3 {
            let mut y = [0.0; 2];
            let yv = &mut DenseView::vector_mut(&mut y);
            let xv = &DenseView::vector(&x);
            match k {
                0 => multiply(&seq(), &mut st(), &csr, xv, yv),
                1 => multiply(&seq(), &mut st(), &csc, xv, yv),
                _ => multiply::<f64, usize, usize>(&seq(), &mut st(), &coo, xv, yv),
            }
            .unwrap();
            assert_eq!(y, [201.0, 30.0]);
        }
    }

    #[test]
    fn transpose_and_scaling() {
        let (ro, ci, v) = a_csr();
        let a = CsrView::new(2, 3, 3, &ro, &ci, &v);
        let x = [1.0, 2.0];
        let mut y = [0.0; 3];
        multiply(&seq(), &mut st(), scaled(2.0, transposed(&a, false)), &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y)).unwrap();
        assert_eq!(y, [2.0, 12.0, 4.0]);
    }

    #[test]
    fn alpha_zero_never_reads_a_or_x() {
        let nan = [f64::NAN; 3];
        let a = CsrView::new(2, 3, 3, &[0usize, 2, 3], &[0usize, 2, 1], &nan);
        let x = [f64::NAN; 3];
        let mut y = [1.0, 2.0];
        let mut yv = DenseView::vector_mut(&mut y);
        multiply_add(&seq(), &mut st(), scaled(0.0, &a), &DenseView::vector(&x), scaled_output(1.0), &mut yv).unwrap();
        assert_eq!(y, [1.0, 2.0]);
    }

    #[test]
    fn beta_zero_never_reads_d() {
        let (ro, ci, v) = a_csr();
        let a = CsrView::new(2, 3, 3, &ro, &ci, &v);
        let x = [1.0, 1.0, 1.0];
        let mut y = [f64::NAN, f64::INFINITY];
        multiply_add(&seq(), &mut st(), &a, &DenseView::vector(&x), scaled_output(0.0), &mut DenseView::vector_mut(&mut y)).unwrap();
        assert_eq!(y, [3.0, 3.0]);
        let mut y = [f64::NAN, f64::NAN];
        multiply_add(&seq(), &mut st(), scaled(0.0, &a), &DenseView::vector(&x), scaled_output(0.0), &mut DenseView::vector_mut(&mut y)).unwrap();
        assert_eq!(y, [0.0, 0.0]);
    }

    #[test]
    fn implicit_zero_column_blocks_nan() {
        let (ro, ci, v) = a_csr();
        let a = CsrView::new(2, 3, 3, &ro, &ci, &v);
        // row 1 has no entry in column 0
        let x = [f64::NAN, 1.0, 1.0];
        let mut y = [0.0; 2];
        multiply(&seq(), &mut st(), &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y)).unwrap();
        assert!(y[0].is_nan());
        assert_eq!(y[1], 3.0);
    }

    #[test]
    fn explicit_zero_meets_inf() {
        let a = CsrView::new(1, 2, 2, &[0usize, 2], &[0usize, 1], &[0.0, 1.0]);
        let x = [f64::INFINITY, 1.0];
        let mut y = [0.0];
        multiply(&seq(), &mut st(), &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y)).unwrap();
        assert!(y[0].is_nan());
    }

    #[test]
    fn spmm_layouts_and_d() {
        let (ro, ci, v) = a_csr();
        let a = CsrView::new(2, 3, 3, &ro, &ci, &v);
        // X 3x2 col-major: [[1,4],[2,5],[3,6]]
        let xd = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x = DenseView::matrix(3, 2, DenseLayout::ColMajor, &xd).unwrap();
        let dd = [1.0, 1.0, 1.0, 1.0];
        let d = DenseView::matrix(2, 2, DenseLayout::RowMajor, &dd).unwrap();
        let mut yd = [0.0; 4];
        let mut y = DenseView::matrix_mut(2, 2, DenseLayout::RowMajor, &mut yd).unwrap();
        multiply_add(&seq(), &mut st(), &a, &x, scaled(10.0, &d), &mut y).unwrap();
        assert_eq!(yd, [17.0, 26.0, 16.0, 25.0]);
    }

    #[test]
    fn shape_and_readonly_errors() {
        let (ro, ci, v) = a_csr();
        let a = CsrView::new(2, 3, 3, &ro, &ci, &v);
        let x = [1.0; 2];
        let mut y = [0.0; 2];
        assert!(matches!(
            multiply(&seq(), &mut st(), &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y)),
            Err(Error::ShapeMismatch(_))
        ));
        let x = [1.0; 3];
        let y = [0.0; 2];
        let yv = &mut DenseView::vector(&y);
        assert_eq!(multiply(&seq(), &mut st(), &a, &DenseView::vector(&x), yv), Err(Error::ReadOnlyValues));
    }

    #[test]
    fn handle_and_inspect_transparent() {
        let (_, ci, v) = a_csr();
        let a = CooView::new(2, 3, 3, &[0usize, 0, 1], &ci, &v);
        let x = [0.1, 0.2, 0.3];
        let mut y0 = [0.0; 2];
        multiply::<f64, usize, usize>(&seq(), &mut st(), &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y0)).unwrap();
        let h = make_handle::<f64, usize, usize>(CooView::new(2, 3, 3, &[0usize, 0, 1], &ci, &v), None).unwrap();
        let mut s = st();
        let y1v = [0.0; 2];
        multiply_inspect(&seq(), &mut s, &h, &DenseView::vector(&x), &DenseView::vector(&y1v)).unwrap();
        multiply_inspect(&seq(), &mut s, &h, &DenseView::vector(&x), &DenseView::vector(&y1v)).unwrap();
        assert!(h.store().summary().row_counts);
        let mut y1 = [0.0; 2];
        multiply(&seq(), &mut s, &h, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y1)).unwrap();
        assert_eq!(y0.map(f64::to_bits), y1.map(f64::to_bits));
    }

    #[test]
    fn conjugate_transpose_complex() {
        let i = Complex64::new(0.0, 1.0);
        let vals = [i];
        let a = CsrView::new(1, 2, 1, &[0usize, 1], &[1usize], &vals);
        let x = [Complex64::new(1.0, 0.0)];
        let mut y = [Complex64::new(0.0, 0.0); 2];
        multiply(&seq(), &mut st(), transposed(&a, true), &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y)).unwrap();
        assert_eq!(y[1], -i);
    }

    #[test]
    fn parallel_matches_sequential() {
        let n = 200;
        let pat: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut r = vec![i / 2, (i + 7) % n, (i * 13) % n];
                r.sort();
                r.dedup();
                r
            })
            .collect();
        let ro: Vec<usize> = std::iter::once(0)
            .chain(pat.iter().scan(0, |s, r| {
                *s += r.len();
                Some(*s)
            }))
            .collect();
        let ci: Vec<usize> = pat.concat();
        let v: Vec<f64> = (0..ci.len()).map(|k| 1.0 / (k as f64 + 3.0)).collect();
        let a = CsrView::new(n, n, ci.len(), &ro, &ci, &v);
        let x: Vec<f64> = (0..n).map(|k| (k as f64).sin()).collect();
        let mut y0 = vec![0.0; n];
        multiply(&seq(), &mut st(), &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y0)).unwrap();
        for t in [2, 3, 8] {
            let mut y = vec![0.0; n];
            multiply(&ExecutionPolicy::parallel(t), &mut st(), &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y)).unwrap();
            assert_eq!(y, y0);
        }
    }
}
