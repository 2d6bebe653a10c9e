use super::mark_inspected;
use crate::access::{ensure_valid, rows_of, Compressed};
use crate::error::{Error, Result};
use crate::exec::{even_bounds, map_ranges};
use crate::formats::{DenseView, Operand, SparseOperand};
use crate::runtime::{
    ExecutionMode, ExecutionPolicy, LevelSchedule, OperationKind, OperationState, ResBuf,
};
use crate::scalar::{Scalar, SpIndex};

/// Solves `op(T) x = b` for a triangular `T`.
///
/// Whether `op(T)` is lower or upper triangular is read off the stored
/// pattern; a purely diagonal matrix is both. Every diagonal entry must be
/// stored and nonzero. Row `i` computes `b(i)` minus its off-diagonal terms
/// in stored order, then divides by the diagonal. Under a parallel policy,
/// rows are grouped into dependency levels (cached in the handle by
/// [`triangular_solve_inspect`]); each row still performs the same
/// operations, so every policy gives the same bits.
pub fn triangular_solve<T, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    t: impl SparseOperand<T, I, O>,
    b: &DenseView<'_, T>,
    x: &mut DenseView<'_, T>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::TriangularSolve)?;
    let op = t.operand();
    ensure_valid(&op)?;
    check_shapes(&op, b, x)?;
    let r = rows_of(&op);
    let lower = orientation(&r)?;
    let diag = diagonal_positions(&r)?;
    let alpha = op.alpha;
    let unit_alpha = alpha == T::one();
    let coef = |k: usize| {
        let v = r.value(k);
        if unit_alpha {
            v
        } else {
            alpha * v
        }
    };
    for (i, &k) in diag.iter().enumerate() {
        if coef(k).is_zero() {
            return Err(Error::ZeroDiagonal { row: i });
        }
    }
    let n = r.nmajor;
    let rhs = b.as_slice().to_vec();
    let row = |i: usize, sol: &[T]| {
        let mut s = rhs[i];
        for k in r.range(i) {
            if k != diag[i] {
                s = s - coef(k) * sol[r.minor(k)];
            }
        }
        s / coef(diag[i])
    };

    let mut sol = vec![T::zero(); n];
    let threads = policy.threads();
    if matches!(policy.mode(), ExecutionMode::Sequential) || threads == 1 {
        if lower {
            for i in 0..n {
                sol[i] = row(i, &sol);
            }
        } else {
            for i in (0..n).rev() {
                sol[i] = row(i, &sol);
            }
        }
    } else {
        let cached = op.handle.and_then(|h| {
            let d = h.lock();
            d.levels
                .as_ref()
                .filter(|l| l.transposed == op.transpose && l.lower == lower)
                .map(|l| (l.rows.to_vec(), l.level_offsets.to_vec()))
        });
        let (order, offsets) = cached.unwrap_or_else(|| levels(&r, lower));
        for w in offsets.windows(2) {
            let level = &order[w[0]..w[1]];
            let bounds = even_bounds(level.len(), threads);
            let parts = map_ranges(&bounds, |span| {
                span.map(|p| row(level[p], &sol)).collect::<Vec<T>>()
            });
            for (p, v) in parts.into_iter().flatten().enumerate() {
                sol[level[p]] = v;
            }
        }
    }
    let (rs, _) = x.strides();
    let out = x.as_mut_slice()?;
    for (i, v) in sol.into_iter().enumerate() {
        out[i * rs] = v;
    }
    Ok(())
}

/// Optional inspection: checks the pattern and, for a handle, caches the
/// level schedule used by parallel policies.
pub fn triangular_solve_inspect<T, I, O>(
    _policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    t: impl SparseOperand<T, I, O>,
    b: &DenseView<'_, T>,
    x: &DenseView<'_, T>,
) -> Result<()>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    state.check_kind(OperationKind::TriangularSolve)?;
    let op = t.operand();
    ensure_valid(&op)?;
    check_shapes(&op, b, x)?;
    if let Some(store) = op.handle {
        let r = rows_of(&op);
        let lower = orientation(&r)?;
        diagonal_positions(&r)?;
        let mut data = store.lock();
        let fresh = data
            .levels
            .as_ref()
            .is_none_or(|l| l.transposed != op.transpose || l.lower != lower);
        if fresh {
            let (rows, offsets) = levels(&r, lower);
            data.levels = Some(LevelSchedule {
                lower,
                rows: ResBuf::from_slice(store.resource(), &rows),
                level_offsets: ResBuf::from_slice(store.resource(), &offsets),
                transposed: op.transpose,
            });
        }
    }
    mark_inspected(state, OperationKind::TriangularSolve)
}

fn check_shapes<T: Scalar, I: SpIndex, O: SpIndex>(
    op: &Operand<'_, T, I, O>,
    b: &DenseView<'_, T>,
    x: &DenseView<'_, T>,
) -> Result<()> {
    let n = op.nrows();
    if op.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "triangular matrix must be square, got {n}x{}",
            op.ncols()
        )));
    }
    if (b.nrows(), b.ncols()) != (n, 1) || (x.nrows(), x.ncols()) != (n, 1) {
        return Err(Error::ShapeMismatch(format!(
            "b is {}x{}, x is {}x{}, expected {n}x1",
            b.nrows(),
            b.ncols(),
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(())
}

/// True for lower, false for upper. Fails on the first entry (in row-major
/// order) that contradicts the orientation of the first off-diagonal entry.
fn orientation<T: Scalar, I: SpIndex, O: SpIndex>(r: &Compressed<'_, T, I, O>) -> Result<bool> {
    let mut lower = None;
    for i in 0..r.nmajor {
        for k in r.range(i) {
            let j = r.minor(k);
            if j == i {
                continue;
            }
            match lower {
                None => lower = Some(j < i),
                Some(l) if l != (j < i) => return Err(Error::NotTriangular { row: i, col: j }),
                _ => {}
            }
        }
    }
    Ok(lower.unwrap_or(true))
}

/// Storage position of each row's diagonal entry.
fn diagonal_positions<T: Scalar, I: SpIndex, O: SpIndex>(
    r: &Compressed<'_, T, I, O>,
) -> Result<Vec<usize>> {
    (0..r.nmajor)
        .map(|i| {
            r.range(i)
                .find(|&k| r.minor(k) == i)
                .ok_or(Error::MissingDiagonal { row: i })
        })
        .collect()
}

/// Rows ordered by dependency level, plus level offsets.
fn levels<T: Scalar, I: SpIndex, O: SpIndex>(
    r: &Compressed<'_, T, I, O>,
    lower: bool,
) -> (Vec<usize>, Vec<usize>) {
    let n = r.nmajor;
    let mut level = vec![0usize; n];
    let order: Box<dyn Iterator<Item = usize>> = if lower {
        Box::new(0..n)
    } else {
        Box::new((0..n).rev())
    };
    let mut depth = 0;
    for i in order {
        let l = r
            .range(i)
            .map(|k| r.minor(k))
            .filter(|&j| j != i)
            .map(|j| level[j] + 1)
            .max()
            .unwrap_or(0);
        level[i] = l;
        depth = depth.max(l + 1);
    }
    let mut offsets = vec![0usize; depth + 1];
    for &l in &level {
        offsets[l + 1] += 1;
    }
    for d in 0..depth {
        offsets[d + 1] += offsets[d];
    }
    let mut next = offsets.clone();
    let mut rows = vec![0usize; n];
    for (i, &l) in level.iter().enumerate() {
        rows[next[l]] = i;
        next[l] += 1;
    }
    (rows, offsets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{scaled, transposed, CscView, CsrView, IsoValue};
    use crate::runtime::make_handle;

    fn st() -> OperationState<f64> {
        OperationState::new(OperationKind::TriangularSolve)
    }

    fn solve<A: SparseOperand<f64>>(p: &ExecutionPolicy, a: A, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; b.len()];
        triangular_solve(p, &mut st(), a, &DenseView::vector(b), &mut DenseView::vector_mut(&mut x))?;
        Ok(x)
    }

    #[test]
    fn diagonal_system() {
        let ro: Vec<usize> = (0..=3).collect();
        let a = CsrView::new(3, 3, 3, &ro, &[0usize, 1, 2], IsoValue::new(2.0, 3));
        let x = solve(&ExecutionPolicy::sequential(), &a, &[2.0, -4.0, 1.0]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn hand_lower_and_transposed_upper() {
        // [[1, 0], [1, 1]]
        let a = CsrView::new(2, 2, 3, &[0usize, 1, 3], &[0usize, 0, 1], &[1.0, 1.0, 1.0]);
        let x = solve(&ExecutionPolicy::sequential(), &a, &[1.0, 2.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
        // op = [[1, 1], [0, 1]]
        let x = solve(&ExecutionPolicy::sequential(), transposed(&a, false), &[2.0, 1.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
        let x = solve(&ExecutionPolicy::sequential(), scaled(2.0, &a), &[2.0, 4.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
    }

    #[test]
    fn errors() {
        let seq = ExecutionPolicy::sequential();
        let missing = CsrView::new(2, 2, 2, &[0usize, 1, 2], &[0usize, 0], &[1.0, 1.0]);
        assert_eq!(solve(&seq, &missing, &[1.0, 1.0]), Err(Error::MissingDiagonal { row: 1 }));
        let zero = CsrView::new(2, 2, 2, &[0usize, 1, 2], &[0usize, 1], &[1.0, 0.0]);
        assert_eq!(solve(&seq, &zero, &[1.0, 1.0]), Err(Error::ZeroDiagonal { row: 1 }));
        let full = CsrView::new(2, 2, 4, &[0usize, 2, 4], &[0usize, 1, 0, 1], &[1.0; 4]);
        assert_eq!(solve(&seq, &full, &[1.0, 1.0]), Err(Error::NotTriangular { row: 1, col: 0 }));
        let rect = CsrView::new(1, 2, 1, &[0usize, 1], &[0usize], &[1.0]);
        assert!(matches!(solve(&seq, &rect, &[1.0]), Err(Error::ShapeMismatch(_))));
    }

    fn unit_lower(n: usize) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut ro = vec![0];
        let (mut ci, mut v) = (vec![], vec![]);
        for i in 0..n {
            for j in 0..i {
                if (i * 7 + j * 3) % 5 == 0 {
                    ci.push(j);
                    v.push(((i + j) % 3) as f64 - 1.0);
                }
            }
            ci.push(i);
            v.push(1.0);
            ro.push(ci.len());
        }
        (ro, ci, v)
    }

    #[test]
    fn levels_match_sequential() {
        let n = 40;
        let (ro, ci, v) = unit_lower(n);
        let b: Vec<f64> = (0..n).map(|i| (i % 4) as f64).collect();
        let a = CsrView::new(n, n, ci.len(), &ro, &ci, &v);
        let want = solve(&ExecutionPolicy::sequential(), &a, &b).unwrap();
        for p in [ExecutionPolicy::deterministic_parallel(4), ExecutionPolicy::parallel(3)] {
            assert_eq!(solve(&p, &a, &b).unwrap(), want);
        }
        let h = make_handle(CsrView::new(n, n, ci.len(), &ro, &ci, &v), None).unwrap();
        let bv = DenseView::vector(&b);
        let x0 = vec![0.0; n];
        let mut s = st();
        triangular_solve_inspect(&ExecutionPolicy::sequential(), &mut s, &h, &bv, &DenseView::vector(&x0)).unwrap();
        assert!(h.store().summary().level_count.unwrap() > 1);
        let mut x = vec![0.0; n];
        triangular_solve(&ExecutionPolicy::deterministic_parallel(4), &mut s, &h, &bv, &mut DenseView::vector_mut(&mut x)).unwrap();
        assert_eq!(x, want);
        // upper through CSC storage of the same data read as its transpose
        let c = CscView::new(n, n, ci.len(), &ro, &ci, &v);
        let up = solve(&ExecutionPolicy::deterministic_parallel(2), &c, &b).unwrap();
        assert_eq!(up, solve(&ExecutionPolicy::sequential(), transposed(&a, false), &b).unwrap());
    }
}
