//! Phase machine and row-parallel drivers shared by all staged families.

use std::hash::Hasher;

use super::OutputShell;
use crate::access::{hash_structure, new_hasher};
use crate::error::{Error, Result};
use crate::exec::{map_ranges, weighted_bounds};
use crate::formats::Operand;
use crate::runtime::{
    ExecutionPolicy, Fingerprint, OperationKind, OperationState, Phase, ResBuf, Staged,
};
use crate::scalar::{Scalar, SpIndex};

/// One staged operation, seen row by row in row-major output order.
pub(crate) trait Family<T: Scalar>: Sync {
    /// Per-thread scratch space.
    type Scratch;

    fn kind(&self) -> OperationKind;
    fn shape(&self) -> (usize, usize);
    fn fingerprint(&self) -> Fingerprint;
    /// Output pattern depends on values (never reused across computes).
    fn value_dependent(&self) -> bool {
        false
    }
    /// Cumulative work before row `i`, used to balance partitions.
    fn work(&self, i: usize) -> usize {
        i
    }
    /// Start of row `i`'s slice of the accepted-entry mask (masked families).
    fn mask_start(&self, _i: usize) -> usize {
        0
    }
    fn scratch(&self) -> Self::Scratch;
    /// Entries of output row `i`. Masked families also record, in `mask`,
    /// which candidates of the row are accepted.
    fn count_row(&self, i: usize, s: &mut Self::Scratch, mask: &mut [u8]) -> usize;
    /// Appends row `i` in ascending column order; values only when `vals` is given.
    fn fill_row(
        &self,
        i: usize,
        s: &mut Self::Scratch,
        mask: &[u8],
        cols: &mut Vec<usize>,
        vals: Option<&mut Vec<T>>,
    );
}

/// Structural identity of an operand tuple plus family parameters.
pub(crate) fn fingerprint_of<T: Scalar, I: SpIndex, O: SpIndex>(
    kind: OperationKind,
    shape: (usize, usize),
    operands: &[&Operand<'_, T, I, O>],
    extra: u64,
) -> Fingerprint {
    let mut h = new_hasher();
    h.write_u8(kind as u8);
    h.write_usize(shape.0);
    h.write_usize(shape.1);
    h.write_u64(extra);
    for op in operands {
        hash_structure(op, &mut h);
    }
    Fingerprint(h.finish())
}

fn phase_error<T: Scalar>(state: &OperationState<T>, op: &'static str) -> Error {
    Error::Phase {
        op,
        phase: state.phase(),
    }
}

fn admit<T: Scalar>(
    state: &OperationState<T>,
    kind: OperationKind,
    op: &'static str,
    ok: impl Fn(Phase, bool) -> bool,
) -> Result<()> {
    state.check_kind(kind)?;
    if ok(state.phase(), state.is_split()) {
        Ok(())
    } else {
        Err(phase_error(state, op))
    }
}

fn check_shape<T: Scalar, I: SpIndex, O: SpIndex>(
    want: (usize, usize),
    shell: &OutputShell<'_, T, I, O>,
) -> Result<()> {
    if (shell.nrows(), shell.ncols()) == want {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "result is {}x{}, output is {}x{}",
            want.0,
            want.1,
            shell.nrows(),
            shell.ncols()
        )))
    }
}

fn check_fresh<T: Scalar>(state: &OperationState<T>, fp: Fingerprint) -> Result<()> {
    if state.fingerprint() == Some(fp) {
        Ok(())
    } else {
        Err(Error::StaleStructure)
    }
}

fn analyse<T: Scalar, F: Family<T>>(policy: &ExecutionPolicy, f: &F) -> (Vec<usize>, Vec<u8>) {
    let m = f.shape().0;
    let bounds = weighted_bounds(m, policy.threads(), |i| f.work(i));
    let parts = map_ranges(&bounds, |rows| {
        let mut s = f.scratch();
        let base = f.mask_start(rows.start);
        let mut mask = vec![0u8; f.mask_start(rows.end) - base];
        let mut counts = Vec::with_capacity(rows.len());
        for i in rows {
            let seg = &mut mask[f.mask_start(i) - base..f.mask_start(i + 1) - base];
            counts.push(f.count_row(i, &mut s, seg));
        }
        (counts, mask)
    });
    let mut offsets = Vec::with_capacity(m + 1);
    offsets.push(0usize);
    let mut mask = Vec::new();
    for (counts, part) in parts {
        for c in counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        mask.extend_from_slice(&part);
    }
    (offsets, mask)
}

fn build<T: Scalar, F: Family<T>>(
    policy: &ExecutionPolicy,
    f: &F,
    offsets: &[usize],
    mask: &[u8],
    with_values: bool,
) -> (Vec<usize>, Option<Vec<T>>) {
    let m = f.shape().0;
    let bounds = weighted_bounds(m, policy.threads(), |i| f.work(i));
    let masked = !mask.is_empty();
    let parts = map_ranges(&bounds, |rows| {
        let mut s = f.scratch();
        let n = offsets[rows.end] - offsets[rows.start];
        let mut cols = Vec::with_capacity(n);
        let mut vals = with_values.then(|| Vec::with_capacity(n));
        for i in rows.clone() {
            let seg = if masked {
                &mask[f.mask_start(i)..f.mask_start(i + 1)]
            } else {
                &[][..]
            };
            f.fill_row(i, &mut s, seg, &mut cols, vals.as_mut());
            debug_assert_eq!(cols.len(), offsets[i + 1] - offsets[rows.start]);
        }
        (cols, vals)
    });
    let nnz = *offsets.last().unwrap_or(&0);
    let mut cols = Vec::with_capacity(nnz);
    let mut vals = with_values.then(|| Vec::with_capacity(nnz));
    for (c, v) in parts {
        cols.extend_from_slice(&c);
        if let (Some(all), Some(v)) = (vals.as_mut(), v) {
            all.extend_from_slice(&v);
        }
    }
    (cols, vals)
}

fn staged<T: Scalar>(state: &OperationState<T>) -> &Staged<T> {
    state.staged.as_ref().expect("phase implies staged data")
}

/// Optional inspect: allowed before any compute.
pub(crate) fn inspect<T: Scalar>(
    state: &mut OperationState<T>,
    kind: OperationKind,
    check: impl FnOnce() -> Result<()>,
) -> Result<()> {
    admit(state, kind, "inspect", |p, _| p <= Phase::Inspected)?;
    check()?;
    state.set_phase(Phase::Inspected);
    Ok(())
}

/// Structural analysis shared by the fused and symbolic computes.
pub(crate) fn compute<T, F, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    kind: OperationKind,
    split: bool,
    shell: &OutputShell<'_, T, I, O>,
    make: impl FnOnce() -> Result<F>,
) -> Result<()>
where
    T: Scalar,
    F: Family<T>,
    I: SpIndex,
    O: SpIndex,
{
    let op = if split { "symbolic_compute" } else { "compute" };
    admit(state, kind, op, |p, s| match p {
        Phase::Created | Phase::Inspected => true,
        Phase::Computed | Phase::Filled => s == split,
        Phase::SymbolicDone | Phase::NumericDone => split && s,
    })?;
    let f = make()?;
    debug_assert_eq!(f.kind(), kind);
    check_shape(f.shape(), shell)?;
    let fp = f.fingerprint();
    let reusable = !f.value_dependent()
        && state.phase() >= Phase::Computed
        && state.fingerprint() == Some(fp);
    if reusable {
        let st = state.staged.as_mut().expect("computed state");
        st.cols = None;
        st.values = None;
        state.note_reuse();
    } else {
        let (offsets, mask) = analyse(policy, &f);
        let res = state.resource().clone();
        state.staged = Some(Staged {
            fingerprint: fp,
            row_offsets: ResBuf::from_slice(&res, &offsets),
            accepted: (!mask.is_empty() || f.value_dependent())
                .then(|| ResBuf::from_slice(&res, &mask)),
            cols: None,
            values: None,
        });
        state.note_analysis();
    }
    state.set_split(split);
    state.set_phase(Phase::Computed);
    Ok(())
}

/// Fused fill: structure and values.
pub(crate) fn fill<T, F, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    kind: OperationKind,
    shell: &mut OutputShell<'_, T, I, O>,
    make: impl FnOnce() -> Result<F>,
) -> Result<()>
where
    T: Scalar,
    F: Family<T>,
    I: SpIndex,
    O: SpIndex,
{
    admit(state, kind, "fill", |p, s| {
        !s && (p == Phase::Computed || p == Phase::Filled)
    })?;
    let f = make()?;
    check_shape(f.shape(), shell)?;
    check_fresh(state, f.fingerprint())?;
    let st = staged(state);
    let mask = st.accepted.as_deref().unwrap_or(&[]);
    let (cols, vals) = build(policy, &f, &st.row_offsets, mask, true);
    shell.emit(&st.row_offsets, &cols, vals.as_deref(), true)?;
    state.set_phase(Phase::Filled);
    Ok(())
}

/// Writes the structure arrays only; values are never read.
pub(crate) fn symbolic_fill<T, F, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    kind: OperationKind,
    shell: &mut OutputShell<'_, T, I, O>,
    make: impl FnOnce() -> Result<F>,
) -> Result<()>
where
    T: Scalar,
    F: Family<T>,
    I: SpIndex,
    O: SpIndex,
{
    admit(state, kind, "symbolic_fill", |p, s| s && p == Phase::Computed)?;
    let f = make()?;
    check_shape(f.shape(), shell)?;
    check_fresh(state, f.fingerprint())?;
    let st = staged(state);
    let mask = st.accepted.as_deref().unwrap_or(&[]);
    let (cols, _) = build(policy, &f, &st.row_offsets, mask, false);
    shell.emit(&st.row_offsets, &cols, None, true)?;
    state.set_phase(Phase::SymbolicDone);
    Ok(())
}

/// Computes values for the fixed structure and keeps them in the state.
pub(crate) fn numeric_compute<T, F, I, O>(
    policy: &ExecutionPolicy,
    state: &mut OperationState<T>,
    kind: OperationKind,
    shell: &OutputShell<'_, T, I, O>,
    make: impl FnOnce() -> Result<F>,
) -> Result<()>
where
    T: Scalar,
    F: Family<T>,
    I: SpIndex,
    O: SpIndex,
{
    admit(state, kind, "numeric_compute", |p, s| {
        s && matches!(p, Phase::SymbolicDone | Phase::NumericDone | Phase::Filled)
    })?;
    let f = make()?;
    check_shape(f.shape(), shell)?;
    check_fresh(state, f.fingerprint())?;
    let st = staged(state);
    let mask = st.accepted.as_deref().unwrap_or(&[]);
    let (cols, vals) = build(policy, &f, &st.row_offsets, mask, true);
    let res = state.resource().clone();
    let st = state.staged.as_mut().expect("computed state");
    st.cols = Some(ResBuf::from_slice(&res, &cols));
    st.values = Some(ResBuf::from_slice(&res, &vals.unwrap_or_default()));
    state.note_reuse();
    state.set_phase(Phase::NumericDone);
    Ok(())
}

/// Writes the staged values into the output's values array.
pub(crate) fn numeric_fill<T, F, I, O>(
    state: &mut OperationState<T>,
    kind: OperationKind,
    shell: &mut OutputShell<'_, T, I, O>,
    make: impl FnOnce() -> Result<F>,
) -> Result<()>
where
    T: Scalar,
    F: Family<T>,
    I: SpIndex,
    O: SpIndex,
{
    admit(state, kind, "numeric_fill", |p, s| s && p == Phase::NumericDone)?;
    let f = make()?;
    check_shape(f.shape(), shell)?;
    check_fresh(state, f.fingerprint())?;
    let st = staged(state);
    let cols = st.cols.as_deref().expect("numeric compute ran");
    let vals = st.values.as_deref().expect("numeric compute ran");
    shell.emit(&st.row_offsets, cols, Some(vals), false)?;
    state.set_phase(Phase::Filled);
    Ok(())
}
