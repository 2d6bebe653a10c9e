use std::sync::Arc;

use serde::Serialize;

use super::resource::{default_resource, MemoryResource, ResBuf};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Operation family a state is bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationKind {
    Scale,
    InfNorm,
    FrobNorm,
    Multiply,
    TriangularSolve,
    SampledMultiply,
    SparseMultiply,
    Add,
    MultiplyElementwise,
    Convert,
    Filter,
    Transpose,
}

impl OperationKind {
    pub fn is_staged(self) -> bool {
        matches!(
            self,
            OperationKind::SparseMultiply
                | OperationKind::Add
                | OperationKind::MultiplyElementwise
                | OperationKind::Convert
                | OperationKind::Filter
                | OperationKind::Transpose
        )
    }
}

/// Progress through the staged protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Created,
    Inspected,
    /// Structure analysed, result nnz known (fused compute or symbolic compute).
    Computed,
    /// Structure arrays written by the symbolic fill.
    SymbolicDone,
    /// Values staged by the numeric compute.
    NumericDone,
    Filled,
}

/// Structural identity of an operand tuple. Values never contribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Fingerprint(pub u64);

pub(crate) struct Staged<T: Copy> {
    pub fingerprint: Fingerprint,
    /// Zero-based row offsets of the row-major result, `shape.0 + 1` entries.
    pub row_offsets: ResBuf<usize>,
    /// Accepted-entry mask for filter and dense conversion.
    pub accepted: Option<ResBuf<u8>>,
    /// Row-major column indices and values staged by a numeric compute.
    pub cols: Option<ResBuf<usize>>,
    pub values: Option<ResBuf<T>>,
}

/// Per-operation opaque state.
///
/// Bound to one [`OperationKind`]. Staged families record their progress in
/// [`phase`](Self::phase); any out-of-order call fails with a phase error and
/// leaves the state untouched. All internal buffers come from the state's
/// memory resource and are released on drop or [`reset`](Self::reset).
pub struct OperationState<T: Scalar = f64> {
    kind: OperationKind,
    phase: Phase,
    split: bool,
    resource: Arc<dyn MemoryResource>,
    pub(crate) staged: Option<Staged<T>>,
    analyses: u64,
    reuses: u64,
}

impl<T: Scalar> std::fmt::Debug for OperationState<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperationState")
            .field("kind", &self.kind)
            .field("phase", &self.phase)
            .field("split", &self.split)
            .field("result_nnz", &self.result_nnz().ok())
            .finish()
    }
}

impl<T: Scalar> OperationState<T> {
    pub fn new(kind: OperationKind) -> Self {
        Self::with_resource(kind, default_resource())
    }

    pub fn with_resource(kind: OperationKind, resource: Arc<dyn MemoryResource>) -> Self {
        OperationState {
            kind,
            phase: Phase::Created,
            split: false,
            resource,
            staged: None,
            analyses: 0,
            reuses: 0,
        }
    }

    pub fn kind(&self) -> OperationKind {
        self.kind
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Whether the state is driven through the symbolic/numeric split.
    pub fn is_split(&self) -> bool {
        self.split
    }

    /// Exact structural nnz of the staged output. Fails before compute.
    pub fn result_nnz(&self) -> Result<usize> {
        match (&self.staged, self.phase >= Phase::Computed) {
            (Some(s), true) => Ok(*s.row_offsets.last().unwrap_or(&0)),
            _ => Err(Error::Phase {
                op: "result_nnz",
                phase: self.phase,
            }),
        }
    }

    /// Number of structural analyses actually performed.
    pub fn analysis_count(&self) -> u64 {
        self.analyses
    }

    /// Number of computes that reused a previous analysis.
    pub fn reuse_count(&self) -> u64 {
        self.reuses
    }

    /// Drops all staged data and returns to [`Phase::Created`].
    pub fn reset(&mut self) {
        self.staged = None;
        self.phase = Phase::Created;
        self.split = false;
    }

    pub(crate) fn resource(&self) -> &Arc<dyn MemoryResource> {
        &self.resource
    }

    pub(crate) fn check_kind(&self, expected: OperationKind) -> Result<()> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(Error::StateKind {
                expected,
                found: self.kind,
            })
        }
    }

    pub(crate) fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub(crate) fn set_split(&mut self, split: bool) {
        self.split = split;
    }

    pub(crate) fn note_analysis(&mut self) {
        self.analyses += 1;
    }

    pub(crate) fn note_reuse(&mut self) {
        self.reuses += 1;
    }

    pub(crate) fn fingerprint(&self) -> Option<Fingerprint> {
        self.staged.as_ref().map(|s| s.fingerprint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_nnz_before_compute_is_phase_error() {
        let s = OperationState::<f64>::new(OperationKind::SparseMultiply);
        assert!(matches!(s.result_nnz(), Err(Error::Phase { .. })));
    }

    #[test]
    fn kind_mismatch() {
        let s = OperationState::<f32>::new(OperationKind::Add);
        assert!(matches!(
            s.check_kind(OperationKind::Filter),
            Err(Error::StateKind { .. })
        ));
    }
}
