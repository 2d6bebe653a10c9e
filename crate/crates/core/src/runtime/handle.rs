use std::sync::{Arc, Mutex, MutexGuard};

use super::resource::{default_resource, MemoryResource, ResBuf};
use crate::error::Result;
use crate::formats::{validate, Operand, SparseOperand, SparseView};
use crate::scalar::{Scalar, SpIndex};

/// Level-set schedule for a triangular solve: rows grouped so that every row
/// only depends on rows of earlier levels.
pub(crate) struct LevelSchedule {
    pub lower: bool,
    /// Rows ordered by level.
    pub rows: ResBuf<usize>,
    /// `levels + 1` offsets into `rows`.
    pub level_offsets: ResBuf<usize>,
    /// Whether the schedule describes the transposed matrix.
    pub transposed: bool,
}

#[derive(Default)]
pub(crate) struct OptData {
    /// Stored entries per row of the underlying (untransposed) matrix.
    pub row_counts: Option<ResBuf<usize>>,
    pub levels: Option<LevelSchedule>,
}

/// Library-owned optimization artifacts attached to a handle.
pub struct OptStore {
    resource: Arc<dyn MemoryResource>,
    data: Mutex<OptData>,
}

impl std::fmt::Debug for OptStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OptStore").field("summary", &self.summary()).finish()
    }
}

/// What an [`OptStore`] currently holds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OptStoreSummary {
    pub row_counts: bool,
    pub level_count: Option<usize>,
}

impl OptStore {
    fn new(resource: Arc<dyn MemoryResource>) -> Self {
        OptStore {
            resource,
            data: Mutex::new(OptData::default()),
        }
    }

    pub(crate) fn resource(&self) -> &Arc<dyn MemoryResource> {
        &self.resource
    }

    pub(crate) fn lock(&self) -> MutexGuard<'_, OptData> {
        self.data.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn summary(&self) -> OptStoreSummary {
        let d = self.lock();
        OptStoreSummary {
            row_counts: d.row_counts.is_some(),
            level_count: d.levels.as_ref().map(|l| l.level_offsets.len() - 1),
        }
    }
}

/// A validated view paired with library-owned optimization data.
///
/// The user's arrays are only borrowed; construction, inspection and drop
/// never modify them. All optimization data is drawn from the handle's
/// memory resource and released on drop.
#[derive(Debug)]
pub struct MatrixHandle<'a, T, I = usize, O = usize> {
    view: SparseView<'a, T, I, O>,
    store: OptStore,
}

/// Validates `view` and wraps it. Without a resource the library default is used.
pub fn make_handle<'a, T, I, O>(
    view: impl Into<SparseView<'a, T, I, O>>,
    resource: Option<Arc<dyn MemoryResource>>,
) -> Result<MatrixHandle<'a, T, I, O>>
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    let view = view.into();
    validate(view.as_ref()).into_result()?;
    Ok(MatrixHandle {
        view,
        store: OptStore::new(resource.unwrap_or_else(default_resource)),
    })
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> MatrixHandle<'a, T, I, O> {
    pub fn view(&self) -> &SparseView<'a, T, I, O> {
        &self.view
    }

    /// Writable values of the wrapped view. The structure stays fixed for
    /// the handle's lifetime.
    pub fn values_mut(&mut self) -> Result<&mut [T]> {
        self.view.values_mut().as_mut_slice()
    }

    pub(crate) fn view_mut(&mut self) -> &mut SparseView<'a, T, I, O> {
        &mut self.view
    }

    pub fn into_view(self) -> SparseView<'a, T, I, O> {
        self.view
    }

    pub fn store(&self) -> &OptStore {
        &self.store
    }
}

impl<'a, T: Scalar, I: SpIndex, O: SpIndex> SparseOperand<T, I, O> for MatrixHandle<'a, T, I, O> {
    fn operand(&self) -> Operand<'_, T, I, O> {
        let mut op = Operand::plain(self.view.as_ref());
        op.handle = Some(&self.store);
        op
    }
}
