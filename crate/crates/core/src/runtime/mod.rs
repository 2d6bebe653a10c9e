//! Handles, memory resources, operation states, execution policies and the
//! process-wide reproducibility setting.

mod handle;
mod policy;
mod resource;
mod state;

pub use handle::{make_handle, MatrixHandle, OptStore, OptStoreSummary};
pub use policy::{
    default_thread_count, get_cnr_property, set_cnr_property, CnrProperty, ExecutionMode,
    ExecutionPolicy, Reduction, REDUCTION_CHUNK, THREADS_ENV,
};
pub use resource::{default_resource, CountingResource, MemoryResource, ResBuf, SystemResource};
pub use state::{OperationKind, OperationState, Phase};

pub(crate) use handle::LevelSchedule;
pub(crate) use state::{Fingerprint, Staged};
