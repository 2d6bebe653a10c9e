//! Sparse BLAS over non-owning views.
//!
//! * [`formats`]: CSR/CSC/COO and dense views, validation, `scaled` and
//!   `transposed` wrappers.
//! * [`runtime`]: matrix handles, operation states, memory resources,
//!   execution policies and the reproducibility property.
//! * [`single`]: kernels whose output structure is known up front (scale,
//!   norms, SpMV/SpMM, triangular solve, SDDMM).
//! * [`staged`]: inspect/compute/fill kernels whose output structure is
//!   unknown (SpGEMM, add, element-wise multiply, conversion, filter,
//!   transpose).
//! * [`oracle`] and [`conformance`]: independent dense references, error
//!   bounds and the conformance harness.
//! * [`io`]: Matrix Market and plain vector files.
//!
//! Every capability has a runnable program under `examples/`.

pub mod conformance;
pub mod error;
pub mod formats;
pub mod io;
pub mod oracle;
pub mod runtime;
pub mod scalar;
pub mod single;
pub mod staged;

mod access;
mod exec;

pub use error::{Error, Result};
pub use formats::{
    scaled, transposed, CooView, CscView, CsrView, DenseLayout, DenseView, Format, IndexBase,
    IsoValue, SparseView, Values,
};
pub use runtime::{
    get_cnr_property, make_handle, set_cnr_property, CnrProperty, ExecutionPolicy, MatrixHandle,
    OperationKind, OperationState, Phase,
};
pub use scalar::{Real, Scalar, SpIndex};
