//! Multi-stage operations whose output structure is unknown up front.
//!
//! Every family follows the same protocol on an
//! [`OperationState`](crate::runtime::OperationState):
//!
//! 1. `*_inspect` (optional) validates the operands;
//! 2. `*_compute` analyses the structure, after which
//!    [`result_nnz`](crate::runtime::OperationState::result_nnz) is exact;
//! 3. the caller allocates arrays of that size and binds them to an
//!    [`OutputShell`];
//! 4. `*_fill` writes the result in the shell's format and index base.
//!
//! Sparse multiplication additionally offers a symbolic/numeric split so a
//! fixed structure can be refilled with new values. Calls out of order fail
//! with a phase error and leave the state as it was. Output patterns are
//! structural: entries that cancel to zero stay stored.

mod convert;
mod elementwise;
mod engine;
mod shell;
mod spgemm;

pub use convert::{
    convert_compute, convert_fill, convert_inspect, filter_compute, filter_fill,
    transpose_compute, transpose_fill, ConvertSource, DenseSource, Source,
};
pub use elementwise::{
    add_compute, add_fill, add_inspect, multiply_elementwise_compute, multiply_elementwise_fill,
    multiply_elementwise_inspect,
};
pub use shell::OutputShell;
pub use spgemm::{
    no_addend, sparse_multiply_compute, sparse_multiply_fill, sparse_multiply_inspect,
    sparse_multiply_numeric_compute, sparse_multiply_numeric_fill, sparse_multiply_symbolic_compute,
    sparse_multiply_symbolic_fill,
};

#[cfg(test)]
mod tests;
