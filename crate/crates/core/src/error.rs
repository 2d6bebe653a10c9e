use thiserror::Error;

use crate::formats::Violation;
use crate::runtime::{OperationKind, Phase};

/// Errors raised by kernels and the staged protocol.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid view: {0}")]
    InvalidView(Violation),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{op} not allowed in phase {phase:?}")]
    Phase { op: &'static str, phase: Phase },
    #[error("state bound to {found:?}, operation needs {expected:?}")]
    StateKind {
        expected: OperationKind,
        found: OperationKind,
    },
    #[error("operand structure changed since the symbolic/compute phase")]
    StaleStructure,
    #[error("values array is read-only")]
    ReadOnlyValues,
    #[error("diagonal entry of row {row} is not stored")]
    MissingDiagonal { row: usize },
    #[error("diagonal entry of row {row} is zero")]
    ZeroDiagonal { row: usize },
    #[error("stored entry ({row}, {col}) breaks triangular structure")]
    NotTriangular { row: usize, col: usize },
    #[error("output {array} has length {found}, expected {expected}")]
    OutputLength {
        array: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("output arrays are not bound")]
    OutputUnbound,
    #[error("value {0} does not fit the index or offset type")]
    IndexOverflow(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable single-token category, used by the CLI and in reports.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidView(_) => "validation_failed",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Phase { .. } => "phase_error",
            Error::StateKind { .. } => "state_kind",
            Error::StaleStructure => "stale_structure",
            Error::ReadOnlyValues => "read_only_values",
            Error::MissingDiagonal { .. } | Error::ZeroDiagonal { .. } => "singular",
            Error::NotTriangular { .. } => "not_triangular",
            Error::OutputLength { .. } | Error::OutputUnbound => "output_length",
            Error::IndexOverflow(_) => "index_overflow",
            Error::Unsupported(_) => "unsupported",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
