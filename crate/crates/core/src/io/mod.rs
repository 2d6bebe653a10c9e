//! Matrix Market files and plain-text vectors.
//!
//! Values are written with the shortest decimal form that parses back to
//! the same bits, so a write/read cycle reproduces every stored entry,
//! including `-0`, subnormals, infinities and NaN.

mod matrix_market;
mod vector;

pub use matrix_market::{
    mm_read, mm_read_from, mm_write, mm_write_to, MmField, MmHeader, MmLayout, MmSymmetry,
};
pub use vector::{read_vector, read_vector_from, write_vector, write_vector_to};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: entry ({row}, {col}) outside a {nrows}x{ncols} matrix")]
    OutOfRange {
        line: usize,
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("duplicate entry ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("{0} values cannot be stored in a real matrix")]
    Field(&'static str),
}

impl IoError {
    /// Stable single-token category.
    pub fn category(&self) -> &'static str {
        match self {
            IoError::Io(_) => "io",
            IoError::Header { .. } => "malformed_header",
            IoError::Parse { .. } => "parse",
            IoError::OutOfRange { .. } => "out_of_range",
            IoError::Duplicate { .. } => "duplicate_entry",
            IoError::Field(_) => "field_mismatch",
        }
    }
}

/// Shortest round-trip text of a value; complex values are `re im`.
pub(crate) fn format_value<T: crate::Scalar>(v: T) -> String {
    let (re, im) = v.to_parts();
    let part = |x: f64| {
        if T::Real::mantissa_digits() < 53 {
            format!("{:?}", x as f32)
        } else {
            format!("{x:?}")
        }
    };
    if T::IS_COMPLEX {
        format!("{} {}", part(re), part(im))
    } else {
        part(re)
    }
}

/// Parses one real part in the precision of `T`, so binary32 text is
/// rounded once.
pub(crate) fn parse_part<T: crate::Scalar>(s: &str) -> Option<f64> {
    if T::Real::mantissa_digits() < 53 {
        s.parse::<f32>().ok().map(f64::from)
    } else {
        s.parse::<f64>().ok()
    }
}

use crate::scalar::Real;
