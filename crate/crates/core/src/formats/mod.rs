//! Non-owning matrix views and the symbolic wrappers around them.
//!
//! Views never allocate, resize or free the arrays they describe. All views
//! are validated lazily: construction is free, kernels validate on entry (or
//! trust a [`MatrixHandle`](crate::runtime::MatrixHandle) that validated once).

mod dense;
mod owned;
mod sparse;
mod validate;
mod wrappers;

pub use dense::{DenseLayout, DenseView};
pub use owned::{OwnedValues, SparseMatrix, TripleError};
pub use sparse::{CooView, CscView, CsrView, SparseView, ViewRef};
pub use validate::{validate, ValidationReport, Violation, ViolationCategory};
pub use wrappers::{scaled, transposed, Operand, Scaled, SparseOperand, Transposed};


use crate::error::{Error, Result};

/// Base of the indices stored in a view's index and offset arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum IndexBase {
    #[default]
    Zero,
    One,
}

impl IndexBase {
    #[inline]
    pub fn offset(self) -> usize {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }
}

/// Storage format tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csr,
    Csc,
    Coo,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csr" => Ok(Format::Csr),
            "csc" => Ok(Format::Csc),
            "coo" => Ok(Format::Coo),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

/// A constant-valued array: every position reads as `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoValue<T> {
    pub value: T,
    pub count: usize,
}

impl<T> IsoValue<T> {
    pub fn new(value: T, count: usize) -> Self {
        IsoValue { value, count }
    }
}

/// The values array of a sparse view.
#[derive(Debug)]
pub enum Values<'a, T> {
    Slice(&'a [T]),
    SliceMut(&'a mut [T]),
    Iso(IsoValue<T>),
}

impl<'a, T: Copy> Values<'a, T> {
    pub fn len(&self) -> usize {
        match self {
            Values::Slice(s) => s.len(),
            Values::SliceMut(s) => s.len(),
            Values::Iso(iso) => iso.count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, k: usize) -> T {
        match self {
            Values::Slice(s) => s[k],
            Values::SliceMut(s) => s[k],
            Values::Iso(iso) => {
                debug_assert!(k < iso.count);
                iso.value
            }
        }
    }

    pub fn as_slice(&self) -> Option<&[T]> {
        match self {
            Values::Slice(s) => Some(s),
            Values::SliceMut(s) => Some(s),
            Values::Iso(_) => None,
        }
    }

    /// Writable access; fails for borrowed-immutable and iso arrays.
    pub fn as_mut_slice(&mut self) -> Result<&mut [T]> {
        match self {
            Values::SliceMut(s) => Ok(s),
            _ => Err(Error::ReadOnlyValues),
        }
    }
}

impl<'a, T> From<&'a [T]> for Values<'a, T> {
    fn from(s: &'a [T]) -> Self {
        Values::Slice(s)
    }
}

impl<'a, T> From<&'a Vec<T>> for Values<'a, T> {
    fn from(s: &'a Vec<T>) -> Self {
        Values::Slice(s)
    }
}

impl<'a, T, const N: usize> From<&'a [T; N]> for Values<'a, T> {
    fn from(s: &'a [T; N]) -> Self {
        Values::Slice(s)
    }
}

impl<'a, T> From<&'a mut [T]> for Values<'a, T> {
    fn from(s: &'a mut [T]) -> Self {
        Values::SliceMut(s)
    }
}

impl<'a, T> From<&'a mut Vec<T>> for Values<'a, T> {
    fn from(s: &'a mut Vec<T>) -> Self {
        Values::SliceMut(s)
    }
}

impl<'a, T> From<IsoValue<T>> for Values<'a, T> {
    fn from(iso: IsoValue<T>) -> Self {
        Values::Iso(iso)
    }
}
