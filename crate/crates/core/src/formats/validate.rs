use std::fmt;

use serde::Serialize;

use super::{CooView, CscView, CsrView, IndexBase, ViewRef};
use crate::error::Error;
use crate::scalar::{Scalar, SpIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationCategory {
    /// An array is shorter or longer than the declared counts imply.
    Length,
    /// The first offset does not equal the index base.
    OffsetBase,
    NonMonotonicOffsets,
    /// `offsets[last] - offsets[0] != nnz`.
    NnzMismatch,
    IndexOutOfRange,
    Unsorted,
    Duplicate,
}

/// One broken invariant, located at the first offending position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub category: ViolationCategory,
    pub position: usize,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.category, self.position, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn has(&self, category: ViolationCategory) -> bool {
        self.violations.iter().any(|v| v.category == category)
    }

    /// `Err` carrying the first violation, if any.
    pub fn into_result(self) -> Result<(), Error> {
        match self.violations.into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidView(v)),
        }
    }

    fn push(&mut self, category: ViolationCategory, position: usize, detail: String) {
        if !self.has(category) {
            self.violations.push(Violation {
                category,
                position,
                detail,
            });
        }
    }
}

/// Checks every structural invariant of a sparse view.
///
/// Never panics; arrays of the wrong length are reported.
pub fn validate<'v, T, I, O>(view: impl Into<ViewRef<'v, T, I, O>>) -> ValidationReport
where
    T: Scalar,
    I: SpIndex,
    O: SpIndex,
{
    match view.into() {
        ViewRef::Csr(v) => validate_csr(v),
        ViewRef::Csc(v) => validate_csc(v),
        ViewRef::Coo(v) => validate_coo(v),
    }
}

fn validate_csr<T: Scalar, I: SpIndex, O: SpIndex>(v: &CsrView<'_, T, I, O>) -> ValidationReport {
    validate_compressed(
        ["row_offsets", "col_indices", "row", "column"],
        v.nrows(),
        v.ncols(),
        v.nnz(),
        v.row_offsets(),
        v.col_indices(),
        v.values().len(),
        v.base(),
    )
}

fn validate_csc<T: Scalar, I: SpIndex, O: SpIndex>(v: &CscView<'_, T, I, O>) -> ValidationReport {
    validate_compressed(
        ["col_offsets", "row_indices", "column", "row"],
        v.ncols(),
        v.nrows(),
        v.nnz(),
        v.col_offsets(),
        v.row_indices(),
        v.values().len(),
        v.base(),
    )
}

#[allow(clippy::too_many_arguments)]
fn validate_compressed<I: SpIndex, O: SpIndex>(
    names: [&str; 4],
    nmajor: usize,
    nminor: usize,
    nnz: usize,
    offsets: &[O],
    indices: &[I],
    nvalues: usize,
    base: IndexBase,
) -> ValidationReport {
    use ViolationCategory::*;
    let [off_name, idx_name, major_name, minor_name] = names;
    let mut report = ValidationReport::default();
    let b = base.offset();

    if nvalues != nnz {
        report.push(Length, 0, format!("values has {nvalues} entries, nnz is {nnz}"));
    }
    if indices.len() != nnz {
        report.push(
            Length,
            0,
            format!("{idx_name} has {} entries, nnz is {nnz}", indices.len()),
        );
    }
    if offsets.len() != nmajor + 1 {
        report.push(
            Length,
            0,
            format!("{off_name} has {} entries, expected {}", offsets.len(), nmajor + 1),
        );
        return report;
    }

    if offsets[0].index() != b {
        report.push(
            OffsetBase,
            0,
            format!("{off_name}[0] is {:?}, index base is {b}", offsets[0]),
        );
    }
    let mut monotone = true;
    for m in 0..nmajor {
        if offsets[m + 1].index() < offsets[m].index() || offsets[m + 1].index() == usize::MAX {
            report.push(
                NonMonotonicOffsets,
                m + 1,
                format!("{off_name}[{}] < {off_name}[{m}]", m + 1),
            );
            monotone = false;
            break;
        }
    }
    if !monotone || offsets[0].index() == usize::MAX {
        return report;
    }
    let span = offsets[nmajor].index() - offsets[0].index();
    if span != nnz {
        report.push(
            NnzMismatch,
            nmajor,
            format!("{off_name} spans {span} entries, nnz is {nnz}"),
        );
    }
    if report.has(OffsetBase) || report.has(NnzMismatch) || indices.len() < nnz {
        return report;
    }

    for m in 0..nmajor {
        let lo = offsets[m].index() - b;
        let hi = offsets[m + 1].index() - b;
        let mut prev: Option<usize> = None;
        for (k, idx) in indices.iter().enumerate().take(hi).skip(lo) {
            let raw = idx.index();
            if raw < b || raw - b >= nminor {
                report.push(
                    IndexOutOfRange,
                    k,
                    format!("{minor_name} index {idx:?} outside [{b}, {})", nminor + b),
                );
                prev = None;
                continue;
            }
            if let Some(p) = prev {
                if raw == p {
                    report.push(
                        Duplicate,
                        k,
                        format!("{major_name} {m} repeats {minor_name} {idx:?}"),
                    );
                } else if raw < p {
                    report.push(Unsorted, k, format!("{major_name} {m} is not sorted"));
                }
            }
            prev = Some(raw);
        }
    }
    report
}

fn validate_coo<T: Scalar, I: SpIndex>(v: &CooView<'_, T, I>) -> ValidationReport {
    use ViolationCategory::*;
    let mut report = ValidationReport::default();
    let nnz = v.nnz();
    let b = v.base().offset();
    let rows = v.row_indices();
    let cols = v.col_indices();
    for (name, len) in [
        ("row_indices", rows.len()),
        ("col_indices", cols.len()),
        ("values", v.values().len()),
    ] {
        if len != nnz {
            report.push(Length, 0, format!("{name} has {len} entries, nnz is {nnz}"));
        }
    }
    let n = nnz.min(rows.len()).min(cols.len());
    let mut prev: Option<(usize, usize)> = None;
    for k in 0..n {
        let (r, c) = (rows[k].index(), cols[k].index());
        if r < b || r - b >= v.nrows() || c < b || c - b >= v.ncols() {
            report.push(
                IndexOutOfRange,
                k,
                format!("entry ({:?}, {:?}) outside the matrix", rows[k], cols[k]),
            );
            prev = None;
            continue;
        }
        if let Some(p) = prev {
            if (r, c) == p {
                report.push(Duplicate, k, format!("entry ({:?}, {:?}) repeated", rows[k], cols[k]));
            } else if (r, c) < p {
                report.push(Unsorted, k, "entries not sorted by (row, column)".into());
            }
        }
        prev = Some((r, c));
    }
    report
}
