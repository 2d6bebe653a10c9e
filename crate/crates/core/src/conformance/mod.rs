//! Conformance harness: runs every kernel family on a seeded corpus and
//! judges the results against the brute-force references in
//! [`oracle`](crate::oracle).
//!
//! Suites:
//!
//! * [`value_suite`]: every output element within the forward error bound,
//!   plus the exact output pattern for structural families;
//! * [`exact_suite`]: integer data whose every intermediate is representable,
//!   compared bitwise;
//! * [`exception_matrix_suite`]: Inf/NaN propagation and the `alpha`/`beta`
//!   zero rules for SpMV;
//! * [`reproducibility_suite`]: byte comparison across repeats and thread
//!   counts under each reproducibility setting.
//!
//! Every case also checks that its memory resource is balanced afterwards
//! and that staged fills stay inside the arrays they were given.

mod corpus;
mod exceptions;
mod report;
mod run;
mod suites;

pub use corpus::{
    integer_rhs, random_matrix, structured_matrix, value, AddendMode, Case, CorpusConfig, Dense,
    Generator, SparseInput, Structure, ValueKind,
};
pub use exceptions::exception_matrix_suite;
pub use report::{Check, Record, Report, Verdict};
pub use run::{execute, expected, Execution, Output};
pub use suites::{
    exact_suite, pattern_suite, reproducibility_suite, run_conformance, value_suite,
    ConformanceConfig, ReproConfig,
};

use serde::Serialize;

/// Kernel families covered by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Scale,
    InfNorm,
    FrobNorm,
    Spmv,
    Trisolve,
    Sddmm,
    Spgemm,
    Add,
    Hadamard,
    Convert,
    Filter,
    Transpose,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Scale,
        Family::InfNorm,
        Family::FrobNorm,
        Family::Spmv,
        Family::Trisolve,
        Family::Sddmm,
        Family::Spgemm,
        Family::Add,
        Family::Hadamard,
        Family::Convert,
        Family::Filter,
        Family::Transpose,
    ];

    /// Families whose output pattern is computed by the library.
    pub const STRUCTURAL: [Family; 6] = [
        Family::Spgemm,
        Family::Add,
        Family::Hadamard,
        Family::Filter,
        Family::Convert,
        Family::Transpose,
    ];

    /// Families of the integer channel.
    pub const EXACT: [Family; 5] = [
        Family::Spmv,
        Family::Spgemm,
        Family::Add,
        Family::Sddmm,
        Family::Trisolve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Scale => "scale",
            Family::InfNorm => "inf_norm",
            Family::FrobNorm => "frob_norm",
            Family::Spmv => "spmv",
            Family::Trisolve => "trisolve",
            Family::Sddmm => "sddmm",
            Family::Spgemm => "spgemm",
            Family::Add => "add",
            Family::Hadamard => "hadamard",
            Family::Convert => "convert",
            Family::Filter => "filter",
            Family::Transpose => "transpose",
        }
    }

    pub fn is_structural(self) -> bool {
        Family::STRUCTURAL.contains(&self)
    }

    fn stream(self) -> u64 {
        Family::ALL.iter().position(|f| *f == self).unwrap_or(0) as u64
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| format!("unknown family '{s}'"))
    }
}
