use std::sync::atomic::{AtomicU8, Ordering};

use serde::Serialize;

/// Environment variable read for the default thread count.
pub const THREADS_ENV: &str = "SPBLAS_NUM_THREADS";

/// How a kernel may use threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecutionMode {
    Sequential,
    /// Fixed work partition; results never depend on scheduling. A thread
    /// count of 0 means [`default_thread_count`].
    DeterministicParallel(usize),
    /// Free to pick thread-count dependent groupings where the reproducibility
    /// property allows it.
    Parallel(usize),
}

/// Summation grouping. Row-wise dot products use left-to-right order except
/// under `FixedChunks`; the Frobenius norm, which sums across rows, uses all
/// three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// One left-to-right pass.
    Serial,
    /// Serial partial sums over fixed-size chunks, combined by a pairwise tree.
    /// Independent of the thread count.
    FixedChunks,
    /// One partial per thread, combined in thread order. Reproducible only for
    /// a fixed thread count.
    ThreadPartitioned,
}

/// Entries per chunk for [`Reduction::FixedChunks`].
pub const REDUCTION_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExecutionPolicy {
    mode: ExecutionMode,
    reduction: Option<Reduction>,
}

impl Default for ExecutionPolicy {
    fn default() -> Self {
        Self::sequential()
    }
}

impl ExecutionPolicy {
    pub const fn sequential() -> Self {
        ExecutionPolicy {
            mode: ExecutionMode::Sequential,
            reduction: None,
        }
    }

    pub const fn deterministic_parallel(threads: usize) -> Self {
        ExecutionPolicy {
            mode: ExecutionMode::DeterministicParallel(threads),
            reduction: None,
        }
    }

    pub const fn parallel(threads: usize) -> Self {
        ExecutionPolicy {
            mode: ExecutionMode::Parallel(threads),
            reduction: None,
        }
    }

    /// Pins the reduction algorithm. An explicit choice takes precedence over
    /// the global reproducibility property.
    pub const fn with_reduction(mut self, reduction: Reduction) -> Self {
        self.reduction = Some(reduction);
        self
    }

    pub fn mode(&self) -> ExecutionMode {
        self.mode
    }

    /// Resolved worker count (1 for sequential).
    pub fn threads(&self) -> usize {
        match self.mode {
            ExecutionMode::Sequential => 1,
            ExecutionMode::DeterministicParallel(0) | ExecutionMode::Parallel(0) => {
                default_thread_count()
            }
            ExecutionMode::DeterministicParallel(n) | ExecutionMode::Parallel(n) => n,
        }
    }

    /// Reduction grouping for a kernel entered under `cnr`.
    pub fn reduction(&self, cnr: CnrProperty) -> Reduction {
        if let Some(r) = self.reduction {
            return r;
        }
        match (self.mode, cnr) {
            (_, CnrProperty::StrictCnr) => Reduction::FixedChunks,
            (ExecutionMode::Sequential, _) => Reduction::Serial,
            (ExecutionMode::DeterministicParallel(_), _) => Reduction::FixedChunks,
            (ExecutionMode::Parallel(_), _) => Reduction::ThreadPartitioned,
        }
    }
}

/// `SPBLAS_NUM_THREADS` if set to a positive integer, else the available
/// parallelism.
pub fn default_thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Conditional numerical reproducibility level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum CnrProperty {
    /// No promise beyond what the policy itself gives.
    #[default]
    Default = 0,
    /// Bitwise identical for repeated runs with a fixed thread count.
    Cnr = 1,
    /// Bitwise identical regardless of thread count.
    StrictCnr = 2,
}

impl CnrProperty {
    pub const NONE: CnrProperty = CnrProperty::Default;

    fn from_u8(v: u8) -> Self {
        match v {
            1 => CnrProperty::Cnr,
            2 => CnrProperty::StrictCnr,
            _ => CnrProperty::Default,
        }
    }
}

impl std::str::FromStr for CnrProperty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" | "none" => Ok(CnrProperty::Default),
            "cnr" => Ok(CnrProperty::Cnr),
            "strict" | "strict_cnr" => Ok(CnrProperty::StrictCnr),
            other => Err(format!("unknown cnr property '{other}'")),
        }
    }
}

static CNR: AtomicU8 = AtomicU8::new(CnrProperty::Default as u8);

/// Sets the process-wide reproducibility property. Kernels read it once on
/// entry, so calls already running are unaffected.
pub fn set_cnr_property(prop: CnrProperty) {
    CNR.store(prop as u8, Ordering::SeqCst);
}

pub fn get_cnr_property() -> CnrProperty {
    CnrProperty::from_u8(CNR.load(Ordering::SeqCst))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_values_are_fixed() {
        assert_eq!(CnrProperty::Default as u8, 0);
        assert_eq!(CnrProperty::NONE as u8, 0);
        assert_eq!(CnrProperty::Cnr as u8, 1);
        assert_eq!(CnrProperty::StrictCnr as u8, 2);
    }

    #[test]
    fn explicit_reduction_wins() {
        let p = ExecutionPolicy::parallel(4).with_reduction(Reduction::Serial);
        assert_eq!(p.reduction(CnrProperty::StrictCnr), Reduction::Serial);
        let q = ExecutionPolicy::parallel(4);
        assert_eq!(q.reduction(CnrProperty::StrictCnr), Reduction::FixedChunks);
        assert_eq!(q.reduction(CnrProperty::Cnr), Reduction::ThreadPartitioned);
    }
}
