//! A reduced run of the conformance harness, printed as a summary table.

use spblas::conformance::{run_conformance, ConformanceConfig, Family, ReproConfig};

fn main() {
    let config = ConformanceConfig {
        families: vec![Family::Spmv, Family::Spgemm, Family::Filter],
        cases: 20,
        complex: false,
        repro: ReproConfig { cases: 2, repeats: 3, ..ReproConfig::default() },
        ..ConformanceConfig::default()
    };
    let report = run_conformance(&config);
    print!("{}", report.summary());
    println!("{} records, {} failures", report.records.len(), report.failure_count());
}
