use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::corpus::{Case, CorpusConfig, Generator, ValueKind};
use super::exceptions::exception_matrix_suite;
use super::report::{Check, Record, Report};
use super::run::{execute, expected, expected_pattern, Execution, Output};
use super::Family;
use crate::oracle::{check_entry, exact_match, DenseMirror, ErrorBoundSpec, Summation};
use crate::runtime::{get_cnr_property, set_cnr_property, CnrProperty, ExecutionPolicy};
use crate::scalar::{Real, Scalar};

/// Everything [`run_conformance`] does.
#[derive(Debug, Clone)]
pub struct ConformanceConfig {
    pub seed: u64,
    pub families: Vec<Family>,
    /// Value cases per family and precision.
    pub cases: usize,
    /// Add structured shapes and the empty/full densities.
    pub full_corpus: bool,
    /// Also run the value suite in complex arithmetic.
    pub complex: bool,
    pub repro: ReproConfig,
}

impl Default for ConformanceConfig {
    fn default() -> Self {
        ConformanceConfig {
            seed: 0x5eed,
            families: Family::ALL.to_vec(),
            cases: 200,
            full_corpus: true,
            complex: true,
            repro: ReproConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReproConfig {
    /// Small cases per family, plus one large case.
    pub cases: usize,
    pub repeats: usize,
    /// Thread counts compared under strict reproducibility.
    pub threads: Vec<usize>,
    /// Thread count of the repeated runs.
    pub repeat_threads: usize,
}

impl Default for ReproConfig {
    fn default() -> Self {
        ReproConfig {
            cases: 4,
            repeats: 10,
            threads: vec![1, 2, 4, 8],
            repeat_threads: 4,
        }
    }
}

/// Independent, reproducible stream per (precision, family, case).
fn case_rng<T: Scalar>(seed: u64, family: Family, index: usize) -> ChaCha8Rng {
    let tag = T::NAME.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.rotate_left(32));
    rng.set_stream(family.stream() << 32 | index as u64);
    rng
}

/// Sequential and deterministic-parallel policies, alternating.
fn policy_for(index: usize) -> ExecutionPolicy {
    if index.is_multiple_of(2) {
        ExecutionPolicy::sequential()
    } else {
        ExecutionPolicy::deterministic_parallel(2 + index % 3)
    }
}

fn record<T: Scalar>(case: &Case<T>, check: Check, pass: bool) -> Record {
    Record::new(case.family.name(), &case.id, T::NAME, check, pass)
}

/// Resource balance and canary records for one execution.
fn bookkeeping<T: Scalar>(case: &Case<T>, ex: &Execution<T>, report: &mut Report) {
    report.push(
        record(case, Check::Resources, ex.outstanding == 0)
            .with_detail(format!("{} allocations, {} outstanding", ex.allocations, ex.outstanding)),
    );
    if let Some(intact) = ex.canary_intact {
        report.push(record(case, Check::Canary, intact));
    }
}

/// Worst bound check over all output elements.
fn check_values<T: Scalar>(output: &Output<T>, mirror: &DenseMirror) -> (bool, f64, String) {
    let spec = ErrorBoundSpec::for_scalar::<T>(Summation::Serial);
    let mut worst = (true, 0.0f64, String::new());
    let mut note = |pass: bool, slack: f64, at: String| {
        if !pass && worst.0 {
            worst = (false, slack, at);
        } else if pass == worst.0 && slack > worst.1 {
            worst.1 = slack;
            if !pass {
                worst.2 = at;
            }
        }
    };
    match output {
        Output::Dense { rows, cols, data } => {
            if (*rows, *cols) != (mirror.nrows, mirror.ncols) {
                return (false, f64::INFINITY, format!("extents {rows}x{cols}"));
            }
            for i in 0..*rows {
                for j in 0..*cols {
                    let c = check_entry(data[i * cols + j], mirror, i, j, &spec);
                    note(c.pass, c.slack, format!("({i}, {j}) error {:e} bound {:e}", c.error, c.bound));
                }
            }
        }
        Output::Sparse { nrows, ncols, triples } => {
            if (*nrows, *ncols) != (mirror.nrows, mirror.ncols) {
                return (false, f64::INFINITY, format!("extents {nrows}x{ncols}"));
            }
            if triples.len() != mirror.nnz() {
                return (
                    false,
                    f64::INFINITY,
                    format!("{} entries, expected {}", triples.len(), mirror.nnz()),
                );
            }
            for &(i, j, v) in triples {
                if !mirror.is_stored(i, j) {
                    return (false, f64::INFINITY, format!("unexpected entry ({i}, {j})"));
                }
                let c = check_entry(v, mirror, i, j, &spec);
                note(c.pass, c.slack, format!("({i}, {j}) error {:e} bound {:e}", c.error, c.bound));
            }
        }
        Output::Norm(v) => {
            let c = check_entry::<T::Real>(*v, mirror, 0, 0, &spec);
            note(c.pass, c.slack, format!("error {:e} bound {:e}", c.error, c.bound));
        }
    }
    worst
}

/// Bitwise comparison with the rounded reference, pattern included.
fn check_exact<T: Scalar>(output: &Output<T>, mirror: &DenseMirror) -> (bool, String) {
    let cmp = |i: usize, j: usize, v: T| {
        if exact_match(v, mirror.at(i, j)) {
            None
        } else {
            Some(format!("({i}, {j}) computed {v:?}, exact {:?}", mirror.at(i, j).round::<T>()))
        }
    };
    let bad = match output {
        Output::Dense { rows, cols, data } => (0..*rows)
            .flat_map(|i| (0..*cols).map(move |j| (i, j)))
            .find_map(|(i, j)| cmp(i, j, data[i * cols + j])),
        Output::Sparse { triples, .. } => {
            if triples.len() != mirror.nnz() {
                Some(format!("{} entries, expected {}", triples.len(), mirror.nnz()))
            } else {
                triples.iter().find_map(|&(i, j, v)| {
                    if mirror.is_stored(i, j) {
                        cmp(i, j, v)
                    } else {
                        Some(format!("unexpected entry ({i}, {j})"))
                    }
                })
            }
        }
        Output::Norm(v) => cmp(0, 0, T::from_real(*v)),
    };
    match bad {
        None => (true, String::new()),
        Some(d) => (false, d),
    }
}

fn check_pattern<T: Scalar>(case: &Case<T>, output: &Output<T>) -> Option<Record> {
    let want = expected_pattern(case)?;
    let got = output.pattern()?;
    let mismatched = if want.len() == got.len() {
        want.iter().zip(&got).filter(|(a, b)| a != b).count()
    } else {
        want.len().max(got.len())
    };
    Some(
        record(case, Check::Pattern, mismatched == 0)
            .with_detail(format!("{mismatched} mismatched of {}", want.len())),
    )
}

fn error_record<T: Scalar>(case: &Case<T>, e: crate::error::Error) -> Record {
    record(case, Check::Error, false).with_detail(format!("{}: {e}", e.category()))
}

/// Error-bound check of every output element (and the pattern, for
/// structural families) on uniformly distributed data.
pub fn value_suite<T: Scalar>(config: &CorpusConfig, families: &[Family]) -> Report {
    let generator = Generator::new(config, ValueKind::Uniform);
    let mut report = Report::default();
    for &family in families {
        for index in 0..config.cases {
            let mut rng = case_rng::<T>(config.seed, family, index);
            let case = generator.case::<T>(family, index, &mut rng);
            match execute(&case, &policy_for(index)) {
                Err(e) => report.push(error_record(&case, e)),
                Ok(ex) => {
                    bookkeeping(&case, &ex, &mut report);
                    let mirror = expected(&case, &ex.output, false);
                    let (pass, slack, detail) = check_values(&ex.output, &mirror);
                    report.push(
                        record(&case, Check::Values, pass)
                            .with_slack(slack)
                            .with_detail(detail),
                    );
                    if let Some(r) = check_pattern(&case, &ex.output) {
                        report.push(r);
                    }
                }
            }
        }
    }
    report
}

/// Exact output patterns on small-integer data, where cancellation to
/// stored zeros is common.
pub fn pattern_suite<T: Scalar>(config: &CorpusConfig, families: &[Family]) -> Report {
    let generator = Generator::new(config, ValueKind::Integer(2));
    let mut report = Report::default();
    for &family in families.iter().filter(|f| f.is_structural()) {
        for index in 0..config.cases {
            let mut rng = case_rng::<T>(config.seed ^ 0x9a77, family, index);
            let case = generator.case::<T>(family, index, &mut rng);
            match execute(&case, &policy_for(index)) {
                Err(e) => report.push(error_record(&case, e)),
                Ok(ex) => {
                    bookkeeping(&case, &ex, &mut report);
                    if let Some(r) = check_pattern(&case, &ex.output) {
                        report.push(r);
                    }
                }
            }
        }
    }
    report
}

/// Integer inputs within `2^10` whose every intermediate is an exactly
/// representable integer; results must match the references bitwise.
/// For binary32 the second factor of each product is kept within `2^7`.
pub fn exact_suite<T: Scalar>(config: &CorpusConfig, families: &[Family]) -> Report {
    let second = if T::Real::mantissa_digits() < 53 { 1 << 7 } else { 1 << 10 };
    let generator = Generator::exact(config, 1 << 10, second);
    let mut report = Report::default();
    for &family in families {
        for index in 0..config.cases {
            let mut rng = case_rng::<T>(config.seed ^ 0xe4ac, family, index);
            let case = generator.case::<T>(family, index, &mut rng);
            match execute(&case, &policy_for(index)) {
                Err(e) => report.push(error_record(&case, e)),
                Ok(ex) => {
                    bookkeeping(&case, &ex, &mut report);
                    let mirror = expected(&case, &ex.output, true);
                    let (pass, detail) = check_exact(&ex.output, &mirror);
                    report.push(record(&case, Check::Exact, pass).with_detail(detail));
                }
            }
        }
    }
    report
}

fn first_difference(a: &[u8], b: &[u8]) -> Option<usize> {
    a.iter()
        .zip(b)
        .position(|(x, y)| x != y)
        .or_else(|| (a.len() != b.len()).then(|| a.len().min(b.len())))
}

/// Restores the reproducibility property when dropped.
struct CnrGuard(CnrProperty);

impl Drop for CnrGuard {
    fn drop(&mut self) {
        set_cnr_property(self.0);
    }
}

/// Byte comparison of repeated runs of `family`.
///
/// Under `Cnr`, `repeats` runs with the same thread count must agree; under
/// `StrictCnr`, runs at every count in `threads` must agree. Under the
/// default property the comparison across thread counts is only recorded.
/// All runs use the free parallel policy. The global property is restored
/// afterwards.
pub fn reproducibility_suite<T: Scalar>(
    family: Family,
    config: &CorpusConfig,
    repro: &ReproConfig,
) -> Report {
    let _guard = CnrGuard(get_cnr_property());
    let generator = Generator::new(config, ValueKind::Uniform);
    let large_config = CorpusConfig {
        max_dim: 320,
        densities: vec![0.9],
        structured: false,
        ..config.clone()
    };
    let large = Generator::new(&large_config, ValueKind::Uniform);
    let mut report = Report::default();
    for index in 0..=repro.cases {
        let mut rng = case_rng::<T>(config.seed ^ 0x4e9, family, index);
        let mut case = if index == repro.cases {
            large.case::<T>(family, index, &mut rng)
        } else {
            generator.case::<T>(family, index, &mut rng)
        };
        case.id = format!("{}-{}-r{index:02}", family.name(), T::NAME);

        let run_all = |prop: CnrProperty, policies: Vec<ExecutionPolicy>| -> Result<Vec<Vec<u8>>, Record> {
            set_cnr_property(prop);
            policies
                .iter()
                .map(|p| {
                    execute(&case, p)
                        .map(|ex| ex.output.bytes())
                        .map_err(|e| error_record(&case, e))
                })
                .collect()
        };
        let compare = |runs: &[Vec<u8>], what: &str| -> (bool, String) {
            for (n, r) in runs.iter().enumerate().skip(1) {
                if let Some(at) = first_difference(&runs[0], r) {
                    return (false, format!("{what}: run {n} differs at byte {at}"));
                }
            }
            (true, format!("{what}: {} runs identical", runs.len()))
        };

        let repeated = vec![ExecutionPolicy::parallel(repro.repeat_threads); repro.repeats];
        let across: Vec<_> = repro.threads.iter().map(|&t| ExecutionPolicy::parallel(t)).collect();
        for (prop, policies, label) in [
            (CnrProperty::Cnr, repeated, "cnr"),
            (CnrProperty::StrictCnr, across.clone(), "strict_cnr"),
            (CnrProperty::Default, across, "default"),
        ] {
            match run_all(prop, policies) {
                Err(r) => report.push(r),
                Ok(runs) => {
                    let (same, detail) = compare(&runs, label);
                    let r = record(&case, Check::Reproducibility, same).with_detail(detail);
                    report.push(if prop == CnrProperty::Default { r.recorded() } else { r });
                }
            }
        }
    }
    report
}

/// Every suite for `T` on the configured families.
fn suites_for<T: Scalar>(config: &ConformanceConfig, corpus: &CorpusConfig, report: &mut Report) {
    report.extend(value_suite::<T>(corpus, &config.families));
    report.extend(pattern_suite::<T>(corpus, &config.families));
    let exact_corpus = CorpusConfig {
        max_dim: 32,
        ..corpus.clone()
    };
    let exact: Vec<Family> = config
        .families
        .iter()
        .copied()
        .filter(|f| Family::EXACT.contains(f))
        .collect();
    report.extend(exact_suite::<T>(&exact_corpus, &exact));
    for &family in &config.families {
        report.extend(reproducibility_suite::<T>(family, corpus, &config.repro));
    }
}

/// The whole harness: value, pattern, exact-integer and reproducibility
/// suites in binary32 and binary64 (values also in complex arithmetic when
/// enabled), plus the exception table.
pub fn run_conformance(config: &ConformanceConfig) -> Report {
    let corpus = if config.full_corpus {
        CorpusConfig::full(config.seed, config.cases)
    } else {
        CorpusConfig {
            seed: config.seed,
            cases: config.cases,
            ..CorpusConfig::default()
        }
    };
    let mut report = Report::default();
    suites_for::<f32>(config, &corpus, &mut report);
    suites_for::<f64>(config, &corpus, &mut report);
    if config.complex {
        use num_complex::{Complex32, Complex64};
        report.extend(value_suite::<Complex32>(&corpus, &config.families));
        report.extend(value_suite::<Complex64>(&corpus, &config.families));
    }
    if config.families.contains(&Family::Spmv) {
        report.extend(exception_matrix_suite::<f32>());
        report.extend(exception_matrix_suite::<f64>());
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(cases: usize) -> CorpusConfig {
        CorpusConfig::full(7, cases)
    }

    fn assert_ok(report: &Report) {
        let failures: Vec<_> = report
            .failures()
            .map(|r| format!("{} {:?}: {}", r.case_id, r.check, r.detail))
            .collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }

    #[test]
    fn value_suite_small() {
        assert_ok(&value_suite::<f64>(&small(24), &Family::ALL));
        assert_ok(&value_suite::<f32>(&small(24), &Family::ALL));
        assert_ok(&value_suite::<num_complex::Complex64>(&small(12), &Family::ALL));
    }

    #[test]
    fn pattern_and_exact_small() {
        assert_ok(&pattern_suite::<f64>(&small(24), &Family::ALL));
        let exact = CorpusConfig { max_dim: 32, ..small(24) };
        assert_ok(&exact_suite::<f32>(&exact, &Family::EXACT));
        assert_ok(&exact_suite::<f64>(&exact, &Family::EXACT));
    }

    #[test]
    fn first_difference_finds_length_mismatch() {
        assert_eq!(first_difference(&[1, 2], &[1, 2]), None);
        assert_eq!(first_difference(&[1, 2], &[1, 3]), Some(1));
        assert_eq!(first_difference(&[1, 2], &[1, 2, 3]), Some(2));
    }
}
