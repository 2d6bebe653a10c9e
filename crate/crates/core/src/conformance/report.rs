use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

/// What a record checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Values,
    Pattern,
    Exact,
    Exception,
    Reproducibility,
    Resources,
    Canary,
    /// The library returned an error on a valid case.
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Observed without any promise to check (default reproducibility).
    Recorded,
}

/// One line of the report.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub family: String,
    pub case_id: String,
    pub precision: &'static str,
    pub check: Check,
    pub verdict: Verdict,
    /// Largest error-to-bound ratio, for value checks. `None` when the
    /// ratio is infinite or meaningless.
    pub slack: Option<f64>,
    pub detail: String,
}

impl Record {
    pub fn new(family: &str, case_id: &str, precision: &'static str, check: Check, pass: bool) -> Self {
        Record {
            family: family.to_string(),
            case_id: case_id.to_string(),
            precision,
            check,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            slack: None,
            detail: String::new(),
        }
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack.is_finite().then_some(slack);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn recorded(mut self) -> Self {
        self.verdict = Verdict::Recorded;
        self
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Collected records.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.failed())
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    pub fn is_ok(&self) -> bool {
        self.failure_count() == 0
    }

    pub fn count(&self, check: Check) -> usize {
        self.records.iter().filter(|r| r.check == check).count()
    }

    /// Largest finite slack among value records.
    pub fn max_slack(&self) -> f64 {
        self.records
            .iter()
            .filter_map(|r| r.slack)
            .fold(0.0, f64::max)
    }

    /// One JSON object per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// `family check precision: passed/total (max slack)` lines.
    pub fn summary(&self) -> String {
        let mut groups: BTreeMap<(String, Check, &str), (usize, usize, f64)> = BTreeMap::new();
        for r in &self.records {
            let e = groups
                .entry((r.family.clone(), r.check, r.precision))
                .or_insert((0, 0, 0.0));
            e.1 += 1;
            if !r.failed() {
                e.0 += 1;
            }
            e.2 = e.2.max(r.slack.unwrap_or(0.0));
        }
        let mut s = String::new();
        for ((family, check, precision), (ok, total, slack)) in groups {
            let check = serde_json::to_string(&check).unwrap_or_default();
            s.push_str(&format!(
                "{family:<10} {:<16} {precision:<4} {ok:>5}/{total:<5} max slack {slack:.3}\n",
                check.trim_matches('"'),
            ));
        }
        s
    }
}
