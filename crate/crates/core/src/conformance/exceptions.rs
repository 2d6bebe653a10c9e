//! Fixed SpMV cases for Inf/NaN propagation and the zero-scalar rules.

use super::report::{Check, Record, Report};
use crate::formats::{scaled, DenseView, Format, IndexBase, SparseMatrix};
use crate::runtime::{ExecutionPolicy, OperationKind, OperationState};
use crate::scalar::Real;
use crate::single::{multiply_add, scaled_output};

const NAN: f64 = f64::NAN;
const INF: f64 = f64::INFINITY;

struct Entry {
    name: &'static str,
    shape: (usize, usize),
    a: Vec<(usize, usize, f64)>,
    x: Vec<f64>,
    y: Vec<f64>,
    alpha: f64,
    beta: f64,
    check: fn(&[f64]) -> Result<(), String>,
}

/// Rows 0..4: `[1 2 . .]`, `[. 3 . 0]`, `[4 . . .]`, `[. . . 5]`.
/// Column 2 holds only implicit zeros; `(1, 3)` is an explicit zero.
fn base(first: f64, third: f64) -> Vec<(usize, usize, f64)> {
    vec![(0, 0, first), (0, 1, 2.0), (1, 1, 3.0), (1, 3, 0.0), (2, 0, third), (3, 3, 5.0)]
}

fn expect(y: &[f64], want: &[f64]) -> Result<(), String> {
    for (i, (&g, &w)) in y.iter().zip(want).enumerate() {
        let ok = if w.is_nan() { g.is_nan() } else { g == w };
        if !ok {
            return Err(format!("y[{i}] = {g:?}, expected {w:?}"));
        }
    }
    Ok(())
}

fn entries(big: f64) -> Vec<Entry> {
    let ones = vec![1.0; 4];
    let zeros = vec![0.0; 4];
    vec![
        Entry {
            name: "stored_nan",
            shape: (4, 4),
            a: base(NAN, 4.0),
            x: ones.clone(),
            y: zeros.clone(),
            alpha: 1.0,
            beta: 0.0,
            check: |y| expect(y, &[NAN, 3.0, 4.0, 5.0]),
        },
        Entry {
            name: "stored_inf",
            shape: (4, 4),
            a: base(1.0, INF),
            x: ones.clone(),
            y: zeros.clone(),
            alpha: 1.0,
            beta: 0.0,
            check: |y| {
                expect(&[y[0], y[1], y[3]], &[3.0, 3.0, 5.0])?;
                if y[2].is_finite() {
                    return Err(format!("y[2] = {:?}, expected Inf or NaN", y[2]));
                }
                Ok(())
            },
        },
        Entry {
            name: "nan_x_implicit_column",
            shape: (4, 4),
            a: base(1.0, 4.0),
            x: vec![1.0, 1.0, NAN, 1.0],
            y: zeros.clone(),
            alpha: 1.0,
            beta: 0.0,
            check: |y| expect(y, &[3.0, 3.0, 4.0, 5.0]),
        },
        Entry {
            name: "inf_x_explicit_zero",
            shape: (4, 4),
            a: base(1.0, 4.0),
            x: vec![1.0, 1.0, 1.0, INF],
            y: zeros.clone(),
            alpha: 1.0,
            beta: 0.0,
            check: |y| expect(y, &[3.0, NAN, 4.0, INF]),
        },
        Entry {
            name: "alpha_zero",
            shape: (4, 4),
            a: base(NAN, INF),
            x: vec![NAN, INF, NAN, INF],
            y: vec![1.0, 2.0, 3.0, 4.0],
            alpha: 0.0,
            beta: 2.0,
            check: |y| expect(y, &[2.0, 4.0, 6.0, 8.0]),
        },
        Entry {
            name: "beta_zero",
            shape: (4, 4),
            a: base(1.0, 4.0),
            x: ones.clone(),
            y: vec![NAN, INF, -INF, NAN],
            alpha: 1.0,
            beta: 0.0,
            check: |y| expect(y, &[3.0, 3.0, 4.0, 5.0]),
        },
        Entry {
            name: "alpha_beta_zero",
            shape: (4, 4),
            a: base(NAN, INF),
            x: vec![NAN; 4],
            y: vec![NAN, INF, NAN, -INF],
            alpha: 0.0,
            beta: 0.0,
            check: |y| match y.iter().position(|v| *v != 0.0 || v.is_sign_negative()) {
                None => Ok(()),
                Some(i) => Err(format!("y[{i}] = {:?}, expected +0", y[i])),
            },
        },
        Entry {
            name: "overflow_cancellation",
            shape: (2, 5),
            a: vec![
                (0, 0, big),
                (0, 1, big),
                (0, 2, -big),
                (0, 3, -big),
                (1, 0, big),
                (1, 1, big),
                (1, 2, -big),
                (1, 3, -big),
                (1, 4, INF),
            ],
            x: vec![1.0; 5],
            y: vec![0.0; 2],
            alpha: 1.0,
            beta: 0.0,
            check: |y| {
                if !(y[0].is_nan() || y[0].is_infinite() || y[0] == 0.0) {
                    return Err(format!("y[0] = {:?}, expected NaN, Inf or 0", y[0]));
                }
                if !(y[1].is_nan() || y[1] == INF) {
                    return Err(format!("y[1] = {:?}, expected +Inf or NaN", y[1]));
                }
                Ok(())
            },
        },
    ]
}

fn run_one<T: Real>(e: &Entry, format: Format, policy: &ExecutionPolicy) -> Result<(), String> {
    let t = |v: f64| T::from_f64(v);
    let triples = e.a.iter().map(|&(i, j, v)| (i, j, t(v))).collect();
    let m = SparseMatrix::from_triples(e.shape.0, e.shape.1, triples, format, IndexBase::Zero)
        .map_err(|err| err.to_string())?;
    let x: Vec<T> = e.x.iter().map(|&v| t(v)).collect();
    let mut y: Vec<T> = e.y.iter().map(|&v| t(v)).collect();
    let view = m.view();
    let mut st = OperationState::new(OperationKind::Multiply);
    {
        let mut yv = DenseView::vector_mut(&mut y);
        multiply_add(
            policy,
            &mut st,
            scaled(t(e.alpha), &view),
            &DenseView::vector(&x),
            scaled_output(t(e.beta)),
            &mut yv,
        )
        .map_err(|err| err.to_string())?;
    }
    let y: Vec<f64> = y.iter().map(|v| v.to_f64()).collect();
    (e.check)(&y)
}

/// The exception table for SpMV in precision `T`, over every sparse format
/// and the sequential, deterministic-parallel and parallel policies.
pub fn exception_matrix_suite<T: Real>() -> Report {
    let max = if T::mantissa_digits() < 53 { f32::MAX as f64 } else { f64::MAX };
    let policies = [
        ("seq", ExecutionPolicy::sequential()),
        ("detpar4", ExecutionPolicy::deterministic_parallel(4)),
        ("par4", ExecutionPolicy::parallel(4)),
    ];
    let mut report = Report::default();
    for e in entries(0.75 * max) {
        for (label, policy) in &policies {
            let failure = [Format::Csr, Format::Csc, Format::Coo]
                .into_iter()
                .find_map(|f| run_one::<T>(&e, f, policy).err().map(|d| format!("{f:?}: {d}")));
            let id = format!("spmv-{}-{}-{label}", e.name, T::NAME);
            report.push(
                Record::new("spmv", &id, T::NAME, Check::Exception, failure.is_none())
                    .with_detail(failure.unwrap_or_default()),
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exception_table_passes() {
        for r in exception_matrix_suite::<f64>().records.iter().chain(&exception_matrix_suite::<f32>().records) {
            assert!(!r.failed(), "{}: {}", r.case_id, r.detail);
        }
    }
}
