use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spblas::conformance::{random_matrix, ValueKind};
use spblas::formats::{SparseMatrix, SparseView};
use spblas::io::{mm_read, mm_read_from, mm_write};
use spblas::single::multiply;
use spblas::staged::{no_addend, sparse_multiply_compute, sparse_multiply_fill};
use spblas::{DenseView, ExecutionPolicy, Format, IndexBase, OperationKind, OperationState};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spblas"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn spblas")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn bits(view: &SparseView<'_, f64>) -> Vec<(usize, usize, u64)> {
    let mut t: Vec<_> = view.as_ref().triples().map(|(i, j, v)| (i, j, v.to_bits())).collect();
    t.sort_unstable();
    t
}

fn random_file(dir: &Path, name: &str, seed: u64, rows: usize, cols: usize) -> SparseMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_matrix::<f64>(&mut rng, rows, cols, 0.3, ValueKind::Uniform);
    mm_write(dir.join(name), &m.view()).unwrap();
    m
}

#[test]
fn identity_times_ones() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("I.mtx"),
        "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("ones.vec"), "1\n1\n1\n").unwrap();
    let y: Vec<f64> = stdout(&run(dir.path(), &["spmv", "I.mtx", "ones.vec"]))
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(y, [1.0, 1.0, 1.0]);
}

#[test]
fn spmv_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_file(dir.path(), "a.mtx", 3, 40, 30);
    let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
    let text: String = x.iter().map(|v| format!("{v:?}\n")).collect();
    std::fs::write(dir.path().join("x.vec"), text).unwrap();

    let got: Vec<u64> = stdout(&run(dir.path(), &["spmv", "a.mtx", "x.vec"]))
        .lines()
        .map(|l| l.parse::<f64>().unwrap().to_bits())
        .collect();

    // The CLI reads the file back as COO; do the same here.
    let (a_file, _) = mm_read::<f64>(dir.path().join("a.mtx"), IndexBase::Zero).unwrap();
    assert_eq!(bits(&a_file.view()), bits(&a.view()));
    let mut y = vec![0.0; 40];
    let mut st = OperationState::new(OperationKind::Multiply);
    multiply(
        &ExecutionPolicy::sequential(),
        &mut st,
        a_file.view(),
        &DenseView::vector(&x),
        &mut DenseView::vector_mut(&mut y),
    )
    .unwrap();
    let want: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
    assert_eq!(got, want);
}

#[test]
fn spgemm_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    random_file(dir.path(), "a.mtx", 5, 25, 20);
    random_file(dir.path(), "b.mtx", 6, 20, 15);
    let (a, _) = mm_read::<f64>(dir.path().join("a.mtx"), IndexBase::Zero).unwrap();
    let (b, _) = mm_read::<f64>(dir.path().join("b.mtx"), IndexBase::Zero).unwrap();
    let (av, bv) = (a.view(), b.view());
    let p = ExecutionPolicy::sequential();
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    let want = SparseMatrix::staged(
        &mut st,
        Format::Csr,
        25,
        15,
        IndexBase::Zero,
        |st, c| sparse_multiply_compute(&p, st, &av, &bv, c, no_addend()),
        |st, c| sparse_multiply_fill(&p, st, &av, &bv, c, no_addend()),
    )
    .unwrap();

    for extra in [&[][..], &["--symbolic-numeric"][..]] {
        let mut args = vec!["spgemm", "a.mtx", "b.mtx"];
        args.extend_from_slice(extra);
        let text = stdout(&run(dir.path(), &args));
        let (got, header) = mm_read_from::<f64>(text.as_bytes(), IndexBase::Zero).unwrap();
        assert_eq!((header.nrows, header.ncols), (25, 15));
        assert_eq!(bits(&got.view()), bits(&want.view()), "{extra:?}");
    }
}

#[test]
fn convert_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_file(dir.path(), "a.mtx", 9, 30, 35);
    stdout(&run(dir.path(), &["convert", "a.mtx", "c.mtx", "--format", "csc"]));
    stdout(&run(dir.path(), &["convert", "c.mtx", "r.mtx", "--format", "csr"]));
    let (back, _) = mm_read::<f64>(dir.path().join("r.mtx"), IndexBase::Zero).unwrap();
    assert_eq!(bits(&back.view()), bits(&a.view()));
}

#[test]
fn errors_exit_nonzero_with_category() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.mtx"), "garbage\n").unwrap();
    std::fs::write(
        dir.path().join("a.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 2\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("x.vec"), "1\n2\n3\n").unwrap();
    for (args, category) in [
        (&["info", "bad.mtx"][..], "malformed_header"),
        (&["spmv", "a.mtx", "missing.vec"][..], "io"),
        (&["spmv", "a.mtx", "x.vec"][..], "shape_mismatch"),
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with(&format!("error: {category}:")), "{args:?}: {err}");
    }
}

#[test]
fn conformance_command_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&run(
        dir.path(),
        &["conformance", "--families", "spmv,transpose", "--cases", "4", "--real-only", "--jsonl", "r.jsonl"],
    ));
    assert!(text.contains("failures 0"), "{text}");
    let lines = std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
    assert!(lines.lines().count() > 10);
}
