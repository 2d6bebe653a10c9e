//! Format conversion (sparse and dense sources), filtering and transposes.

use num_complex::Complex64;
use spblas::formats::SparseMatrix;
use spblas::runtime::{OperationKind, OperationState};
use spblas::staged::{
    convert_compute, convert_fill, filter_compute, filter_fill, transpose_compute, transpose_fill,
};
use spblas::{CsrView, DenseLayout, DenseView, ExecutionPolicy, Format, IndexBase};

fn main() -> spblas::Result<()> {
    let p = ExecutionPolicy::sequential();

    // Dense to CSC: only nonzero positions are kept.
    let dense = [0.0f64, 1.5, 0.0, -2.0, 0.0, 3.0];
    let dv = DenseView::matrix(2, 3, DenseLayout::RowMajor, &dense)?;
    let mut st = OperationState::new(OperationKind::Convert);
    let csc = SparseMatrix::staged(
        &mut st,
        Format::Csc,
        2,
        3,
        IndexBase::One,
        |st, c| convert_compute(&p, st, &dv, c),
        |st, c| convert_fill(&p, st, &dv, c),
    )?;
    println!("dense -> csc (one-based arrays, zero-based triples): {:?}", csc.triples());

    // Keep entries with |v| >= 2.
    let view = csc.view();
    let big = |_: usize, _: usize, v: f64| v.abs() >= 2.0;
    let mut st = OperationState::new(OperationKind::Filter);
    let kept = SparseMatrix::staged(
        &mut st,
        Format::Csr,
        2,
        3,
        IndexBase::Zero,
        |st, c| filter_compute(&p, st, &view, c, big),
        |st, c| filter_fill(&p, st, &view, c, big),
    )?;
    println!("|v| >= 2: {:?}", kept.triples());

    // Conjugate transpose of a complex matrix.
    let z = [Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)];
    let a = CsrView::new(1, 2, 2, &[0usize, 2], &[0usize, 1], &z);
    let mut st = OperationState::new(OperationKind::Transpose);
    let ah = SparseMatrix::staged(
        &mut st,
        Format::Csr,
        2,
        1,
        IndexBase::Zero,
        |st, c| transpose_compute(&p, st, &a, c, true),
        |st, c| transpose_fill(&p, st, &a, c, true),
    )?;
    println!("A^H = {:?}", ah.triples());
    Ok(())
}
