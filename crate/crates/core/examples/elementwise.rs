//! Sparse sum and element-wise product. Entries that cancel stay stored.

use spblas::formats::SparseMatrix;
use spblas::runtime::{OperationKind, OperationState};
use spblas::staged::{add_compute, add_fill, multiply_elementwise_compute, multiply_elementwise_fill};
use spblas::{scaled, CooView, CsrView, ExecutionPolicy, Format, IndexBase};

fn main() -> spblas::Result<()> {
    // A = [1 2 .; . . 3], B = [1 . 4; . 5 .] in different formats.
    let a = CsrView::new(2, 3, 3, &[0usize, 2, 3], &[0usize, 1, 2], &[1.0f64, 2.0, 3.0]);
    let b = CooView::new(2, 3, 3, &[0usize, 0, 1], &[0usize, 2, 1], &[1.0f64, 4.0, 5.0]);
    let p = ExecutionPolicy::sequential();

    // A - B: (0, 0) cancels to an explicit zero.
    let mut st = OperationState::new(OperationKind::Add);
    let diff = SparseMatrix::staged(
        &mut st,
        Format::Csr,
        2,
        3,
        IndexBase::Zero,
        |st, c| add_compute(&p, st, &a, scaled(-1.0, &b), c),
        |st, c| add_fill(&p, st, &a, scaled(-1.0, &b), c),
    )?;
    println!("A - B = {:?}", diff.triples());

    let mut st = OperationState::new(OperationKind::MultiplyElementwise);
    let prod = SparseMatrix::staged(
        &mut st,
        Format::Coo,
        2,
        3,
        IndexBase::One,
        |st, c| multiply_elementwise_compute(&p, st, &a, &b, c),
        |st, c| multiply_elementwise_fill(&p, st, &a, &b, c),
    )?;
    println!("A .* B = {:?}", prod.triples());
    Ok(())
}
