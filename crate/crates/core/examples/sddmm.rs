//! Sampled dense-dense product: C(i, j) = (X Y)(i, j) on C's pattern only.

use spblas::runtime::{OperationKind, OperationState};
use spblas::single::sampled_multiply;
use spblas::{CsrView, DenseLayout, DenseView, ExecutionPolicy};

fn main() -> spblas::Result<()> {
    // X is 3x2, Y is 2x3; C samples the diagonal and (0, 2).
    let x = [1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0];
    let y = [1.0, 0.0, 2.0, 0.0, 1.0, 1.0];
    let xv = DenseView::matrix(3, 2, DenseLayout::RowMajor, &x)?;
    let yv = DenseView::matrix(2, 3, DenseLayout::RowMajor, &y)?;

    let offsets = [0usize, 2, 3, 4];
    let cols = [0usize, 2, 1, 2];
    let mut vals = vec![f64::NAN; 4]; // old values are never read
    let mut c = CsrView::new(3, 3, 4, &offsets, &cols, &mut vals);
    sampled_multiply(
        &ExecutionPolicy::deterministic_parallel(2),
        &mut OperationState::new(OperationKind::SampledMultiply),
        &xv,
        &yv,
        &mut c,
    )?;
    for (i, j, v) in c.triples() {
        println!("C({i}, {j}) = {v}");
    }
    Ok(())
}
