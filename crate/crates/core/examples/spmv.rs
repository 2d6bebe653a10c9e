//! y = alpha * op(A) * x + beta * y, with and without a transpose.

use spblas::runtime::{OperationKind, OperationState};
use spblas::single::{multiply, multiply_add, scaled_output};
use spblas::{scaled, transposed, CsrView, DenseLayout, DenseView, ExecutionPolicy};

fn main() -> spblas::Result<()> {
    // [2 . 1]
    // [. 3 .]
    let a = CsrView::new(2, 3, 3, &[0usize, 2, 3], &[0usize, 2, 1], &[2.0f64, 1.0, 3.0]);
    let policy = ExecutionPolicy::sequential();
    let mut state = OperationState::new(OperationKind::Multiply);

    let x = [1.0, 2.0, 3.0];
    let mut y = [0.0; 2];
    multiply(&policy, &mut state, &a, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y))?;
    println!("A x = {y:?}");

    // y = -1 * A x + 0.5 * y, reusing the same state.
    multiply_add(
        &policy,
        &mut state,
        scaled(-1.0, &a),
        &DenseView::vector(&x),
        scaled_output(0.5),
        &mut DenseView::vector_mut(&mut y),
    )?;
    println!("-A x + y/2 = {y:?}");

    // A^T times a 2x2 column-major block (SpMM).
    let xs = [1.0, 1.0, 0.0, 1.0];
    let mut ys = [0.0; 6];
    let xv = DenseView::matrix(2, 2, DenseLayout::ColMajor, &xs)?;
    let mut yv = DenseView::matrix_mut(3, 2, DenseLayout::RowMajor, &mut ys)?;
    multiply(&policy, &mut state, transposed(&a, false), &xv, &mut yv)?;
    println!("A^T X (row-major 3x2) = {ys:?}");
    Ok(())
}
