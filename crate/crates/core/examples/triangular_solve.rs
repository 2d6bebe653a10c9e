//! Triangular solves: sequential, and level-scheduled through a handle.

use spblas::runtime::{OperationKind, OperationState};
use spblas::single::{triangular_solve, triangular_solve_inspect};
use spblas::{make_handle, transposed, CsrView, DenseView, ExecutionPolicy};

fn main() -> spblas::Result<()> {
    // Lower bidiagonal, 6x6: diag 2, subdiag -1.
    let n = 6;
    let mut offsets = vec![0usize];
    let (mut cols, mut vals) = (Vec::new(), Vec::new());
    for i in 0..n {
        if i > 0 {
            cols.push(i - 1);
            vals.push(-1.0f64);
        }
        cols.push(i);
        vals.push(2.0);
        offsets.push(cols.len());
    }
    let t = CsrView::new(n, n, cols.len(), &offsets, &cols, &vals);
    let b = vec![1.0; n];

    let mut x = vec![0.0; n];
    let mut state = OperationState::new(OperationKind::TriangularSolve);
    triangular_solve(&ExecutionPolicy::sequential(), &mut state, &t, &DenseView::vector(&b), &mut DenseView::vector_mut(&mut x))?;
    println!("L x = 1:   {x:?}");

    // The transpose is upper triangular; orientation comes from the pattern.
    triangular_solve(
        &ExecutionPolicy::sequential(),
        &mut state,
        transposed(&t, false),
        &DenseView::vector(&b),
        &mut DenseView::vector_mut(&mut x),
    )?;
    println!("L^T x = 1: {x:?}");

    // Inspect caches the dependency levels in the handle; a parallel
    // solve then gives the same bits as the sequential one.
    let handle = make_handle(CsrView::new(n, n, cols.len(), &offsets, &cols, &vals), None)?;
    let par = ExecutionPolicy::parallel(4);
    let mut y = vec![0.0; n];
    let mut state = OperationState::new(OperationKind::TriangularSolve);
    triangular_solve_inspect(&par, &mut state, &handle, &DenseView::vector(&b), &DenseView::vector(&y))?;
    triangular_solve(&par, &mut state, &handle, &DenseView::vector(&b), &mut DenseView::vector_mut(&mut y))?;
    println!("levels cached: {:?}", handle.store().summary());
    triangular_solve(&ExecutionPolicy::sequential(), &mut OperationState::new(OperationKind::TriangularSolve), &t, &DenseView::vector(&b), &mut DenseView::vector_mut(&mut x))?;
    println!("parallel == sequential: {}", x.iter().zip(&y).all(|(a, b)| a.to_bits() == b.to_bits()));
    Ok(())
}
