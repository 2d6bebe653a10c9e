//! Checking a kernel result against the extended-precision reference and
//! its forward error bound.

use spblas::oracle::{check_entry, oracle_spmv, ErrorBoundSpec, Summation};
use spblas::runtime::{OperationKind, OperationState};
use spblas::single::multiply;
use spblas::{CsrView, DenseView, ExecutionPolicy};

fn main() -> spblas::Result<()> {
    // One row whose terms cancel badly.
    let vals = [1.0e16f64, 1.0, -1.0e16, 1.0];
    let a = CsrView::new(1, 4, 4, &[0usize, 4], &[0usize, 1, 2, 3], &vals);
    let x = [1.0; 4];
    let mut y = [0.0];
    multiply(
        &ExecutionPolicy::sequential(),
        &mut OperationState::new(OperationKind::Multiply),
        &a,
        &DenseView::vector(&x),
        &mut DenseView::vector_mut(&mut y),
    )?;

    let reference = oracle_spmv(&a, &DenseView::vector(&x), 0.0, &DenseView::vector(&y));
    let spec = ErrorBoundSpec::for_scalar::<f64>(Summation::Serial);
    let check = check_entry(y[0], &reference, 0, 0, &spec);
    println!("computed {}, exact {}", y[0], reference.at(0, 0).re.to_f64());
    println!("error {:e} <= bound {:e}: {}", check.error, check.bound, check.pass);
    Ok(())
}
