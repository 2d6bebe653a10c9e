//! Handles cache analysis between calls; a counting memory resource shows
//! where the library allocates and that everything is returned.

use std::sync::Arc;

use spblas::runtime::{CountingResource, MemoryResource, OperationKind, OperationState};
use spblas::single::{multiply, multiply_inspect};
use spblas::{make_handle, CsrView, DenseView, ExecutionPolicy};

fn main() -> spblas::Result<()> {
    let counting = CountingResource::new();
    let res: Arc<dyn MemoryResource> = counting.clone();
    let n = 1000;
    let offsets: Vec<usize> = (0..=n).collect();
    let cols: Vec<usize> = (0..n).map(|i| (i * 7) % n).collect();
    let mut vals = vec![1.0f64; n];
    let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mut y = vec![0.0; n];
    {
        let mut handle = make_handle(CsrView::new(n, n, n, &offsets, &cols, &mut vals), Some(res.clone()))?;
        let policy = ExecutionPolicy::parallel(4);
        let mut state = OperationState::with_resource(OperationKind::Multiply, res.clone());
        multiply_inspect(&policy, &mut state, &handle, &DenseView::vector(&x), &DenseView::vector(&y))?;
        println!("after inspect: {:?}, {} live allocations", handle.store().summary(), counting.outstanding());
        multiply(&policy, &mut state, &handle, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y))?;

        // Values may change through the handle; the structure may not.
        handle.values_mut()?.iter_mut().for_each(|v| *v = 2.0);
        multiply(&policy, &mut state, &handle, &DenseView::vector(&x), &mut DenseView::vector_mut(&mut y))?;
        println!("y[1] = {} (2 * x[7])", y[1]);
    }
    println!(
        "allocations {}, outstanding {}, peak bytes {}",
        counting.allocations(),
        counting.outstanding(),
        counting.peak_bytes()
    );
    Ok(())
}
