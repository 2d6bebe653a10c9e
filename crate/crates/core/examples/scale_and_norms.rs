//! In-place scaling and the infinity/Frobenius norms.

use spblas::runtime::{OperationKind, OperationState};
use spblas::single::{matrix_frob_norm, matrix_inf_norm, scale};
use spblas::{scaled, CsrView, ExecutionPolicy};

fn main() -> spblas::Result<()> {
    let offsets = [0usize, 2, 3];
    let cols = [0usize, 1, 1];
    let mut vals = vec![3.0f64, -4.0, 12.0];
    let p = ExecutionPolicy::sequential();

    {
        let a = CsrView::new(2, 2, 3, &offsets, &cols, &vals);
        let inf = matrix_inf_norm(&p, &mut OperationState::new(OperationKind::InfNorm), &a)?;
        let frob = matrix_frob_norm(&p, &mut OperationState::new(OperationKind::FrobNorm), &a)?;
        println!("|A|_inf = {inf}, |A|_F = {frob}");
        // Scalars on the operand apply to the norm too.
        let half = matrix_inf_norm(&p, &mut OperationState::new(OperationKind::InfNorm), scaled(-0.5, &a))?;
        println!("|-A/2|_inf = {half}");
    }

    // Scaling writes through a view over mutable values.
    let mut a = CsrView::new(2, 2, 3, &offsets, &cols, &mut vals);
    scale(&p, &mut OperationState::new(OperationKind::Scale), 2.0, &mut a)?;
    println!("2A values: {vals:?}");
    Ok(())
}
