//! Sparse times sparse through the staged protocol: compute the size,
//! allocate, fill. The symbolic/numeric split refills a fixed structure
//! when only the values change.

use spblas::formats::SparseMatrix;
use spblas::runtime::{OperationKind, OperationState};
use spblas::staged::{
    no_addend, sparse_multiply_compute, sparse_multiply_fill, sparse_multiply_numeric_compute,
    sparse_multiply_numeric_fill, sparse_multiply_symbolic_compute, sparse_multiply_symbolic_fill,
    OutputShell,
};
use spblas::{CsrView, ExecutionPolicy, Format, IndexBase};

fn main() -> spblas::Result<()> {
    // A = [1 2; . 3], B = [4 .; 5 6]
    let (ao, ac) = ([0usize, 2, 3], [0usize, 1, 1]);
    let (bo, bc) = ([0usize, 1, 3], [0usize, 0, 1]);
    let av = [1.0f64, 2.0, 3.0];
    let mut bv = vec![4.0f64, 5.0, 6.0];
    let p = ExecutionPolicy::sequential();
    let d = no_addend();

    // By hand: the caller owns every array.
    let a = CsrView::new(2, 2, 3, &ao, &ac, &av);
    let b = CsrView::new(2, 2, 3, &bo, &bc, &bv);
    let mut state = OperationState::new(OperationKind::SparseMultiply);
    sparse_multiply_compute(&p, &mut state, &a, &b, &OutputShell::<f64>::csr(2, 2), d)?;
    let nnz = state.result_nnz()?;
    let (mut offsets, mut cols, mut vals) = (vec![0usize; 3], vec![0usize; nnz], vec![0.0; nnz]);
    let mut shell = OutputShell::csr(2, 2);
    shell.bind_offsets(&mut offsets).bind_indices(&mut cols).bind_values(&mut vals);
    sparse_multiply_fill(&p, &mut state, &a, &b, &mut shell, d)?;
    println!("C = A B: offsets {offsets:?} cols {cols:?} vals {vals:?}");

    // Symbolic once into an owned CSC result, then numeric twice.
    let mut state = OperationState::new(OperationKind::SparseMultiply);
    sparse_multiply_symbolic_compute(&p, &mut state, &a, &b, &OutputShell::<f64>::csc(2, 2), d)?;
    let mut c = SparseMatrix::<f64>::allocate(Format::Csc, 2, 2, state.result_nnz()?, IndexBase::Zero);
    sparse_multiply_symbolic_fill(&p, &mut state, &a, &b, &mut c.shell(), d)?;
    for round in 0..2 {
        let b = CsrView::new(2, 2, 3, &bo, &bc, &bv);
        sparse_multiply_numeric_compute(&p, &mut state, &a, &b, &c.shell(), d)?;
        sparse_multiply_numeric_fill(&p, &mut state, &a, &b, &mut c.shell(), d)?;
        println!("round {round}: C = {:?}", c.triples());
        bv.iter_mut().for_each(|v| *v *= 10.0);
    }
    println!("analyses {} reuses {}", state.analysis_count(), state.reuse_count());
    Ok(())
}
