//! Execution policies and the process-wide reproducibility property.

use spblas::runtime::{OperationKind, OperationState};
use spblas::single::matrix_frob_norm;
use spblas::{get_cnr_property, set_cnr_property, CnrProperty, CsrView, ExecutionPolicy};

fn norm_bits(vals: &[f64], offsets: &[usize], cols: &[usize], threads: usize) -> u64 {
    let n = offsets.len() - 1;
    let a = CsrView::new(n, n, vals.len(), offsets, cols, vals);
    let mut st = OperationState::new(OperationKind::FrobNorm);
    matrix_frob_norm(&ExecutionPolicy::parallel(threads), &mut st, &a)
        .expect("valid matrix")
        .to_bits()
}

fn main() {
    // A wide dense band whose entries span many magnitudes.
    let n: usize = 400;
    let (mut offsets, mut cols, mut vals) = (vec![0usize], Vec::new(), Vec::new());
    for i in 0..n {
        for j in i.saturating_sub(150)..(i + 150).min(n) {
            cols.push(j);
            vals.push(((i * 31 + j * 17) % 97) as f64 * 10f64.powi((j % 13) as i32 - 6));
        }
        offsets.push(cols.len());
    }

    let previous = get_cnr_property();
    for prop in [CnrProperty::Default, CnrProperty::Cnr, CnrProperty::StrictCnr] {
        set_cnr_property(prop);
        let bits: Vec<u64> = [1, 2, 4, 8].iter().map(|&t| norm_bits(&vals, &offsets, &cols, t)).collect();
        let same = bits.iter().all(|&b| b == bits[0]);
        println!("{prop:?}: identical across 1/2/4/8 threads: {same}");
    }
    set_cnr_property(previous);
}
