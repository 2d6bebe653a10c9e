//! Borrowing CSR, CSC and COO views over caller arrays, and validation.

use spblas::formats::{validate, ViolationCategory};
use spblas::{CooView, CscView, CsrView, IndexBase, IsoValue};

fn main() {
    // [1 . 2]
    // [. 3 .]
    let offsets = [0usize, 2, 3];
    let cols = [0usize, 2, 1];
    let vals = [1.0f64, 2.0, 3.0];
    let csr = CsrView::new(2, 3, 3, &offsets, &cols, &vals);
    println!("csr valid: {}", validate(&csr).is_ok());

    // Same matrix, one-based CSC with u32 indices.
    let col_offsets = [1u32, 2, 3, 4];
    let rows = [1u32, 2, 1];
    let csc = CscView::new(2, 3, 3, &col_offsets, &rows, &[1.0f64, 3.0, 2.0]).with_base(IndexBase::One);
    println!("csc valid: {}", validate(&csc).is_ok());
    for (i, j, v) in csc.triples() {
        println!("  ({i}, {j}) = {v}");
    }

    // A pattern matrix: every stored entry reads as 1.
    let pattern = CooView::new(2, 3, 2, &[0usize, 1], &[2usize, 0], IsoValue::new(1.0f32, 2));
    println!("iso coo triples: {:?}", pattern.triples().collect::<Vec<_>>());

    // Unsorted columns inside a row are reported, not repaired.
    let bad = CsrView::new(2, 3, 3, &offsets, &[2usize, 0, 1], &vals);
    let report = validate(&bad);
    println!(
        "unsorted row detected: {}, first violation: {}",
        report.has(ViolationCategory::Unsorted),
        report.first().map(|v| v.to_string()).unwrap_or_default()
    );
}
