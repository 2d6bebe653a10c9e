use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::formats::{scaled, transposed, CsrView, DenseLayout, DenseView, Format, IndexBase};
use crate::runtime::{CountingResource, ExecutionPolicy, OperationKind, OperationState, Phase};

type Triples<T> = Vec<(usize, usize, T)>;

fn seq() -> ExecutionPolicy {
    ExecutionPolicy::sequential()
}

fn read<T: crate::Scalar>(c: &OutputShell<'_, T>) -> Triples<T> {
    c.view().unwrap().as_ref().triples().collect()
}

/// Runs the fused protocol for `C = A * B (+ D)` into a fresh CSR output.
fn spgemm(
    policy: &ExecutionPolicy,
    state: &mut OperationState<f64>,
    a: &CsrView<'_, f64>,
    b: &CsrView<'_, f64>,
    d: Option<&CsrView<'_, f64>>,
) -> Triples<f64> {
    let mut c = OutputShell::csr(a.nrows(), b.ncols());
    sparse_multiply_compute(policy, state, a, b, &c, d).unwrap();
    let nnz = state.result_nnz().unwrap();
    let (mut ro, mut ci, mut v) = (vec![0; a.nrows() + 1], vec![0; nnz], vec![0.0; nnz]);
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    sparse_multiply_fill(policy, state, a, b, &mut c, d).unwrap();
    read(&c)
}

// A = [[1, 2, 0], [0, 0, 3]], B = [[1, 0], [0, 1], [4, 5]]
const AO: [usize; 3] = [0, 2, 3];
const AC: [usize; 3] = [0, 1, 2];
const AV: [f64; 3] = [1.0, 2.0, 3.0];
const BO: [usize; 4] = [0, 1, 2, 4];
const BC: [usize; 4] = [0, 1, 0, 1];
const BV: [f64; 4] = [1.0, 1.0, 4.0, 5.0];

#[test]
fn spgemm_fused() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    let c = spgemm(&seq(), &mut st, &a, &b, None);
    assert_eq!(c, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 12.0), (1, 1, 15.0)]);
    assert_eq!(st.phase(), Phase::Filled);
}

#[test]
fn spgemm_addend_and_scaling() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    // D = [[0, 0], [0, 1]] stored at (1, 1) only
    let d = CsrView::new(2, 2, 1, &[0, 0, 1], &[1], &[10.0]);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    let mut c = OutputShell::csr(2, 2);
    let sa = scaled(2.0, &a);
    let sd = scaled(-1.0, &d);
    sparse_multiply_compute(&seq(), &mut st, sa, &b, &c, Some(&sd)).unwrap();
    assert_eq!(st.result_nnz().unwrap(), 4);
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 4], [0.0; 4]);
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    sparse_multiply_fill(&seq(), &mut st, sa, &b, &mut c, Some(&sd)).unwrap();
    assert_eq!(read(&c), vec![(0, 0, 2.0), (0, 1, 4.0), (1, 0, 24.0), (1, 1, 20.0)]);
}

#[test]
fn cancellation_stays_stored() {
    let a = CsrView::new(1, 2, 2, &[0, 2], &[0, 1], &[1.0, 1.0]);
    let b = CsrView::new(2, 1, 2, &[0, 1, 2], &[0, 0], &[1.0, -1.0]);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    assert_eq!(spgemm(&seq(), &mut st, &a, &b, None), vec![(0, 0, 0.0)]);
}

#[test]
fn output_formats_and_base() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    let want = vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 12.0), (1, 1, 15.0)];
    for format in [Format::Csr, Format::Csc, Format::Coo] {
        let mut st = OperationState::new(OperationKind::SparseMultiply);
        let mut c = OutputShell::<f64, u32, u32>::new(format, 2, 2).with_base(IndexBase::One);
        sparse_multiply_compute(&seq(), &mut st, &a, &b, &c, no_addend()).unwrap();
        let nnz = st.result_nnz().unwrap();
        let (mut off, mut rows, mut idx, mut v) = (vec![0u32; c.offsets_len()], vec![0u32; nnz], vec![0u32; nnz], vec![0.0; nnz]);
        if format == Format::Coo {
            c.bind_row_indices(&mut rows);
        } else {
            c.bind_offsets(&mut off);
        }
        c.bind_indices(&mut idx).bind_values(&mut v);
        sparse_multiply_fill(&seq(), &mut st, &a, &b, &mut c, no_addend()).unwrap();
        let mut got: Triples<f64> = c.view().unwrap().as_ref().triples().collect();
        got.sort_by_key(|t| (t.0, t.1));
        assert_eq!(got, want, "{format:?}");
        assert_eq!(c.view().unwrap().as_ref().base(), IndexBase::One);
    }
}

#[test]
fn phase_errors_leave_state_alone() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 4], [0.0; 4]);
    let mut c = OutputShell::csr(2, 2);
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);

    let e = sparse_multiply_fill(&seq(), &mut st, &a, &b, &mut c, no_addend()).unwrap_err();
    assert!(matches!(e, Error::Phase { phase: Phase::Created, .. }));
    assert!(matches!(
        sparse_multiply_numeric_compute(&seq(), &mut st, &a, &b, &c, no_addend()),
        Err(Error::Phase { .. })
    ));
    assert_eq!(st.phase(), Phase::Created);

    sparse_multiply_compute(&seq(), &mut st, &a, &b, &c, no_addend()).unwrap();
    // fused state refuses the split calls
    assert!(matches!(
        sparse_multiply_symbolic_fill(&seq(), &mut st, &a, &b, &mut c, no_addend()),
        Err(Error::Phase { .. })
    ));
    assert!(matches!(
        sparse_multiply_inspect(&seq(), &mut st, &a, &b, &c, no_addend()),
        Err(Error::Phase { .. })
    ));
    assert_eq!(st.phase(), Phase::Computed);
    assert!(!st.is_split());
    sparse_multiply_fill(&seq(), &mut st, &a, &b, &mut c, no_addend()).unwrap();

    let mut wrong = OperationState::<f64>::new(OperationKind::Add);
    assert!(matches!(
        sparse_multiply_compute(&seq(), &mut wrong, &a, &b, &c, no_addend()),
        Err(Error::StateKind { .. })
    ));
}

#[test]
fn shape_mismatch() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    let c = OutputShell::<f64>::csr(2, 2);
    assert!(matches!(
        sparse_multiply_compute(&seq(), &mut st, &a, &a, &c, no_addend()),
        Err(Error::ShapeMismatch(_))
    ));
    assert_eq!(st.phase(), Phase::Created);
}

#[test]
fn reuse_only_for_identical_structure() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    spgemm(&seq(), &mut st, &a, &b, None);
    let av2 = [5.0, 6.0, 7.0];
    let a2 = CsrView::new(2, 3, 3, &AO, &AC, &av2);
    let c = spgemm(&seq(), &mut st, &a2, &b, None);
    assert_eq!((st.analysis_count(), st.reuse_count()), (1, 1));
    assert_eq!(c[2], (1, 0, 28.0));
    let a3 = CsrView::new(2, 3, 3, &[0, 1, 3], &[0, 1, 2], &AV);
    spgemm(&seq(), &mut st, &a3, &b, None);
    assert_eq!((st.analysis_count(), st.reuse_count()), (2, 1));
}

#[test]
fn split_refills_values() {
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 4], [f64::NAN; 4]);
    let mut c = OutputShell::csr(2, 2);
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    sparse_multiply_symbolic_compute(&seq(), &mut st, &a, &b, &c, no_addend()).unwrap();
    assert!(st.is_split());
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    sparse_multiply_symbolic_fill(&seq(), &mut st, &a, &b, &mut c, no_addend()).unwrap();
    assert!(matches!(c.view(), Err(Error::OutputUnbound)));
    assert!(matches!(
        sparse_multiply_numeric_fill(&seq(), &mut st, &a, &b, &mut c, no_addend()),
        Err(Error::Phase { .. })
    ));
    for scale in [1.0, 2.0] {
        let av: Vec<f64> = AV.iter().map(|x| x * scale).collect();
        let a = CsrView::new(2, 3, 3, &AO, &AC, &av);
        sparse_multiply_numeric_compute(&seq(), &mut st, &a, &b, &c, no_addend()).unwrap();
        sparse_multiply_numeric_fill(&seq(), &mut st, &a, &b, &mut c, no_addend()).unwrap();
        assert_eq!(read(&c)[3], (1, 1, 15.0 * scale));
    }
    assert_eq!(st.analysis_count(), 1);

    // new structure: numeric phase refuses, state keeps its phase
    let a3 = CsrView::new(2, 3, 3, &[0, 1, 3], &[0, 1, 2], &AV);
    let e = sparse_multiply_numeric_compute(&seq(), &mut st, &a3, &b, &c, no_addend()).unwrap_err();
    assert_eq!(e, Error::StaleStructure);
    assert_eq!(st.phase(), Phase::Filled);
    // a new symbolic compute is allowed from any split phase
    sparse_multiply_symbolic_compute(&seq(), &mut st, &a3, &b, &c, no_addend()).unwrap();
    assert_eq!(st.analysis_count(), 2);
}

#[test]
fn fill_detects_stale_structure() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    let a3 = CsrView::new(2, 3, 3, &[0, 1, 3], &[0, 1, 2], &AV);
    let mut st = OperationState::new(OperationKind::SparseMultiply);
    let mut c = OutputShell::csr(2, 2);
    sparse_multiply_compute(&seq(), &mut st, &a, &b, &c, no_addend()).unwrap();
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 4], [0.0; 4]);
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    assert_eq!(
        sparse_multiply_fill(&seq(), &mut st, &a3, &b, &mut c, no_addend()),
        Err(Error::StaleStructure)
    );
    assert_eq!(ro, [0; 3]);
}

#[test]
fn parallel_matches_sequential() {
    let n = 60;
    let mut off = vec![0usize];
    let (mut cols, mut vals) = (vec![], vec![]);
    for i in 0..n {
        for j in (0..n).filter(|j| (i * 7 + j * 3) % 5 == 0) {
            cols.push(j);
            vals.push(((i * 31 + j * 17) % 13) as f64 / 7.0 - 0.9);
        }
        off.push(cols.len());
    }
    let a = CsrView::new(n, n, cols.len(), &off, &cols, &vals);
    let mut s1 = OperationState::new(OperationKind::SparseMultiply);
    let want = spgemm(&seq(), &mut s1, &a, &a, Some(&a));
    for t in [2, 3, 8] {
        let mut s = OperationState::new(OperationKind::SparseMultiply);
        let got = spgemm(&ExecutionPolicy::deterministic_parallel(t), &mut s, &a, &a, Some(&a));
        assert!(want.iter().zip(&got).all(|(x, y)| x.0 == y.0 && x.1 == y.1 && x.2.to_bits() == y.2.to_bits()));
        assert_eq!(want.len(), got.len());
    }
}

#[test]
fn add_and_elementwise() {
    // A = [[1, 0], [2, 3]], B = [[0, 4], [5, 0]]
    let a = CsrView::new(2, 2, 3, &[0, 1, 3], &[0, 0, 1], &[1.0, 2.0, 3.0]);
    let b = CsrView::new(2, 2, 2, &[0, 1, 2], &[1, 0], &[4.0, 5.0]);
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 4], [0.0; 4]);
    let mut c = OutputShell::csr(2, 2);
    let mut st = OperationState::new(OperationKind::Add);
    add_inspect(&seq(), &mut st, &a, scaled(2.0, &b), &c).unwrap();
    add_compute(&seq(), &mut st, &a, scaled(2.0, &b), &c).unwrap();
    assert_eq!(st.result_nnz(), Ok(4));
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    add_fill(&seq(), &mut st, &a, scaled(2.0, &b), &mut c).unwrap();
    assert_eq!(read(&c), vec![(0, 0, 1.0), (0, 1, 8.0), (1, 0, 12.0), (1, 1, 3.0)]);

    let (mut ro, mut ci, mut v) = ([0; 3], [0; 1], [0.0; 1]);
    let mut c = OutputShell::csr(2, 2);
    let mut st = OperationState::new(OperationKind::MultiplyElementwise);
    multiply_elementwise_compute(&seq(), &mut st, &a, &b, &c).unwrap();
    assert_eq!(st.result_nnz(), Ok(1));
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    multiply_elementwise_fill(&seq(), &mut st, &a, &b, &mut c).unwrap();
    assert_eq!(read(&c), vec![(1, 0, 10.0)]);
}

#[test]
fn convert_dense_keeps_nan_drops_zeros() {
    let data = [1.0, -0.0, f64::NAN, 0.0, 0.0, 2.0];
    let d = DenseView::matrix(2, 3, DenseLayout::RowMajor, &data).unwrap();
    let mut st = OperationState::new(OperationKind::Convert);
    let mut c = OutputShell::csc(2, 3);
    convert_compute(&seq(), &mut st, &d, &c).unwrap();
    assert_eq!(st.result_nnz(), Ok(3));
    let (mut co, mut ri, mut v) = ([0; 4], [0; 3], [0.0; 3]);
    c.bind_offsets(&mut co).bind_indices(&mut ri).bind_values(&mut v);
    convert_fill(&seq(), &mut st, &d, &mut c).unwrap();
    let got = read(&c);
    assert_eq!((got[0], got[2]), ((0, 0, 1.0), (1, 2, 2.0)));
    assert!(got[1].2.is_nan() && (got[1].0, got[1].1) == (0, 2));
    // value-dependent: every compute analyses again
    convert_compute(&seq(), &mut st, &d, &OutputShell::<f64>::csc(2, 3)).unwrap();
    assert_eq!((st.analysis_count(), st.reuse_count()), (2, 0));
}

#[test]
fn convert_sparse_keeps_explicit_zeros() {
    let a = CsrView::new(2, 2, 2, &[0, 1, 2], &[1, 0], &[0.0, 5.0]);
    let mut st = OperationState::new(OperationKind::Convert);
    let mut c = OutputShell::coo(2, 2);
    convert_compute(&seq(), &mut st, scaled(3.0, &a), &c).unwrap();
    let (mut r, mut ci, mut v) = ([0; 2], [0; 2], [0.0; 2]);
    c.bind_row_indices(&mut r).bind_indices(&mut ci).bind_values(&mut v);
    convert_fill(&seq(), &mut st, scaled(3.0, &a), &mut c).unwrap();
    assert_eq!(read(&c), vec![(0, 1, 0.0), (1, 0, 15.0)]);
}

#[test]
fn filter_records_decisions() {
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let mut st = OperationState::new(OperationKind::Filter);
    let mut c = OutputShell::csr(2, 3);
    let keep = |i: usize, j: usize, v: f64| i != j && v > 1.0;
    filter_compute(&seq(), &mut st, &a, &c, keep).unwrap();
    assert_eq!(st.result_nnz(), Ok(2));
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 2], [0.0; 2]);
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    filter_fill(&seq(), &mut st, &a, &mut c, |_, _, _| unreachable!()).unwrap();
    assert_eq!(read(&c), vec![(0, 1, 2.0), (1, 2, 3.0)]);
}

#[test]
fn transpose_conjugates() {
    let vals = [Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)];
    let a = CsrView::new(1, 2, 2, &[0, 2], &[0, 1], &vals);
    let mut st = OperationState::new(OperationKind::Transpose);
    let mut c = OutputShell::csr(2, 1);
    let alpha = Complex64::new(0.0, 1.0);
    transpose_compute(&seq(), &mut st, scaled(alpha, &a), &c, true).unwrap();
    assert_eq!(st.result_nnz(), Ok(2));
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 2], [Complex64::default(); 2]);
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    transpose_fill(&seq(), &mut st, scaled(alpha, &a), &mut c, true).unwrap();
    // conj(i * a)
    assert_eq!(
        read(&c),
        vec![(0, 0, Complex64::new(-2.0, -1.0)), (1, 0, Complex64::new(1.0, 0.0))]
    );
    // transposing a transposed operand gives back the original orientation
    let mut st = OperationState::new(OperationKind::Transpose);
    let c = OutputShell::<Complex64>::csr(1, 2);
    transpose_compute(&seq(), &mut st, transposed(&a, false), &c, false).unwrap();
}

#[test]
fn state_memory_comes_from_its_resource() {
    let res = CountingResource::new();
    let a = CsrView::new(2, 3, 3, &AO, &AC, &AV);
    let b = CsrView::new(3, 2, 4, &BO, &BC, &BV);
    {
        let mut st = OperationState::with_resource(OperationKind::SparseMultiply, res.clone());
        spgemm(&seq(), &mut st, &a, &b, None);
        assert!(res.outstanding() > 0);
        st.reset();
        assert_eq!(res.outstanding(), 0);
        spgemm(&seq(), &mut st, &a, &b, None);
    }
    assert_eq!(res.outstanding(), 0);
    assert_eq!(res.allocations(), res.deallocations());
}

#[test]
fn convert_transposed_scaled_dense() {
    let data = [1.0, 0.0, 3.0, 4.0];
    let d = DenseView::matrix(2, 2, DenseLayout::ColMajor, &data).unwrap();
    // D = [[1, 3], [0, 4]]; 2 * D^T = [[2, 0], [6, 8]]
    let src = scaled(2.0, transposed(&d, false));
    let mut st = OperationState::new(OperationKind::Convert);
    let mut c = OutputShell::csr(2, 2);
    convert_compute(&seq(), &mut st, src, &c).unwrap();
    let (mut ro, mut ci, mut v) = ([0; 3], [0; 3], [0.0; 3]);
    c.bind_offsets(&mut ro).bind_indices(&mut ci).bind_values(&mut v);
    convert_fill(&seq(), &mut st, src, &mut c).unwrap();
    assert_eq!(read(&c), vec![(0, 0, 2.0), (1, 0, 6.0), (1, 1, 8.0)]);
}
