use std::collections::BTreeMap;

use proptest::prelude::*;
use spblas::formats::{SparseMatrix, SparseView};
use spblas::io::{mm_read_from, mm_write_to, read_vector_from, write_vector_to};
use spblas::single::multiply;
use spblas::staged::{add_compute, add_fill, convert_compute, convert_fill, transpose_compute, transpose_fill};
use spblas::{DenseView, ExecutionPolicy, Format, IndexBase, OperationKind, OperationState};

type Triples = Vec<(usize, usize, u64)>;

/// A matrix shape plus distinct coordinates with arbitrary values.
fn matrix(values: impl Strategy<Value = f64> + Clone) -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, f64)>)> {
    (1usize..12, 1usize..12).prop_flat_map(move |(m, n)| {
        let entries = proptest::collection::btree_map((0..m, 0..n), values.clone(), 0..=m * n);
        (Just(m), Just(n), entries.prop_map(|e: BTreeMap<_, _>| e.into_iter().map(|((i, j), v)| (i, j, v)).collect()))
    })
}

fn small_int() -> impl Strategy<Value = f64> + Clone {
    (-64i32..=64).prop_map(f64::from)
}

fn formats() -> impl Strategy<Value = Format> {
    prop_oneof![Just(Format::Csr), Just(Format::Csc), Just(Format::Coo)]
}

fn bits(view: &SparseView<'_, f64>) -> Triples {
    let mut t: Triples = view.as_ref().triples().map(|(i, j, v)| (i, j, v.to_bits())).collect();
    t.sort_unstable();
    t
}

fn sorted(triples: &[(usize, usize, f64)]) -> Triples {
    let mut t: Triples = triples.iter().map(|&(i, j, v)| (i, j, v.to_bits())).collect();
    t.sort_unstable();
    t
}

fn build(m: usize, n: usize, t: &[(usize, usize, f64)], format: Format) -> SparseMatrix<f64> {
    SparseMatrix::from_triples(m, n, t.to_vec(), format, IndexBase::Zero).unwrap()
}

fn policy(par: bool) -> ExecutionPolicy {
    if par {
        ExecutionPolicy::deterministic_parallel(3)
    } else {
        ExecutionPolicy::sequential()
    }
}

proptest! {
    #[test]
    fn convert_preserves_entries(
        (m, n, t) in matrix(any::<f64>()),
        from in formats(),
        to in formats(),
        par in any::<bool>(),
    ) {
        let a = build(m, n, &t, from);
        let av = a.view();
        let p = policy(par);
        let mut st = OperationState::new(OperationKind::Convert);
        let c = SparseMatrix::staged(&mut st, to, m, n, IndexBase::Zero,
            |st, c| convert_compute(&p, st, &av, c),
            |st, c| convert_fill(&p, st, &av, c)).unwrap();
        prop_assert_eq!(c.format(), to);
        prop_assert_eq!(bits(&c.view()), sorted(&t));
    }

    #[test]
    fn transpose_twice_is_identity(
        (m, n, t) in matrix(any::<f64>()),
        format in formats(),
        par in any::<bool>(),
    ) {
        let a = build(m, n, &t, format);
        let av = a.view();
        let p = policy(par);
        let mut st = OperationState::new(OperationKind::Transpose);
        let at = SparseMatrix::staged(&mut st, Format::Csr, n, m, IndexBase::Zero,
            |st, c| transpose_compute(&p, st, &av, c, false),
            |st, c| transpose_fill(&p, st, &av, c, false)).unwrap();
        let atv = at.view();
        let mut st = OperationState::new(OperationKind::Transpose);
        let att = SparseMatrix::staged(&mut st, Format::Csc, m, n, IndexBase::Zero,
            |st, c| transpose_compute(&p, st, &atv, c, false),
            |st, c| transpose_fill(&p, st, &atv, c, false)).unwrap();
        prop_assert_eq!(bits(&att.view()), sorted(&t));
    }

    #[test]
    fn integer_spmv_is_exact(
        (m, n, t) in matrix(small_int()),
        format in formats(),
        x in proptest::collection::vec(small_int(), 11),
        par in any::<bool>(),
    ) {
        let a = build(m, n, &t, format);
        let mut want = vec![0.0; m];
        for &(i, j, v) in &t {
            want[i] += v * x[j];
        }
        let mut y = vec![f64::NAN; m];
        let mut st = OperationState::new(OperationKind::Multiply);
        multiply(&policy(par), &mut st, a.view(), &DenseView::vector(&x[..n]), &mut DenseView::vector_mut(&mut y)).unwrap();
        prop_assert_eq!(y, want);
    }

    #[test]
    fn add_is_pattern_union(
        (m, n, t) in matrix(small_int()),
        u in proptest::collection::vec((0usize..12, 0usize..12, small_int()), 0..30),
        par in any::<bool>(),
    ) {
        let mut other: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, v) in u {
            other.insert((i % m, j % n), v);
        }
        let u: Vec<_> = other.iter().map(|(&(i, j), &v)| (i, j, v)).collect();
        let (a, b) = (build(m, n, &t, Format::Csr), build(m, n, &u, Format::Coo));
        let (av, bv) = (a.view(), b.view());
        let p = policy(par);
        let mut st = OperationState::new(OperationKind::Add);
        let c = SparseMatrix::staged(&mut st, Format::Csr, m, n, IndexBase::Zero,
            |st, c| add_compute(&p, st, &av, &bv, c),
            |st, c| add_fill(&p, st, &av, &bv, c)).unwrap();

        let mut want: BTreeMap<(usize, usize), f64> = t.iter().map(|&(i, j, v)| ((i, j), v)).collect();
        for (k, v) in other {
            *want.entry(k).or_insert(0.0) += v;
        }
        let want: Triples = want.into_iter().map(|((i, j), v)| (i, j, v.to_bits())).collect();
        prop_assert_eq!(bits(&c.view()), want);
    }

    #[test]
    fn matrix_market_round_trip(
        (m, n, t) in matrix(any::<f64>().prop_filter("NaN payloads are not kept", |v| !v.is_nan())),
        format in formats(),
    ) {
        let a = build(m, n, &t, format);
        let mut text = Vec::new();
        mm_write_to(&mut text, &a.view()).unwrap();
        let (back, header) = mm_read_from::<f64>(&text[..], IndexBase::Zero).unwrap();
        prop_assert_eq!((header.nrows, header.ncols, header.entries), (m, n, t.len()));
        prop_assert_eq!(bits(&back.view()), sorted(&t));
    }

    #[test]
    fn vector_round_trip(v in proptest::collection::vec(any::<f32>().prop_filter("finite or inf", |v| !v.is_nan()), 0..40)) {
        let mut text = Vec::new();
        write_vector_to(&mut text, &v).unwrap();
        let back: Vec<f32> = read_vector_from(&text[..]).unwrap();
        prop_assert_eq!(
            back.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            v.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }
}
