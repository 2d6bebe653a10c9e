//! Brute-force reference results in extended precision.
//!
//! Everything here is built from view triples and dense reads alone; no
//! kernel of this crate is called. Values are carried in double-double
//! ([`Ext`], about 106 significand bits), so for binary32 and binary64
//! inputs the reference is accurate far below the rounding error of the
//! kernels it judges, and exact for small integer data.
//!
//! [`check_error_bound`] turns a reference value into a pass/fail verdict
//! using the classic forward bound for a sum of products:
//! `f(m) * eps * sum |x_i| |y_i| + g(m) * UN`.

mod bound;
mod ext;
mod mirror;
mod ops;

pub use bound::{
    check_entry, check_error_bound, check_with, exact_match, BoundCheck, ErrorBoundSpec, Summation,
};
pub use ext::{sum, CExt, Ext};
pub use mirror::DenseMirror;
pub use ops::{
    oracle_add, oracle_convert_dense, oracle_dense_pattern, oracle_frob_norm, oracle_gemm, oracle_hadamard,
    oracle_inf_norm, oracle_pattern, oracle_sddmm, oracle_spmv, oracle_trisolve,
    oracle_trisolve_rows, pattern_of, PatternKind,
};

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::formats::{scaled, CsrView, DenseView};

    #[test]
    fn identity_product_pattern() {
        let id = CsrView::<f64>::new(3, 3, 3, &[0, 1, 2, 3], &[0, 1, 2], &[1.0; 3]);
        let b = CsrView::<f64>::new(3, 3, 2, &[0, 1, 1, 2], &[2, 0], &[4.0, 5.0]);
        let p = oracle_pattern(PatternKind::Product, &id, Some(&b));
        assert_eq!(p, pattern_of(&b));
    }

    #[test]
    fn integer_spmv_is_exact() {
        let v = [1024.0, -3.0, 7.0, -1024.0];
        let a = CsrView::<f64>::new(2, 3, 4, &[0, 2, 4], &[0, 2, 1, 2], &v);
        let xs = [3.0, -1024.0, 5.0];
        let x = DenseView::vector(&xs);
        let y = oracle_spmv(scaled(2.0, &a), &x, 0.0, &x);
        assert_eq!(y.at(0, 0).round::<f64>(), 2.0 * (1024.0 * 3.0 - 15.0));
        assert_eq!(y.at(1, 0).round::<f64>(), 2.0 * (-7.0 * 1024.0 - 5120.0));
        assert_eq!(y.terms[0], 3);
    }

    #[test]
    fn implicit_zeros_never_touch_x() {
        let a = CsrView::<f64>::new(2, 2, 1, &[0, 1, 1], &[0], &[2.0]);
        let xs = [1.0, f64::NAN];
        let x = DenseView::vector(&xs);
        let y = oracle_spmv(&a, &x, 0.0, &x);
        assert_eq!(y.at(0, 0).round::<f64>(), 2.0);
        assert_eq!(y.at(1, 0).round::<f64>().to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn exact_and_empty_checks() {
        let spec = ErrorBoundSpec::for_scalar::<f64>(Summation::Serial);
        let c = check_error_bound(0.1f64, CExt::of(0.1f64), &spec, &[0.1]);
        assert!(c.pass && c.slack == 0.0);
        let c = check_error_bound(0.0f64, CExt::ZERO, &spec, &[]);
        assert!(c.pass);
        assert!(exact_match(-0.0f64, sum(&[CExt::of(-0.0f64)])));
        assert!(!exact_match(0.0f64, sum(&[CExt::of(-0.0f64)])));
    }

    #[test]
    fn tree_order_function() {
        let spec = ErrorBoundSpec::for_scalar::<f32>(Summation::Tree);
        let f: Vec<f64> = [1, 2, 3, 4, 5, 1024].iter().map(|&m| spec.f(m)).collect();
        assert_eq!(f, vec![1.0, 2.0, 3.0, 3.0, 4.0, 11.0]);
        assert_eq!(spec.eps, 2f64.powi(-24));
    }

    #[test]
    fn random_serial_dot_products_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = ErrorBoundSpec::for_scalar::<f64>(Summation::Serial);
        let n = 1000;
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut s = x[0] * y[0];
            for k in 1..n {
                s += x[k] * y[k];
            }
            let terms: Vec<CExt> = x.iter().zip(&y).map(|(a, b)| CExt::of(*a) * CExt::of(*b)).collect();
            let mags: Vec<f64> = terms.iter().map(|t| t.abs().to_f64()).collect();
            let c = check_error_bound(s, sum(&terms), &spec, &mags);
            assert!(c.pass, "{c:?}");
            worst = worst.max(c.slack);
        }
        assert!(worst < 1.0);
    }

    #[test]
    fn bound_catches_a_wrong_result() {
        let spec = ErrorBoundSpec::for_scalar::<f32>(Summation::Serial);
        let c = check_error_bound(1.001f32, CExt::of(1.0f32), &spec, &[1.0]);
        assert!(!c.pass && c.slack > 1.0);
        let c = check_error_bound(f32::INFINITY, CExt::of(f32::NAN), &spec, &[]);
        assert!(!c.pass);
        let c = check_error_bound(f32::NAN, CExt::of(f32::INFINITY), &spec, &[]);
        assert!(c.pass);
    }

    #[test]
    fn trisolve_by_substitution() {
        // [[2, 0], [1, 4]] x = [2, 9] -> x = [1, 2]
        let t = CsrView::<f64>::new(2, 2, 3, &[0, 1, 3], &[0, 0, 1], &[2.0, 1.0, 4.0]);
        let bs = [2.0, 9.0];
        let b = DenseView::vector(&bs);
        let x = oracle_trisolve(&t, &b);
        assert_eq!((x.at(0, 0).round::<f64>(), x.at(1, 0).round::<f64>()), (1.0, 2.0));
        let rows = oracle_trisolve_rows(&t, &b, &[1.0, 2.0]);
        assert_eq!(rows.at(1, 0).round::<f64>(), 2.0);
    }

    #[test]
    fn norms() {
        let a = CsrView::<f64>::new(2, 2, 3, &[0, 2, 3], &[0, 1, 1], &[3.0, -4.0, 6.0]);
        assert_eq!(oracle_inf_norm(scaled(-0.5, &a)).at(0, 0).round::<f64>(), 3.5);
        assert_eq!(oracle_frob_norm(&a).at(0, 0).round::<f64>(), 61f64.sqrt());
    }
}
