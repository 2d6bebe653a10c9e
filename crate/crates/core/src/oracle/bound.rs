use super::ext::{CExt, Ext};
use super::mirror::DenseMirror;
use crate::scalar::{Real, Scalar};

/// Summation order a kernel declares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// Left to right, or any grouping whose longest path is no longer
    /// (fixed chunks combined pairwise included): `f(m) = m`.
    Serial,
    /// Balanced binary tree: `f(m) = ceil(log2 m) + 1`.
    Tree,
}

/// Forward error bound for a computed sum of products:
/// `|computed - exact| <= f(m) * eps * sum |x_i| |y_i| + g(m) * UN`, with
/// `g(m) = 2m`.
///
/// `m` counts the stored terms of the sum plus one for every scaling or
/// division stage the kernel applies after it (each rounds once more).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundSpec {
    /// Unit roundoff of the working format (2^-53 for binary64, 2^-24 for
    /// binary32), scaled by 4 for complex arithmetic.
    pub eps: f64,
    /// Smallest subnormal of the working format (gradual underflow).
    pub un: f64,
    pub summation: Summation,
}

impl ErrorBoundSpec {
    pub fn for_scalar<T: Scalar>(summation: Summation) -> Self {
        let u = <T::Real as Real>::epsilon().to_f64() / 2.0;
        ErrorBoundSpec {
            eps: if T::IS_COMPLEX { 4.0 * u } else { u },
            un: <T::Real as Real>::underflow_unit().to_f64(),
            summation,
        }
    }

    pub fn f(&self, m: usize) -> f64 {
        match self.summation {
            Summation::Serial => m as f64,
            Summation::Tree => {
                let m = m.max(1);
                (usize::BITS - (m - 1).leading_zeros()) as f64 + 1.0
            }
        }
    }

    pub fn g(&self, m: usize) -> f64 {
        2.0 * m as f64
    }

    /// The bound for `m` stages and `sum |x_i| |y_i| = magnitude`.
    pub fn bound(&self, m: usize, magnitude: f64) -> f64 {
        self.f(m) * self.eps * magnitude + self.g(m) * self.un
    }
}

/// Outcome of one bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub pass: bool,
    /// `|computed - exact|`, in binary64.
    pub error: f64,
    pub bound: f64,
    /// `error / bound`: 0 for an exact result, above 1 on failure.
    pub slack: f64,
}

fn non_finite_check<T: Scalar>(computed: T, exact: CExt) -> Option<BoundCheck> {
    if computed.is_finite() && exact.is_finite() {
        return None;
    }
    // NaN must stay NaN; an infinite result may surface as Inf or NaN
    let pass = if exact.is_nan() {
        computed.is_nan()
    } else if !exact.is_finite() {
        !computed.is_finite()
    } else {
        false
    };
    Some(BoundCheck {
        pass,
        error: if pass { 0.0 } else { f64::INFINITY },
        bound: 0.0,
        slack: if pass { 0.0 } else { f64::INFINITY },
    })
}

/// Checks `computed` against the extended-precision `exact` value, with the
/// magnitudes `|x_i| |y_i|` of the terms listed explicitly.
pub fn check_error_bound<T: Scalar>(
    computed: T,
    exact: CExt,
    spec: &ErrorBoundSpec,
    terms: &[f64],
) -> BoundCheck {
    let magnitude = terms.iter().fold(Ext::ZERO, |s, &t| s + Ext::from_f64(t)).to_f64();
    check_with(computed, exact, spec, terms.len(), magnitude)
}

/// Same check with `m` and the magnitude sum given directly.
pub fn check_with<T: Scalar>(
    computed: T,
    exact: CExt,
    spec: &ErrorBoundSpec,
    m: usize,
    magnitude: f64,
) -> BoundCheck {
    if let Some(c) = non_finite_check(computed, exact) {
        return c;
    }
    let error = (CExt::of(computed) - exact).abs().to_f64();
    let bound = spec.bound(m, magnitude);
    let slack = if error == 0.0 {
        0.0
    } else if bound == 0.0 {
        f64::INFINITY
    } else {
        error / bound
    };
    BoundCheck {
        pass: error <= bound,
        error,
        bound,
        slack,
    }
}

/// Checks entry `(i, j)` of an expected result.
pub fn check_entry<T: Scalar>(
    computed: T,
    expected: &DenseMirror,
    i: usize,
    j: usize,
    spec: &ErrorBoundSpec,
) -> BoundCheck {
    let k = expected.index(i, j);
    check_with(computed, expected.data[k], spec, expected.terms[k], expected.magnitude[k])
}

/// Bitwise comparison with the correctly rounded exact value.
pub fn exact_match<T: Scalar>(computed: T, exact: CExt) -> bool {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    computed.write_bytes(&mut a);
    exact.round::<T>().write_bytes(&mut b);
    a == b
}
