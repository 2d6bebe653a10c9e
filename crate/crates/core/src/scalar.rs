//! Element and index types accepted by the views.
//!
//! Scalars are IEEE 754 binary32/binary64, real or complex. Index and offset
//! arrays may use any of the usual integer widths; everything is normalized
//! to `usize` on read.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;

/// A matrix element type.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// The underlying real type (`Self` for real scalars).
    type Real: Real;

    const IS_COMPLEX: bool;
    /// Short type name used in reports (`f32`, `c64`, ...).
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    /// Modulus.
    fn modulus(self) -> Self::Real;
    /// Squared modulus.
    fn modulus_sqr(self) -> Self::Real;
    fn is_nan(self) -> bool;
    fn is_finite(self) -> bool;
    /// Real and imaginary parts widened to binary64.
    fn to_parts(self) -> (f64, f64);
    /// Builds a value from binary64 parts, rounding to nearest.
    fn from_parts(re: f64, im: f64) -> Self;
    /// Appends the little-endian bytes of the value.
    fn write_bytes(self, out: &mut Vec<u8>);

    /// True for `+0` and `-0` (and `0 + 0i`); NaN is not zero.
    fn is_zero(self) -> bool {
        self == Self::zero()
    }

    fn from_f64(v: f64) -> Self {
        Self::from_parts(v, 0.0)
    }
}

/// Real floating-point scalar.
pub trait Real: Scalar<Real = Self> + PartialOrd {
    /// Machine epsilon (distance from 1 to the next representable value).
    fn epsilon() -> Self;
    /// Smallest positive subnormal, the absolute error unit under gradual underflow.
    fn underflow_unit() -> Self;
    fn sqrt(self) -> Self;
    fn infinity() -> Self;
    fn nan() -> Self;
    fn to_f64(self) -> f64;
    /// Mantissa digits including the implicit bit.
    fn mantissa_digits() -> u32;
}

macro_rules! impl_real {
    ($t:ty, $bits:ty) => {
        impl Scalar for $t {
            type Real = $t;
            const IS_COMPLEX: bool = false;
            const NAME: &'static str = stringify!($t);

            #[inline]
            fn zero() -> Self {
                0.0
            }
            #[inline]
            fn one() -> Self {
                1.0
            }
            #[inline]
            fn from_real(r: Self) -> Self {
                r
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> Self {
                self.abs()
            }
            #[inline]
            fn modulus_sqr(self) -> Self {
                self * self
            }
            #[inline]
            fn is_nan(self) -> bool {
                <$t>::is_nan(self)
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            fn to_parts(self) -> (f64, f64) {
                (self as f64, 0.0)
            }
            fn from_parts(re: f64, _im: f64) -> Self {
                re as $t
            }
            fn write_bytes(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.to_bits().to_le_bytes());
            }
        }

        impl Real for $t {
            fn epsilon() -> Self {
                <$t>::EPSILON
            }
            fn underflow_unit() -> Self {
                <$t>::from_bits(1)
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn infinity() -> Self {
                <$t>::INFINITY
            }
            fn nan() -> Self {
                <$t>::NAN
            }
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn mantissa_digits() -> u32 {
                <$t>::MANTISSA_DIGITS
            }
        }
    };
}

impl_real!(f32, u32);
impl_real!(f64, u64);

macro_rules! impl_complex {
    ($t:ty, $name:literal) => {
        impl Scalar for Complex<$t> {
            type Real = $t;
            const IS_COMPLEX: bool = true;
            const NAME: &'static str = $name;

            #[inline]
            fn zero() -> Self {
                Complex::new(0.0, 0.0)
            }
            #[inline]
            fn one() -> Self {
                Complex::new(1.0, 0.0)
            }
            #[inline]
            fn from_real(r: $t) -> Self {
                Complex::new(r, 0.0)
            }
            #[inline]
            fn conj(self) -> Self {
                Complex::new(self.re, -self.im)
            }
            #[inline]
            fn modulus(self) -> $t {
                self.re.hypot(self.im)
            }
            #[inline]
            fn modulus_sqr(self) -> $t {
                self.re * self.re + self.im * self.im
            }
            #[inline]
            fn is_nan(self) -> bool {
                self.re.is_nan() || self.im.is_nan()
            }
            #[inline]
            fn is_finite(self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
            fn to_parts(self) -> (f64, f64) {
                (self.re as f64, self.im as f64)
            }
            fn from_parts(re: f64, im: f64) -> Self {
                Complex::new(re as $t, im as $t)
            }
            fn write_bytes(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.re.to_bits().to_le_bytes());
                out.extend_from_slice(&self.im.to_bits().to_le_bytes());
            }
        }
    };
}

impl_complex!(f32, "c32");
impl_complex!(f64, "c64");

/// Integer type usable for index and offset arrays.
pub trait SpIndex: Copy + Send + Sync + Debug + PartialEq + 'static {
    /// Widens to `usize`. Negative values map to `usize::MAX` so that they
    /// always fail range checks.
    fn index(self) -> usize;
    /// Narrows from `usize`, `None` on overflow.
    fn from_index(n: usize) -> Option<Self>;
}

macro_rules! impl_index {
    ($($t:ty),*) => {$(
        impl SpIndex for $t {
            #[inline]
            fn index(self) -> usize {
                usize::try_from(self).unwrap_or(usize::MAX)
            }
            #[inline]
            fn from_index(n: usize) -> Option<Self> {
                <$t>::try_from(n).ok()
            }
        }
    )*};
}

impl_index!(i32, i64, u32, u64, usize);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_indices_never_in_range() {
        assert_eq!((-1i32).index(), usize::MAX);
        assert_eq!(7i64.index(), 7);
        assert_eq!(i32::from_index(1 << 40), None);
    }

    #[test]
    fn signed_zero_is_zero_nan_is_not() {
        assert!((-0.0f64).is_zero());
        assert!(!f32::NAN.is_zero());
        assert!(Complex::new(0.0f64, -0.0).is_zero());
    }

    #[test]
    fn complex_conj_and_modulus() {
        let z = Complex::new(3.0f64, 4.0);
        assert_eq!(z.conj(), Complex::new(3.0, -4.0));
        assert_eq!(z.modulus(), 5.0);
        assert_eq!(z.modulus_sqr(), 25.0);
    }
}
