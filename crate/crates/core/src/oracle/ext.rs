//! Double-double arithmetic: about 106 significand bits from pairs of
//! binary64 values. Integer-valued sums and products below 2^106 are exact.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Ext {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Ext {
    if b == 0.0 {
        // keeps the sign of a zero `a`
        return Ext { hi: a, lo: 0.0 };
    }
    let s = a + b;
    if !s.is_finite() {
        return Ext { hi: s, lo: 0.0 };
    }
    Ext {
        hi: s,
        lo: b - (s - a),
    }
}

impl Ext {
    pub const ZERO: Ext = Ext { hi: 0.0, lo: 0.0 };
    pub const ONE: Ext = Ext { hi: 1.0, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Self {
        Ext { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Nearest binary64 value.
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    /// Nearest binary32 value, rounded once from the full-precision value.
    pub fn to_f32(self) -> f32 {
        let r = self.hi as f32;
        let back = r as f64;
        if back == self.hi || self.lo == 0.0 || !r.is_finite() {
            return r;
        }
        // `hi` may sit exactly between two binary32 values; `lo` breaks the tie
        let other = if back < self.hi { next_f32(r, true) } else { next_f32(r, false) };
        let mid = (back + other as f64) / 2.0;
        if self.hi != mid {
            return r;
        }
        let up = if back < other as f64 { other } else { r };
        let down = if back < other as f64 { r } else { other };
        if self.lo > 0.0 {
            up
        } else {
            down
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 || !self.hi.is_finite() {
            return Ext::from_f64(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        let r = self - Ext::from_f64(x) * Ext::from_f64(x);
        quick_two_sum(x, r.hi / (2.0 * x))
    }
}

fn next_f32(x: f32, up: bool) -> f32 {
    if up {
        x.next_up()
    } else {
        x.next_down()
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, o: Ext) -> Ext {
        let (s, e) = two_sum(self.hi, o.hi);
        if !s.is_finite() {
            return Ext { hi: s, lo: 0.0 };
        }
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, o: Ext) -> Ext {
        self + (-o)
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, o: Ext) -> Ext {
        let p = self.hi * o.hi;
        if !p.is_finite() || p == 0.0 {
            // keeps the sign of zero and the IEEE special cases
            return Ext { hi: p, lo: 0.0 };
        }
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        quick_two_sum(p, e)
    }
}

impl Div for Ext {
    type Output = Ext;
    fn div(self, o: Ext) -> Ext {
        let q1 = self.hi / o.hi;
        if !q1.is_finite() || q1 == 0.0 {
            return Ext { hi: q1, lo: 0.0 };
        }
        let r = self - o * Ext::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Ext::from_f64(q2);
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2) + Ext::from_f64(q3)
    }
}

/// Complex double-double; real scalars have `im == 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CExt {
    pub re: Ext,
    pub im: Ext,
}

impl CExt {
    pub const ZERO: CExt = CExt {
        re: Ext::ZERO,
        im: Ext::ZERO,
    };

    pub fn real(re: Ext) -> Self {
        CExt { re, im: Ext::ZERO }
    }

    /// Exact widening of a working-precision value.
    pub fn of<T: Scalar>(v: T) -> Self {
        let (re, im) = v.to_parts();
        CExt {
            re: Ext::from_f64(re),
            im: Ext::from_f64(im),
        }
    }

    pub fn conj(self) -> Self {
        CExt {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn is_zero(self) -> bool {
        self.re.hi == 0.0 && self.im.hi == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.re.is_nan() || self.im.is_nan()
    }

    /// Modulus in double-double.
    pub fn abs(self) -> Ext {
        if self.im.hi == 0.0 {
            self.re.abs()
        } else if self.re.hi == 0.0 {
            self.im.abs()
        } else {
            (self.re * self.re + self.im * self.im).sqrt()
        }
    }

    /// Nearest working-precision value, each part rounded once.
    pub fn round<T: Scalar>(self) -> T {
        let part = |e: Ext| {
            if T::NAME.ends_with("32") {
                e.to_f32() as f64
            } else {
                e.to_f64()
            }
        };
        T::from_parts(part(self.re), part(self.im))
    }
}

/// IEEE-style sum: the first term seeds the accumulator, so a lone `-0`
/// survives; an empty sum is `+0`.
pub fn sum(terms: &[CExt]) -> CExt {
    match terms.split_first() {
        None => CExt::ZERO,
        Some((first, rest)) => rest.iter().fold(*first, |s, &t| s + t),
    }
}

impl Add for CExt {
    type Output = CExt;
    fn add(self, o: CExt) -> CExt {
        CExt {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for CExt {
    type Output = CExt;
    fn sub(self, o: CExt) -> CExt {
        CExt {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for CExt {
    type Output = CExt;
    fn neg(self) -> CExt {
        CExt {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for CExt {
    type Output = CExt;
    fn mul(self, o: CExt) -> CExt {
        if self.im.hi == 0.0 && o.im.hi == 0.0 {
            return CExt::real(self.re * o.re);
        }
        CExt {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Div for CExt {
    type Output = CExt;
    fn div(self, o: CExt) -> CExt {
        if self.im.hi == 0.0 && o.im.hi == 0.0 {
            return CExt::real(self.re / o.re);
        }
        let den = o.re * o.re + o.im * o.im;
        CExt {
            re: (self.re * o.re + self.im * o.im) / den,
            im: (self.im * o.re - self.re * o.im) / den,
        }
    }
}
