//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi)/2`, giving roughly 31 significant decimal digits.
//!
//! Used wherever a plain 53-bit product would lose the quantity being
//! measured: angle accumulation `frac(n·φ)`, continued-fraction extraction,
//! and the schedule inequality checks.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

/// Unit roundoff of the format, 2^-104.
pub const DD_EPSILON: f64 = 4.930380657631324e-32;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const SQRT2: Self = Self {
        hi: std::f64::consts::SQRT_2,
        lo: -9.667293313452913e-17,
    };
    pub const SQRT5: Self = Self {
        hi: 2.23606797749979,
        lo: -1.0864230407365012e-16,
    };
    pub const GOLDEN: Self = Self {
        hi: 1.618033988749895,
        lo: -5.432115203682506e-17,
    };
    pub const E: Self = Self {
        hi: std::f64::consts::E,
        lo: 1.4456468917292502e-16,
    };
    pub const LN2: Self = Self {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    /// Exact for every integer with magnitude below 2^106.
    pub fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        // `n - hi as i128` is exact: hi is within one ulp of n.
        let rest = n - hi as i128;
        Self::new(hi, rest as f64)
    }

    /// Exact sum of two doubles.
    #[inline]
    pub fn sum_exact(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn product_exact(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let fl = self.hi.floor();
        if fl == self.hi {
            Self::new(fl, self.lo.floor())
        } else {
            Self { hi: fl, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + Self::from(0.5)).floor()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(self) -> Self {
        let f = self - self.floor();
        // Rounding can land exactly on 1 when the value sits just below an integer.
        if f >= Self::ONE {
            f - Self::ONE
        } else {
            f
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        Self::new(p1, p2)
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let y = self.hi.sqrt();
        let y2 = Self::product_exact(y, y);
        let corr = (self - y2).hi / (2.0 * y);
        Self::new(y, corr)
    }

    pub fn powi(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = self - Self::LN2.mul_f64(k);
        // Reduce further by 2^10 so the Taylor series converges in a dozen terms.
        let r = r.ldexp(-10);
        let mut term = r;
        let mut sum = r;
        for i in 2..=14 {
            term = (term * r) / Self::from(i as f64);
            sum = sum + term;
            if term.hi.abs() < DD_EPSILON * 1e-3 {
                break;
            }
        }
        // (1 + sum) squared ten times, carried as expm1 to keep the low bits.
        let mut em1 = sum;
        for _ in 0..10 {
            em1 = em1 * (em1 + Self::from(2.0));
        }
        (em1 + Self::ONE).ldexp(k as i32)
    }

    /// Natural logarithm; returns NaN for non-positive input.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self { hi: f64::NAN, lo: 0.0 };
        }
        let mut y = Self::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }
}

impl From<f64> for DoubleDouble {
    #[inline]
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

impl From<i64> for DoubleDouble {
    fn from(v: i64) -> Self {
        Self::from_i128(v as i128)
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs.mul_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs.mul_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == 0.0 {
            write!(f, "{}", self.hi)
        } else {
            write!(f, "{}{:+e}", self.hi, self.lo)
        }
    }
}

/// Circle distance from `x` (taken mod 1) to `target` in `[0, 1)`.
pub fn circle_distance(x: DoubleDouble, target: f64) -> DoubleDouble {
    let d = (x - DoubleDouble::from(target)).fract();
    let other = DoubleDouble::ONE - d;
    if other < d {
        other
    } else {
        d
    }
}
