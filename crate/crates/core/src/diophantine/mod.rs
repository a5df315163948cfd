//! Continued fractions and the two witness subsequences for an irrational
//! rotation number θ: integers `m_k` with `frac(m_k θ) → 0` and integers
//! `n_k` with `frac(n_k θ) → 1/2`.
//!
//! θ is a computed real carried with an explicit error bar. Quotients are
//! only emitted while the error interval pins them down uniquely, so a
//! witness is never built on a partial quotient the input cannot support.

mod cf;
mod witnesses;

pub use cf::{continued_fraction, convergents, ContinuedFraction, Convergent};
pub use witnesses::{
    near_half_subsequence, near_zero_subsequence, near_zero_within, SearchStrategy, WitnessSequence,
    DEFAULT_SEARCH_BOUND,
};

use crate::dd::{DoubleDouble, DD_EPSILON};
use crate::error::{Error, Module, Result};

/// Exact description of a real, when one is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// `(p + √d)/q` with `d` not a perfect square.
    QuadraticSurd { p: i64, d: i64, q: i64 },
    /// `num/den` in lowest terms, `den > 0`.
    Rational { num: i64, den: i64 },
    /// Euler's number, whose partial quotients follow `[2; 1,2,1, 1,4,1, …]`.
    Euler,
}

/// A real number with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealWithError {
    value: DoubleDouble,
    abs_error: f64,
    closed_form: Option<ClosedForm>,
}

fn rounding_error(v: DoubleDouble) -> f64 {
    4.0 * DD_EPSILON * v.to_f64().abs()
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

fn isqrt(d: i64) -> i64 {
    let mut r = (d as f64).sqrt() as i64;
    while r * r > d {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= d {
        r += 1;
    }
    r
}

impl RealWithError {
    pub fn new(value: DoubleDouble, abs_error: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::rejected(Module::Diophantine, "theta", "must be finite"));
        }
        if !(abs_error >= 0.0) {
            return Err(Error::rejected(
                Module::Diophantine,
                "abs_error",
                "must be a non-negative number",
            ));
        }
        Ok(Self {
            value,
            abs_error,
            closed_form: None,
        })
    }

    pub fn from_f64(value: f64, abs_error: f64) -> Result<Self> {
        Self::new(DoubleDouble::from(value), abs_error)
    }

    /// `(p + √d)/q`. Perfect squares `d` collapse to the rational case.
    pub fn quadratic_surd(p: i64, d: i64, q: i64) -> Result<Self> {
        if q == 0 || d < 0 {
            return Err(Error::rejected(
                Module::Diophantine,
                "theta",
                "quadratic surd needs q != 0 and d >= 0",
            ));
        }
        let s = isqrt(d);
        if s * s == d {
            return Self::from_ratio(p + s, q);
        }
        let value = (DoubleDouble::from(p) + DoubleDouble::from(d).sqrt()) / DoubleDouble::from(q);
        Ok(Self {
            value,
            abs_error: rounding_error(value),
            closed_form: Some(ClosedForm::QuadraticSurd { p, d, q }),
        })
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::rejected(Module::Diophantine, "theta", "zero denominator"));
        }
        let g = gcd(num, den).max(1);
        let (num, den) = if den < 0 {
            (-num / g, -den / g)
        } else {
            (num / g, den / g)
        };
        let value = DoubleDouble::from(num) / DoubleDouble::from(den);
        // Dyadic ratios are exact in double-double.
        let abs_error = if (den & (den - 1)) == 0 {
            0.0
        } else {
            rounding_error(value)
        };
        Ok(Self {
            value,
            abs_error,
            closed_form: Some(ClosedForm::Rational { num, den }),
        })
    }

    pub fn sqrt2() -> Self {
        Self::quadratic_surd(0, 2, 1).expect("√2 is a valid surd")
    }

    pub fn golden() -> Self {
        Self::quadratic_surd(1, 5, 2).expect("golden ratio is a valid surd")
    }

    pub fn euler() -> Self {
        Self {
            value: DoubleDouble::E,
            abs_error: rounding_error(DoubleDouble::E),
            closed_form: Some(ClosedForm::Euler),
        }
    }

    pub fn value(&self) -> DoubleDouble {
        self.value
    }

    pub fn abs_error(&self) -> f64 {
        self.abs_error
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// `k·θ`, keeping the closed form where one exists.
    pub fn scale(&self, k: i64) -> Result<Self> {
        let value = self.value * DoubleDouble::from(k);
        let abs_error = self.abs_error * k.unsigned_abs() as f64 + rounding_error(value);
        let closed_form = match self.closed_form {
            _ if k == 0 => Some(ClosedForm::Rational { num: 0, den: 1 }),
            Some(ClosedForm::QuadraticSurd { p, d, q }) => {
                // k(p + √d)/q = (kp ± √(k²d))/q, sign folded into q.
                let kk = k.checked_mul(k).and_then(|kk| kk.checked_mul(d));
                match (kk, k.checked_mul(p)) {
                    (Some(dd), Some(kp)) if k > 0 => Some(ClosedForm::QuadraticSurd { p: kp, d: dd, q }),
                    (Some(dd), Some(kp)) => Some(ClosedForm::QuadraticSurd { p: -kp, d: dd, q: -q }),
                    _ => None,
                }
            }
            Some(ClosedForm::Rational { num, den }) => num.checked_mul(k).map(|num| {
                let g = gcd(num, den).max(1);
                ClosedForm::Rational {
                    num: num / g,
                    den: den / g,
                }
            }),
            Some(ClosedForm::Euler) | None => None,
        };
        Ok(Self {
            value,
            abs_error,
            closed_form,
        })
    }

    /// `|θ|`, keeping the closed form.
    pub fn abs(&self) -> Self {
        if self.value.is_negative() {
            self.scale(-1).expect("negation cannot fail")
        } else {
            *self
        }
    }

    /// `θ − other` with summed error; closed forms are dropped.
    pub fn difference(&self, other: &Self) -> Self {
        let value = self.value - other.value;
        Self {
            value,
            abs_error: self.abs_error + other.abs_error + rounding_error(value),
            closed_form: None,
        }
    }

    /// The certified interval `[value − err, value + err]`, widened by the
    /// format's own rounding.
    pub(crate) fn interval(&self) -> (DoubleDouble, DoubleDouble) {
        let pad = DoubleDouble::from(self.abs_error + rounding_error(self.value));
        (self.value - pad, self.value + pad)
    }
}

/// Fractional part of `n·θ` with the propagated error `|n|·abs_error`.
pub fn frac_mul(n: i64, theta: &RealWithError) -> Result<RealWithError> {
    let scale = n.unsigned_abs() as f64;
    let propagated = scale * theta.abs_error;
    if !(propagated < 0.5) {
        return Err(Error::precision(
            Module::Diophantine,
            "theta",
            format!("|n|·error = {propagated:e} leaves frac(nθ) undetermined at n = {n}"),
        ));
    }
    if n == 0 {
        return RealWithError::new(DoubleDouble::ZERO, 0.0);
    }
    let product = theta.value * DoubleDouble::from(n);
    let abs_error = if theta.abs_error == 0.0 && product.lo == 0.0 && theta.value.lo == 0.0 {
        0.0
    } else {
        propagated + rounding_error(product)
    };
    RealWithError::new(product.fract(), abs_error)
}
