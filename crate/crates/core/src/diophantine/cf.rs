use super::{ClosedForm, RealWithError};
use crate::dd::{DoubleDouble, DD_EPSILON};
use crate::error::{Error, Module, Result};

/// Width below which an interval holding a single integer is read as that
/// integer, terminating the expansion.
const TERMINATION_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    pub a0: i128,
    /// Partial quotients `a_1, a_2, …`, all certified.
    pub quotients: Vec<u64>,
    /// Number of quotients after `a0` that the input error supports.
    pub certified_depth: usize,
    /// The expansion ends: θ is (indistinguishable from) the rational it spells.
    pub terminated: bool,
    theta: RealWithError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergent {
    pub p: i128,
    pub q: i128,
    /// `q·θ − p`.
    pub signed_err: DoubleDouble,
}

impl ContinuedFraction {
    pub fn theta(&self) -> &RealWithError {
        &self.theta
    }

    /// Value of the truncated expansion `[a0; a_1, …, a_depth]`, evaluated
    /// backwards in double-double.
    pub fn evaluate(&self, depth: usize) -> DoubleDouble {
        let depth = depth.min(self.quotients.len());
        let mut acc: Option<DoubleDouble> = None;
        for &a in self.quotients[..depth].iter().rev() {
            let a = DoubleDouble::from_i128(a as i128);
            acc = Some(match acc {
                None => a,
                Some(tail) => a + tail.recip(),
            });
        }
        let a0 = DoubleDouble::from_i128(self.a0);
        match acc {
            None => a0,
            Some(tail) => a0 + tail.recip(),
        }
    }
}

/// Continued fraction of θ up to `max_depth` quotients after `a0`.
///
/// With a closed form the quotients come from exact integer recurrences;
/// otherwise they are extracted from the error interval and extraction stops
/// at the first quotient the interval does not determine.
pub fn continued_fraction(theta: &RealWithError, max_depth: usize) -> Result<ContinuedFraction> {
    let cf = match theta.closed_form() {
        Some(form) => exact_expansion(theta, form, max_depth)?,
        None => interval_expansion(theta, max_depth)?,
    };
    if cf.certified_depth == 0 && !cf.terminated && max_depth > 0 {
        return Err(Error::precision(
            Module::Diophantine,
            "theta",
            format!(
                "error bar {:e} does not determine the first partial quotient; raise precision",
                theta.abs_error()
            ),
        ));
    }
    Ok(cf)
}

fn floor_to_i128(x: DoubleDouble) -> Option<i128> {
    let f = x.floor();
    if f.hi.abs() >= 1.6e38 {
        return None;
    }
    Some(f.hi as i128 + f.lo as i128)
}

/// Integers inside `[lo, hi]`: `Some(k)` when exactly one.
fn single_integer(lo: DoubleDouble, hi: DoubleDouble) -> Option<i128> {
    let a = floor_to_i128(lo)?;
    let b = floor_to_i128(hi)?;
    let lo_is_int = DoubleDouble::from_i128(a) == lo;
    let count = b - a + i128::from(lo_is_int);
    if count != 1 {
        return None;
    }
    Some(if lo_is_int { a } else { b })
}

fn interval_expansion(theta: &RealWithError, max_depth: usize) -> Result<ContinuedFraction> {
    let (mut lo, mut hi) = theta.interval();
    let mut cf = ContinuedFraction {
        a0: 0,
        quotients: Vec::new(),
        certified_depth: 0,
        terminated: false,
        theta: *theta,
    };

    for depth in 0..=max_depth {
        let width = (hi - lo).to_f64();
        let (Some(a), Some(b)) = (floor_to_i128(lo), floor_to_i128(hi)) else {
            return Err(Error::Overflow {
                module: Module::Diophantine,
                parameter: "partial quotient",
                depth,
            });
        };
        let lower_hits_integer = DoubleDouble::from_i128(a) == lo;
        if a != b || lower_hits_integer {
            // The interval straddles an integer: either it is a terminal
            // quotient of a rational, or precision ran out.
            if width < TERMINATION_WIDTH {
                if let Some(k) = single_integer(lo, hi) {
                    push_quotient(&mut cf, depth, k)?;
                    cf.terminated = true;
                }
            }
            return Ok(cf);
        }
        push_quotient(&mut cf, depth, a)?;
        if depth == max_depth {
            break;
        }
        let ai = DoubleDouble::from_i128(a);
        let (flo, fhi) = (lo - ai, hi - ai);
        // Reciprocal reverses the interval; pad for the two divisions.
        let new_lo = fhi.recip();
        let new_hi = flo.recip();
        let pad = 8.0 * DD_EPSILON * new_hi.to_f64().abs();
        lo = new_lo - DoubleDouble::from(pad);
        hi = new_hi + DoubleDouble::from(pad);
        if !hi.is_finite() {
            return Ok(cf);
        }
    }
    Ok(cf)
}

fn push_quotient(cf: &mut ContinuedFraction, depth: usize, a: i128) -> Result<()> {
    if depth == 0 {
        cf.a0 = a;
        return Ok(());
    }
    let a = u64::try_from(a).map_err(|_| Error::Overflow {
        module: Module::Diophantine,
        parameter: "partial quotient",
        depth,
    })?;
    debug_assert!(a >= 1);
    cf.quotients.push(a);
    cf.certified_depth = cf.quotients.len();
    Ok(())
}

fn exact_expansion(theta: &RealWithError, form: ClosedForm, max_depth: usize) -> Result<ContinuedFraction> {
    let mut cf = ContinuedFraction {
        a0: 0,
        quotients: Vec::new(),
        certified_depth: 0,
        terminated: false,
        theta: *theta,
    };
    match form {
        ClosedForm::Rational { num, den } => {
            let (mut a, mut b) = (num as i128, den as i128);
            for depth in 0..=max_depth {
                let q = a.div_euclid(b);
                push_quotient(&mut cf, depth, q)?;
                let r = a.rem_euclid(b);
                if r == 0 {
                    cf.terminated = true;
                    break;
                }
                (a, b) = (b, r);
            }
        }
        ClosedForm::Euler => {
            cf.a0 = 2;
            for k in 1..=max_depth {
                let a = if k % 3 == 2 { 2 * (k as u64 + 1) / 3 } else { 1 };
                cf.quotients.push(a);
            }
            cf.certified_depth = cf.quotients.len();
        }
        ClosedForm::QuadraticSurd { p, d, q } => {
            // Standard recurrence for (P + √D)/Q with Q | D − P².
            let (mut p, mut d, mut q) = (p as i128, d as i128, q as i128);
            if (d - p * p) % q != 0 {
                let s = q.abs();
                p *= s;
                d *= s * s;
                q *= s;
            }
            let root = isqrt_i128(d);
            for depth in 0..=max_depth {
                // floor((P + √D)/Q) using floor(√D), exact because √D is irrational.
                let a = if q > 0 {
                    (p + root).div_euclid(q)
                } else {
                    -((p + root).div_euclid(-q)) - 1
                };
                push_quotient(&mut cf, depth, a)?;
                let p_next = a * q - p;
                let q_next = (d - p_next * p_next) / q;
                p = p_next;
                q = q_next;
            }
        }
    }
    Ok(cf)
}

fn isqrt_i128(d: i128) -> i128 {
    let mut r = (d as f64).sqrt() as i128;
    while r * r > d {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= d {
        r += 1;
    }
    r
}

/// Convergents `p_k/q_k` for `k = 0..=certified_depth`.
///
/// `q_k·θ − p_k` is taken from whichever is more accurate: the direct
/// product, whose error grows with `q_k`, or the complete-quotient identity
/// `(−1)^k/(q_k·α_{k+1} + q_{k−1})` with `α_{k+1}` summed from the remaining
/// quotients, whose error shrinks like `(q_k/q_N)²`.
pub fn convergents(cf: &ContinuedFraction) -> Result<Vec<Convergent>> {
    let mut pq = Vec::with_capacity(cf.quotients.len() + 1);
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p, mut q) = (cf.a0, 1i128);
    pq.push((p, q));
    for (k, &a) in cf.quotients.iter().enumerate() {
        let a = a as i128;
        let overflow = || Error::Overflow {
            module: Module::Diophantine,
            parameter: "convergent",
            depth: k + 1,
        };
        let p_next = a
            .checked_mul(p)
            .and_then(|x| x.checked_add(p_prev))
            .ok_or_else(overflow)?;
        let q_next = a
            .checked_mul(q)
            .and_then(|x| x.checked_add(q_prev))
            .ok_or_else(overflow)?;
        if q_next >= 1 << 100 {
            return Err(overflow());
        }
        (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
        pq.push((p, q));
    }

    let theta = cf.theta.value();
    let theta_err = cf.theta.abs_error() + DD_EPSILON * theta.abs().to_f64();
    let q_last = pq.last().map_or(1.0, |&(_, q)| q as f64);
    // Complete quotients α_{k+1} for k = 0..len-1, summed backwards.
    let n = cf.quotients.len();
    let mut alpha = vec![DoubleDouble::ZERO; n + 1];
    for k in (0..n).rev() {
        let a = DoubleDouble::from_i128(cf.quotients[k] as i128);
        alpha[k] = if k + 1 < n { a + alpha[k + 1].recip() } else { a };
    }
    Ok(pq
        .iter()
        .enumerate()
        .map(|(k, &(p, q))| {
            let direct = theta * DoubleDouble::from_i128(q) - DoubleDouble::from_i128(p);
            let direct_err = q as f64 * theta_err + DD_EPSILON * (p as f64).abs();
            let signed_err = if k < n && !(cf.terminated && k + 1 == n) {
                let q_before = if k == 0 { 0 } else { pq[k - 1].1 };
                let denom = DoubleDouble::from_i128(q) * alpha[k] + DoubleDouble::from_i128(q_before);
                let tail = if k % 2 == 0 { denom.recip() } else { -denom.recip() };
                let ratio = q as f64 / q_last;
                let tail_err = tail.abs().to_f64() * (ratio * ratio + 1e-30);
                if tail_err < direct_err {
                    tail
                } else {
                    direct
                }
            } else {
                direct
            };
            Convergent { p, q, signed_err }
        })
        .collect())
}
