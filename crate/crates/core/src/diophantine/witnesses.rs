use super::{continued_fraction, convergents, frac_mul, RealWithError};
use crate::dd::DoubleDouble;
use crate::error::{Error, Module, Result};

pub const DEFAULT_SEARCH_BOUND: u64 = 100_000;

/// Bounds at or below this are scanned exhaustively under [`SearchStrategy::Auto`].
const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

/// Strictly increasing integers whose multiples of θ approach a target on the circle.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WitnessSequence {
    pub indices: Vec<u64>,
    /// Circle distance from `frac(index·θ)` to the target, strictly decreasing
    /// except for repeated exact hits (distance 0) of a rational θ.
    pub distances: Vec<f64>,
    /// How many of the requested witnesses were not found.
    pub shortfall: usize,
}

impl WitnessSequence {
    fn push(&mut self, n: u64, d: f64) {
        self.indices.push(n);
        self.distances.push(d);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Every `n ≤ bound`; yields exactly the record-setters.
    Exhaustive,
    /// Greedy descent by adding multiples of convergent denominators.
    Accelerated,
    #[default]
    Auto,
}

/// Convergent denominators `m_k > 1` of `|θ|`: `frac(m_k θ) → 0`.
///
/// These are exactly the record-setters of `‖nθ‖` over `n ≥ 1` with the
/// seed `n = 1` dropped. A rational θ = p/q continues with the exact hits
/// `2q, 3q, …` once its expansion ends.
pub fn near_zero_subsequence(theta: &RealWithError, count: usize) -> Result<WitnessSequence> {
    let mut out = WitnessSequence::default();
    if count == 0 {
        return Ok(out);
    }
    let theta = theta.abs();
    // Extra quotients keep the complete-quotient error estimates sharp.
    let mut depth = count + 64;
    loop {
        let cf = continued_fraction(&theta, depth)?;
        // Convergents past i128 range are useless as orbit indices anyway.
        let mut usable = cf.clone();
        let convs = loop {
            match convergents(&usable) {
                Ok(c) => break c,
                Err(Error::Overflow { depth, .. }) => {
                    usable.quotients.truncate(depth.saturating_sub(1));
                    usable.terminated = false;
                }
                Err(e) => return Err(e),
            }
        };
        out = WitnessSequence::default();
        for (k, c) in convs.iter().enumerate() {
            let Ok(q) = u64::try_from(c.q) else {
                return Err(Error::Overflow {
                    module: Module::Diophantine,
                    parameter: "witness index",
                    depth: k,
                });
            };
            let d = c.signed_err.abs().to_f64();
            let last = out.indices.last().copied().unwrap_or(1);
            let last_d = out.distances.last().copied().unwrap_or(f64::INFINITY);
            if q > last && (d < last_d || d == 0.0) {
                out.push(q, d);
            }
            if out.indices.len() == count {
                return Ok(out);
            }
        }
        if cf.terminated && usable.quotients.len() == cf.quotients.len() {
            let base = out
                .indices
                .last()
                .copied()
                .unwrap_or_else(|| convs.last().map(|c| c.q as u64).unwrap_or(1));
            let mut k = if out.indices.is_empty() { 1 } else { 2 };
            while out.indices.len() < count {
                let m = base * k;
                if m > 1 {
                    out.push(m, 0.0);
                }
                k += 1;
            }
            return Ok(out);
        }
        if cf.certified_depth < depth || usable.quotients.len() < cf.quotients.len() {
            return Err(Error::precision(
                Module::Diophantine,
                "theta",
                format!(
                    "certified depth {} yields {} of {count} near-zero witnesses",
                    cf.certified_depth,
                    out.indices.len()
                ),
            ));
        }
        depth *= 2;
    }
}

/// Largest witness count [`near_zero_within`] will request.
const WITHIN_CAP: usize = 4096;

/// All near-zero witnesses with index at most `bound` (at most 4096 of them).
pub fn near_zero_within(theta: &RealWithError, bound: u64) -> Result<WitnessSequence> {
    let mut count = 8;
    let mut last_ok: Option<WitnessSequence> = None;
    loop {
        match near_zero_subsequence(theta, count) {
            Ok(s) => {
                let done = s.indices.last().is_some_and(|&n| n > bound) || count >= WITHIN_CAP;
                last_ok = Some(s);
                if done {
                    break;
                }
            }
            // Indices past u64 range are beyond any bound.
            Err(Error::Overflow { .. }) if last_ok.is_some() => break,
            Err(e) => return Err(e),
        }
        count = (count * 2).min(WITHIN_CAP);
    }
    let mut s = last_ok.unwrap_or_default();
    let keep = s.indices.partition_point(|&n| n <= bound);
    s.indices.truncate(keep);
    s.distances.truncate(keep);
    s.shortfall = 0;
    Ok(s)
}

/// Integers `n_k ≥ 2`, strictly increasing, with `frac(n_k θ)` approaching 1/2.
///
/// The exhaustive strategy returns the record-setters of `|frac(nθ) − 1/2|`
/// over `1 ≤ n ≤ search_bound`, seed `n = 1` excluded. When fewer than
/// `count` exist below the bound, the result is partial and `shortfall` says
/// how many are missing.
pub fn near_half_subsequence(
    theta: &RealWithError,
    count: usize,
    search_bound: u64,
    strategy: SearchStrategy,
) -> Result<WitnessSequence> {
    if count == 0 {
        return Ok(WitnessSequence::default());
    }
    let theta = theta.abs();
    let exhaustive = match strategy {
        SearchStrategy::Exhaustive => true,
        SearchStrategy::Accelerated => false,
        SearchStrategy::Auto => search_bound <= EXHAUSTIVE_LIMIT,
    };
    let mut out = if exhaustive {
        exhaustive_half(&theta, count, search_bound)?
    } else {
        descent_half(&theta, count, search_bound)?
    };
    out.shortfall = count - out.indices.len();
    Ok(out)
}

fn half_offset(n: u64, theta: &RealWithError) -> Result<(DoubleDouble, f64)> {
    let f = frac_mul(n as i64, theta)?;
    Ok((f.value() - DoubleDouble::from(0.5), f.abs_error()))
}

fn exhaustive_half(theta: &RealWithError, count: usize, bound: u64) -> Result<WitnessSequence> {
    let mut out = WitnessSequence::default();
    let mut best: Option<DoubleDouble> = None;
    let mut exact = false;
    for n in 1..=bound {
        let (offset, err) = half_offset(n, theta)?;
        let d = offset.abs();
        let hit = d.to_f64() <= err;
        let record = if hit {
            exact = true;
            true
        } else {
            !exact && best.is_none_or(|b| d < b)
        };
        if record {
            best = Some(if hit { DoubleDouble::ZERO } else { d });
            if n >= 2 {
                out.push(n, if hit { 0.0 } else { d.to_f64() });
                if out.indices.len() == count {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Signed representative of `x` in `[-1/2, 1/2)`.
fn centered(x: DoubleDouble) -> DoubleDouble {
    x - (x + DoubleDouble::from(0.5)).floor()
}

fn descent_half(theta: &RealWithError, count: usize, bound: u64) -> Result<WitnessSequence> {
    let mut out = WitnessSequence::default();
    if bound < 1 {
        return Ok(out);
    }
    // Step table: convergent denominators q ≤ bound with signed drift ‖qθ‖.
    let cf = continued_fraction(theta, 128).or_else(|e| match e {
        Error::PrecisionExhausted { .. } => continued_fraction(theta, 0),
        other => Err(other),
    })?;
    let mut usable = cf.clone();
    let convs = loop {
        match convergents(&usable) {
            Ok(c) => break c,
            Err(Error::Overflow { depth, .. }) => usable.quotients.truncate(depth.saturating_sub(1)),
            Err(e) => return Err(e),
        }
    };
    let mut steps: Vec<(u64, DoubleDouble)> = Vec::new();
    for c in &convs {
        let Ok(q) = u64::try_from(c.q) else { break };
        if q > bound {
            break;
        }
        if steps.last().is_none_or(|&(last, _)| q > last) {
            steps.push((q, centered(c.signed_err)));
        }
    }

    let mut n = 1u64;
    let (mut offset, _) = half_offset(1, theta)?;
    while out.indices.len() < count {
        let current = offset.abs();
        let mut moved = None;
        for &(q, drift) in &steps {
            if n + q > bound {
                break;
            }
            if drift.hi == 0.0 {
                continue;
            }
            let t_max = (bound - n) / q;
            let ideal = (-(offset / drift)).round().to_f64();
            let centre = ideal.clamp(1.0, t_max as f64) as u64;
            let mut best: Option<(u64, DoubleDouble)> = None;
            for t in [centre.saturating_sub(1), centre, centre + 1] {
                if t < 1 || t > t_max {
                    continue;
                }
                let half = DoubleDouble::from(0.5);
                let cand = (offset + half + drift * DoubleDouble::from(t as f64)).fract() - half;
                if cand.abs() < current && best.is_none_or(|(_, b)| cand.abs() < b.abs()) {
                    best = Some((t, cand));
                }
            }
            if let Some((t, cand)) = best {
                moved = Some((n + t * q, cand));
                break;
            }
        }
        let Some((next, next_offset)) = moved else {
            break;
        };
        // Re-derive from scratch so drift accumulation never leaks into the result.
        let (fresh, _) = half_offset(next, theta)?;
        debug_assert!((fresh.abs() - next_offset.abs()).abs().to_f64() < 1e-20);
        n = next;
        offset = fresh;
        out.push(n, fresh.abs().to_f64());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::RealWithError;

    #[test]
    fn near_zero_examples() {
        let s = near_zero_subsequence(&RealWithError::sqrt2(), 4).unwrap();
        assert_eq!(s.indices, vec![2, 5, 12, 29]);
        assert!((s.distances[3] - 0.012_193_308_819_756_415).abs() < 1e-16);

        let g = near_zero_subsequence(&RealWithError::golden(), 3).unwrap();
        assert_eq!(g.indices, vec![2, 3, 5]);

        let one = near_zero_subsequence(&RealWithError::euler(), 1).unwrap();
        assert_eq!(one.indices.len(), 1);
        assert!(one.distances[0] < 0.5);

        assert!(near_zero_subsequence(&RealWithError::sqrt2(), 0)
            .unwrap()
            .indices
            .is_empty());
    }

    #[test]
    fn near_zero_long_runs_need_precision() {
        let s = near_zero_subsequence(&RealWithError::sqrt2(), 48).unwrap();
        assert_eq!(s.indices.len(), 48);
        assert!(s.distances.windows(2).all(|w| w[1] < w[0]));
        // q_k·|q_k√2 − p_k| → 1/(2√2).
        let last = *s.indices.last().unwrap() as f64 * s.distances.last().unwrap();
        assert!((last - 0.353_553_390_593_273_8).abs() < 1e-9);
        assert!(matches!(
            near_zero_subsequence(&RealWithError::sqrt2(), 60),
            Err(Error::Overflow { .. })
        ));
        let coarse = RealWithError::from_f64(std::f64::consts::SQRT_2, 1e-15).unwrap();
        assert!(matches!(
            near_zero_subsequence(&coarse, 30),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn near_zero_within_bound() {
        let s = near_zero_within(&RealWithError::sqrt2(), 10_000).unwrap();
        assert_eq!(s.indices, vec![2, 5, 12, 29, 70, 169, 408, 985, 2378, 5741]);
        let r = near_zero_within(&RealWithError::from_ratio(1, 3).unwrap(), 20).unwrap();
        assert_eq!(r.indices, vec![3, 6, 9, 12, 15, 18]);
    }

    #[test]
    fn near_zero_rational() {
        let s = near_zero_subsequence(&RealWithError::from_ratio(2, 7).unwrap(), 4).unwrap();
        assert_eq!(s.indices.last(), Some(&21));
        assert_eq!(s.distances.last(), Some(&0.0));
    }

    #[test]
    fn near_half_examples() {
        let s = near_half_subsequence(&RealWithError::sqrt2(), 2, 100, SearchStrategy::Exhaustive).unwrap();
        assert_eq!(s.indices, vec![6, 35]);
        assert_eq!(s.shortfall, 0);
        assert!((s.distances[0] - 0.014_718_625_761_429_707).abs() < 1e-15);

        let half = RealWithError::from_ratio(1, 2).unwrap();
        let s = near_half_subsequence(&half, 4, 100, SearchStrategy::Auto).unwrap();
        assert_eq!(s.indices, vec![3, 5, 7, 9]);
        assert!(s.distances.iter().all(|&d| d == 0.0));

        let empty = near_half_subsequence(&RealWithError::sqrt2(), 0, 100, SearchStrategy::Auto).unwrap();
        assert!(empty.indices.is_empty());
    }

    #[test]
    fn near_half_shortfall() {
        let s = near_half_subsequence(&RealWithError::sqrt2(), 10, 100, SearchStrategy::Exhaustive).unwrap();
        assert!(s.shortfall > 0);
        assert_eq!(s.indices.len() + s.shortfall, 10);
    }

    #[test]
    fn descent_is_monotone_and_reaches_far() {
        let theta = RealWithError::sqrt2().scale(3).unwrap();
        let s = near_half_subsequence(&theta, 12, 1_000_000_000_000, SearchStrategy::Accelerated).unwrap();
        assert!(s.indices.windows(2).all(|w| w[0] < w[1]));
        assert!(s.distances.windows(2).all(|w| w[1] < w[0]));
        assert!(*s.distances.last().unwrap() < 1e-6, "{s:?}");
    }

    #[test]
    fn descent_never_beats_exhaustive() {
        let theta = RealWithError::golden();
        let ex = near_half_subsequence(&theta, 50, 10_000, SearchStrategy::Exhaustive).unwrap();
        let de = near_half_subsequence(&theta, 50, 10_000, SearchStrategy::Accelerated).unwrap();
        let best = ex.distances.last().unwrap();
        assert!(de.distances.iter().all(|d| d >= best));
    }
}
