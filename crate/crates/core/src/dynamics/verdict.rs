use super::series::{estimate_liminf_limsup, series_at_indices, DistanceSeries};
use super::{EngineConfig, State, SystemHandle};
use crate::error::{Error, Module, Result};
use crate::operator::InverseGrowthBound;
use crate::plane::{phi_inverse, turn_distance, PlanePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pair,
    NotPair,
    Inconclusive,
}

/// Why a verdict holds beyond the sampled horizon, when it does.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `x = y`: every distance is 0.
    Identical,
    /// `ln d_n ≥ log_coefficient + rate·n` for all `n ≥ 0`, with `rate > 0`.
    Divergent { log_coefficient: f64, rate: f64 },
    /// `d_n ≤ upper_bound` for all `n ≥ horizon`, and the bound is below tolerance.
    Convergent { upper_bound: f64 },
    /// `d_n` tends to a positive constant.
    SeparatedLimit { limit: f64 },
    /// Sampled only: the tail is non-increasing and below tolerance.
    EmpiricalDecay { tail_max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictOptions {
    pub horizon: u64,
    pub stride: u64,
    pub tail_fraction: f64,
    pub delta_low: f64,
    pub delta_high: f64,
    /// Distances at or below this count as converged.
    pub converge_tol: f64,
    pub engine: EngineConfig,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            horizon: 10_000,
            stride: 1,
            tail_fraction: 0.5,
            delta_low: 0.02,
            delta_high: 1.9,
            converge_tol: 1e-6,
            engine: EngineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiYorkeVerdict {
    pub liminf_estimate: f64,
    pub limsup_estimate: f64,
    pub proximality_witnesses: Vec<u64>,
    pub separation_witnesses: Vec<u64>,
    pub verdict: Verdict,
    pub thresholds: (f64, f64),
    pub certificate: Option<Certificate>,
    /// The evaluated series; shorter than requested when a divergent orbit overflowed.
    pub series: DistanceSeries,
}

/// Classifies `{x, y}` from a sampled orbit plus optional hint indices.
///
/// Hints beyond the horizon are ignored. Divergent pairs may overflow
/// before the horizon; their series stops at the first failing index.
pub fn liyorke_verdict(
    system: &SystemHandle,
    x: &State,
    y: &State,
    hints: Option<&[u64]>,
    opts: &VerdictOptions,
) -> Result<LiYorkeVerdict> {
    if !(opts.delta_low < opts.delta_high) {
        return Err(Error::rejected(
            Module::Dynamics,
            "delta_low",
            "must be below delta_high",
        ));
    }
    if opts.horizon == 0 || opts.stride == 0 {
        return Err(Error::rejected(
            Module::Dynamics,
            "horizon",
            "horizon and stride must be positive",
        ));
    }
    system.validate(x)?;
    system.validate(y)?;

    let mut indices: Vec<u64> = (0..=opts.horizon).step_by(opts.stride as usize).collect();
    if let Some(h) = hints {
        indices.extend(h.iter().copied().filter(|&n| n <= opts.horizon));
        indices.sort_unstable();
        indices.dedup();
    }

    let certificate = certify(system, x, y, opts)?;
    let divergent = matches!(certificate, Some(Certificate::Divergent { .. }));
    let series = match series_at_indices(system, x, y, &indices, opts.horizon, &opts.engine) {
        Err(Error::NumericalRange { index, .. }) if divergent => {
            let keep: Vec<u64> = indices.iter().copied().filter(|&n| (n as i64) < index).collect();
            let mut s = series_at_indices(system, x, y, &keep, opts.horizon, &opts.engine)?;
            s.truncate_before(index as u64);
            s
        }
        other => other?,
    };
    if series.is_empty() {
        return Err(Error::range(Module::Dynamics, 0, "no orbit index could be evaluated"));
    }
    let est = estimate_liminf_limsup(&series, opts.tail_fraction)?;

    let (verdict, certificate) = match certificate {
        Some(c) => (Verdict::NotPair, Some(c)),
        None if est.low <= opts.delta_low && est.high >= opts.delta_high => (Verdict::Pair, None),
        None => match empirical_decay(&series, opts) {
            Some(c) => (Verdict::NotPair, Some(c)),
            None => (Verdict::Inconclusive, None),
        },
    };
    Ok(LiYorkeVerdict {
        liminf_estimate: est.low,
        limsup_estimate: est.high,
        proximality_witnesses: est.low_witnesses,
        separation_witnesses: est.high_witnesses,
        verdict,
        thresholds: (opts.delta_low, opts.delta_high),
        certificate,
        series,
    })
}

/// `ln|a − b|` for moduli given by their logarithms (`None` is the origin).
fn log_modulus_gap(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (None, None) => None,
        (Some(l), None) | (None, Some(l)) => Some(l),
        (Some(a), Some(b)) if a == b => None,
        (Some(a), Some(b)) => Some(a.max(b) + (-(-(a - b).abs()).exp()).ln_1p()),
    }
}

fn radial(p: &PlanePoint) -> Option<f64> {
    (!p.is_origin()).then(|| p.log_modulus())
}

fn certify(system: &SystemHandle, x: &State, y: &State, opts: &VerdictOptions) -> Result<Option<Certificate>> {
    if x == y {
        return Ok(Some(Certificate::Identical));
    }
    let h = opts.horizon as f64;
    Ok(match (system, x, y) {
        (SystemHandle::PlaneG, State::Plane(p), State::Plane(q)) => {
            // |g^n p − g^n q| ≥ e^n·| |p| − |q| |; equal moduli rotate together, giving e^n·|p − q|.
            let log_coefficient = match log_modulus_gap(radial(p), radial(q)) {
                Some(l) => l,
                None => {
                    let s = (std::f64::consts::PI * turn_distance(p.angle_turns(), q.angle_turns())).sin();
                    p.log_modulus() + (2.0 * s).ln()
                }
            };
            Some(Certificate::Divergent {
                log_coefficient,
                rate: 1.0,
            })
        }
        (SystemHandle::PlaneGInverse, State::Plane(p), State::Plane(q)) => {
            let bound: f64 = [p, q].iter().map(|z| radial(z).map_or(0.0, |l| (l - h).exp())).sum();
            (bound <= opts.converge_tol).then_some(Certificate::Convergent { upper_bound: bound })
        }
        (SystemHandle::DiskFInverse, State::Plane(p), State::Plane(q)) => {
            let bound: f64 = [p, q]
                .iter()
                .map(|z| z.log_odds().map_or(0.0, |t| phi_inverse(t - h)))
                .sum();
            (bound <= opts.converge_tol).then_some(Certificate::Convergent { upper_bound: bound })
        }
        (SystemHandle::DiskF, State::Plane(p), State::Plane(q)) => match (p.log_odds(), q.log_odds()) {
            // The other point tends to the unit circle while the origin stays put.
            (None, _) | (_, None) => Some(Certificate::SeparatedLimit { limit: 1.0 }),
            // Equal log-odds rotate at the same rate, so the angular gap is frozen.
            (Some(a), Some(b)) if a == b => {
                let s = (std::f64::consts::PI * turn_distance(p.angle_turns(), q.angle_turns())).sin();
                Some(Certificate::SeparatedLimit { limit: 2.0 * s })
            }
            _ => None,
        },
        (
            SystemHandle::TruncatedOperator {
                schedule,
                inverse: true,
                ..
            },
            State::Operator(u),
            State::Operator(v),
        ) => {
            InverseGrowthBound::for_vector(schedule, &u.difference(v)?).map(|b| {
                // Every term grows; the smallest rate gives a bound valid for all n.
                let (c, r) = b
                    .terms
                    .iter()
                    .copied()
                    .fold((f64::NEG_INFINITY, f64::INFINITY), |(c, r), (ci, ri)| {
                        if ci > c {
                            (ci, ri)
                        } else {
                            (c, r)
                        }
                    });
                Certificate::Divergent {
                    log_coefficient: c,
                    rate: r,
                }
            })
        }
        _ => None,
    })
}

fn empirical_decay(series: &DistanceSeries, opts: &VerdictOptions) -> Option<Certificate> {
    let start = ((1.0 - opts.tail_fraction) * series.horizon() as f64).ceil() as u64;
    let first = series.indices().partition_point(|&n| n < start).min(series.len() - 1);
    let tail = &series.values()[first..];
    let tail_max = tail.iter().cloned().fold(0.0, f64::max);
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    (monotone && tail_max <= opts.converge_tol).then_some(Certificate::EmpiricalDecay { tail_max })
}
