use rayon::prelude::*;

use super::{iterate_with, state_distance, EngineConfig, State, SystemHandle};
use crate::error::{Error, Module, Result};

/// Distances `d(F^n x, F^n y)` sampled at increasing indices `n ≤ horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSeries {
    indices: Vec<u64>,
    values: Vec<f64>,
    horizon: u64,
}

impl DistanceSeries {
    pub fn new(indices: Vec<u64>, values: Vec<f64>, horizon: u64) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::rejected(
                Module::Dynamics,
                "series",
                "indices and values differ in length",
            ));
        }
        if horizon == 0 {
            return Err(Error::rejected(Module::Dynamics, "horizon", "must be positive"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::rejected(
                Module::Dynamics,
                "series",
                "indices must be strictly increasing",
            ));
        }
        if indices.last().is_some_and(|&n| n > horizon) {
            return Err(Error::rejected(Module::Dynamics, "series", "index beyond the horizon"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::rejected(
                Module::Dynamics,
                "series",
                "values must be finite and non-negative",
            ));
        }
        Ok(Self {
            indices,
            values,
            horizon,
        })
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Value at orbit index `n`, if sampled.
    pub fn value_at(&self, n: u64) -> Option<f64> {
        self.indices.binary_search(&n).ok().map(|j| self.values[j])
    }

    /// Keeps the entries with index below `n`.
    pub(crate) fn truncate_before(&mut self, n: u64) {
        let keep = self.indices.partition_point(|&i| i < n);
        self.indices.truncate(keep);
        self.values.truncate(keep);
    }
}

/// Indices `0, stride, 2·stride, … ≤ horizon`.
pub fn orbit_distance_series(
    system: &SystemHandle,
    x: &State,
    y: &State,
    horizon: u64,
    stride: u64,
) -> Result<DistanceSeries> {
    if stride == 0 {
        return Err(Error::rejected(Module::Dynamics, "stride", "must be positive"));
    }
    let indices: Vec<u64> = (0..=horizon).step_by(stride as usize).collect();
    series_at_indices(system, x, y, &indices, horizon, &EngineConfig::default())
}

/// Distances at the given strictly increasing indices.
///
/// A range failure reports the smallest failing index.
pub fn series_at_indices(
    system: &SystemHandle,
    x: &State,
    y: &State,
    indices: &[u64],
    horizon: u64,
    config: &EngineConfig,
) -> Result<DistanceSeries> {
    if horizon == 0 {
        return Err(Error::rejected(Module::Dynamics, "horizon", "must be positive"));
    }
    system.validate(x)?;
    system.validate(y)?;
    if indices.windows(2).any(|w| w[0] >= w[1]) || indices.last().is_some_and(|&n| n > horizon) {
        return Err(Error::rejected(
            Module::Dynamics,
            "indices",
            "must be strictly increasing and within the horizon",
        ));
    }
    if horizon > config.max_iterate.unsigned_abs() {
        return Err(Error::rejected(
            Module::Dynamics,
            "horizon",
            format!("{horizon} exceeds the configured maximum {}", config.max_iterate),
        ));
    }
    let values = match (x, y) {
        (State::Operator(u), State::Operator(v)) => operator_series(system, u.difference(v)?, indices, config)?,
        _ => {
            let results: Vec<Result<f64>> = indices
                .par_iter()
                .map(|&n| {
                    let n = n as i64;
                    let a = iterate_with(system, x, n, config)?;
                    let b = iterate_with(system, y, n, config)?;
                    state_distance(system, &a, &b, n)
                })
                .collect();
            results.into_iter().collect::<Result<Vec<_>>>()?
        }
    };
    DistanceSeries::new(indices.to_vec(), values, horizon)
}

/// By linearity `‖T^n x − T^n y‖ = ‖T^n (x − y)‖`, so only the difference is stepped.
fn operator_series(
    system: &SystemHandle,
    diff: crate::operator::TruncatedVector,
    indices: &[u64],
    config: &EngineConfig,
) -> Result<Vec<f64>> {
    let mut current = State::Operator(diff);
    let mut at = 0u64;
    let mut out = Vec::with_capacity(indices.len());
    for &n in indices {
        if n > at {
            current = iterate_with(system, &current, (n - at) as i64, config)?;
            at = n;
        }
        let State::Operator(v) = &current else { unreachable!() };
        let d = v.log_norm().exp();
        if !d.is_finite() {
            return Err(Error::range(
                Module::Dynamics,
                n as i64,
                "operator distance exceeds f64 range",
            ));
        }
        out.push(d);
    }
    Ok(out)
}

/// Trailing-window extremes of a series with the indices that set them.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub low: f64,
    pub high: f64,
    /// Successive new minima within the tail; the last one attains `low`.
    pub low_witnesses: Vec<u64>,
    /// Successive new maxima within the tail; the last one attains `high`.
    pub high_witnesses: Vec<u64>,
}

/// Min and max over entries with index `n ≥ ⌈(1 − tail_fraction)·horizon⌉`.
///
/// When no sampled index falls in that window the final entry alone is used.
pub fn estimate_liminf_limsup(series: &DistanceSeries, tail_fraction: f64) -> Result<LimitEstimate> {
    if series.is_empty() {
        return Err(Error::rejected(Module::Dynamics, "series", "empty series"));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::rejected(Module::Dynamics, "tail_fraction", "must lie in (0, 1]"));
    }
    let start = ((1.0 - tail_fraction) * series.horizon as f64).ceil() as u64;
    let mut first = series.indices.partition_point(|&n| n < start);
    if first == series.len() {
        first = series.len() - 1;
    }
    let mut est = LimitEstimate {
        low: f64::INFINITY,
        high: f64::NEG_INFINITY,
        low_witnesses: Vec::new(),
        high_witnesses: Vec::new(),
    };
    for (&n, &v) in series.indices[first..].iter().zip(&series.values[first..]) {
        if v < est.low {
            est.low = v;
            est.low_witnesses.push(n);
        }
        if v > est.high {
            est.high = v;
            est.high_witnesses.push(n);
        }
    }
    Ok(est)
}

/// Lower and upper empirical distribution functions of a distance series.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionEstimate {
    pub t_grid: Vec<f64>,
    pub lower_values: Vec<f64>,
    pub upper_values: Vec<f64>,
    pub sample_size: usize,
}

/// For each `t`, the min and max of `(1/n)·#{i < n : values[i] < t}` over
/// prefix lengths `n` in the trailing half of the series.
pub fn distribution_function(series: &DistanceSeries, t_grid: &[f64]) -> Result<DistributionEstimate> {
    if series.is_empty() {
        return Err(Error::rejected(Module::Dynamics, "series", "empty series"));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::rejected(
            Module::Dynamics,
            "t_grid",
            "needs positive finite values",
        ));
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::rejected(
            Module::Dynamics,
            "t_grid",
            "must be strictly increasing",
        ));
    }
    let len = series.len();
    let from = len.div_ceil(2).max(1);
    let (lower_values, upper_values) = t_grid
        .par_iter()
        .map(|&t| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let mut below = 0usize;
            for (i, &v) in series.values.iter().enumerate() {
                if v < t {
                    below += 1;
                }
                let n = i + 1;
                if n >= from {
                    let freq = below as f64 / n as f64;
                    lo = lo.min(freq);
                    hi = hi.max(freq);
                }
            }
            (lo, hi)
        })
        .unzip();
    Ok(DistributionEstimate {
        t_grid: t_grid.to_vec(),
        lower_values,
        upper_values,
        sample_size: len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::PlanePoint;

    fn series(values: Vec<f64>) -> DistanceSeries {
        let n = values.len() as u64;
        DistanceSeries::new((1..=n).collect(), values, n).unwrap()
    }

    #[test]
    fn constant_series() {
        let s = series(vec![0.7; 40]);
        let e = estimate_liminf_limsup(&s, 0.5).unwrap();
        assert_eq!((e.low, e.high), (0.7, 0.7));
        let d = distribution_function(&s, &[0.35, 1.4]).unwrap();
        assert_eq!(d.lower_values, vec![0.0, 1.0]);
        assert_eq!(d.upper_values, vec![0.0, 1.0]);
    }

    #[test]
    fn harmonic_tail() {
        let n = 1000;
        let s = series((1..=n).map(|k| 1.0 / k as f64).collect());
        let e = estimate_liminf_limsup(&s, 0.5).unwrap();
        assert_eq!(e.low, 1.0 / n as f64);
        assert_eq!(e.high, 2.0 / n as f64);
        assert_eq!(e.low_witnesses.last(), Some(&(n as u64)));
        assert_eq!(e.high_witnesses, vec![500]);
    }

    #[test]
    fn alternating_half() {
        let s = series((0..1000).map(|k| if k % 2 == 0 { 0.0 } else { 2.0 }).collect());
        let d = distribution_function(&s, &[1.0]).unwrap();
        assert!((d.lower_values[0] - 0.5).abs() <= 1.0 / 500.0);
        assert!((d.upper_values[0] - 0.5).abs() <= 1.0 / 500.0);
    }

    #[test]
    fn rejects_bad_series() {
        assert!(DistanceSeries::new(vec![2, 1], vec![0.0, 0.0], 5).is_err());
        assert!(DistanceSeries::new(vec![1, 9], vec![0.0, 0.0], 5).is_err());
        assert!(DistanceSeries::new(vec![1], vec![f64::NAN], 5).is_err());
        let s = series(vec![1.0, 2.0]);
        assert!(distribution_function(&s, &[2.0, 1.0]).is_err());
        assert!(estimate_liminf_limsup(&s, 0.0).is_err());
    }

    #[test]
    fn identical_points_give_zero() {
        let x = State::Plane(PlanePoint::disk(0.4, 0.1).unwrap());
        let s = orbit_distance_series(&SystemHandle::DiskF, &x, &x, 50, 1).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
        assert_eq!(s.len(), 51);
    }

    #[test]
    fn plane_g_grows_then_overflows() {
        let x = State::Plane(PlanePoint::plane(1.0, 0.0).unwrap());
        let y = State::Plane(PlanePoint::plane(2.0, 0.0).unwrap());
        let s = orbit_distance_series(&SystemHandle::PlaneG, &x, &y, 3, 1).unwrap();
        // Same angle at n = 0; afterwards the lower bound e^n·|1 − 2| holds.
        for (&n, &v) in s.indices().iter().zip(s.values()) {
            assert!(v >= (n as f64).exp() * (1.0 - 1e-12));
        }
        let err = orbit_distance_series(&SystemHandle::PlaneG, &x, &y, 800, 1).unwrap_err();
        assert!(matches!(err, Error::NumericalRange { index, .. } if index > 700 && index < 712));
    }

    #[test]
    fn disk_inverse_converges() {
        let x = State::Plane(PlanePoint::disk(0.5, 0.0).unwrap());
        let y = State::Plane(PlanePoint::disk(0.25, 0.0).unwrap());
        let s = orbit_distance_series(&SystemHandle::DiskFInverse, &x, &y, 20, 1).unwrap();
        assert!(s.value_at(20).unwrap() <= 1e-6);
    }
}
