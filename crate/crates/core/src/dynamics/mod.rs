//! System-agnostic orbit engine over the disk, plane and operator systems.

mod series;
mod verdict;

use std::sync::Arc;

use crate::error::{Error, Module, Result};
use crate::operator::{truncated_apply, ParameterSchedule, TruncatedVector};
use crate::plane::{euclidean_distance, f_power, g_power, IterateRequest, PlanePoint, Space, MAX_PRECISION_DIGITS};

pub use series::{
    distribution_function, estimate_liminf_limsup, orbit_distance_series, series_at_indices, DistanceSeries,
    DistributionEstimate, LimitEstimate,
};
pub use verdict::{liyorke_verdict, Certificate, LiYorkeVerdict, Verdict, VerdictOptions};

/// Default bound on `|n|` for [`iterate`].
pub const DEFAULT_MAX_ITERATE: i64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    EuclideanPlane,
    HilbertNorm,
}

/// An invertible system together with the metric of its state space.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemHandle {
    DiskF,
    DiskFInverse,
    PlaneG,
    PlaneGInverse,
    /// `T` (or `T^{-1}` when `inverse`) on the first `blocks` blocks.
    TruncatedOperator {
        schedule: Arc<ParameterSchedule>,
        blocks: usize,
        inverse: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Plane(PlanePoint),
    Operator(TruncatedVector),
}

impl From<PlanePoint> for State {
    fn from(p: PlanePoint) -> Self {
        State::Plane(p)
    }
}

impl From<TruncatedVector> for State {
    fn from(v: TruncatedVector) -> Self {
        State::Operator(v)
    }
}

impl State {
    pub fn as_plane(&self) -> Option<&PlanePoint> {
        match self {
            State::Plane(p) => Some(p),
            State::Operator(_) => None,
        }
    }

    pub fn as_operator(&self) -> Option<&TruncatedVector> {
        match self {
            State::Operator(v) => Some(v),
            State::Plane(_) => None,
        }
    }
}

impl SystemHandle {
    pub fn operator(schedule: Arc<ParameterSchedule>, blocks: usize) -> Result<Self> {
        if blocks == 0 || blocks > schedule.len() {
            return Err(Error::rejected(
                Module::Dynamics,
                "blocks",
                format!("block count {blocks} outside 1..={}", schedule.len()),
            ));
        }
        Ok(SystemHandle::TruncatedOperator {
            schedule,
            blocks,
            inverse: false,
        })
    }

    pub fn metric(&self) -> Metric {
        match self {
            SystemHandle::TruncatedOperator { .. } => Metric::HilbertNorm,
            _ => Metric::EuclideanPlane,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            SystemHandle::DiskF => SystemHandle::DiskFInverse,
            SystemHandle::DiskFInverse => SystemHandle::DiskF,
            SystemHandle::PlaneG => SystemHandle::PlaneGInverse,
            SystemHandle::PlaneGInverse => SystemHandle::PlaneG,
            SystemHandle::TruncatedOperator {
                schedule,
                blocks,
                inverse,
            } => SystemHandle::TruncatedOperator {
                schedule: schedule.clone(),
                blocks: *blocks,
                inverse: !inverse,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemHandle::DiskF => "disk-f",
            SystemHandle::DiskFInverse => "disk-f-inverse",
            SystemHandle::PlaneG => "plane-g",
            SystemHandle::PlaneGInverse => "plane-g-inverse",
            SystemHandle::TruncatedOperator { inverse: false, .. } => "operator",
            SystemHandle::TruncatedOperator { inverse: true, .. } => "operator-inverse",
        }
    }

    /// `+1` for forward maps, `−1` for inverses.
    fn sign(&self) -> i64 {
        match self {
            SystemHandle::DiskFInverse | SystemHandle::PlaneGInverse => -1,
            SystemHandle::TruncatedOperator { inverse: true, .. } => -1,
            _ => 1,
        }
    }

    /// Checks that `x` lives in this system's state space.
    pub fn validate(&self, x: &State) -> Result<()> {
        let space = match self {
            SystemHandle::DiskF | SystemHandle::DiskFInverse => Some(Space::Disk),
            SystemHandle::PlaneG | SystemHandle::PlaneGInverse => Some(Space::Plane),
            SystemHandle::TruncatedOperator { .. } => None,
        };
        match (space, x) {
            (Some(s), State::Plane(p)) if p.space() == s => Ok(()),
            (Some(s), _) => Err(Error::rejected(
                Module::Dynamics,
                "state",
                format!("{} expects a {s:?} point", self.name()),
            )),
            (None, State::Operator(v)) => {
                let SystemHandle::TruncatedOperator { schedule, blocks, .. } = self else {
                    unreachable!()
                };
                if v.block_count() != *blocks {
                    return Err(Error::DimensionMismatch {
                        module: Module::Dynamics,
                        expected: *blocks,
                        found: v.block_count(),
                    });
                }
                for (p, b) in schedule.blocks().iter().zip(v.blocks()) {
                    if p.dim as usize != b.len() {
                        return Err(Error::DimensionMismatch {
                            module: Module::Dynamics,
                            expected: p.dim as usize,
                            found: b.len(),
                        });
                    }
                }
                Ok(())
            }
            (None, _) => Err(Error::rejected(
                Module::Dynamics,
                "state",
                format!("{} expects a truncated vector", self.name()),
            )),
        }
    }
}

/// Iteration budget and angle precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub max_iterate: i64,
    pub precision_digits: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_iterate: DEFAULT_MAX_ITERATE,
            precision_digits: MAX_PRECISION_DIGITS,
        }
    }
}

/// `F^n(x)` with the default configuration.
pub fn iterate(system: &SystemHandle, x: &State, n: i64) -> Result<State> {
    iterate_with(system, x, n, &EngineConfig::default())
}

pub fn iterate_with(system: &SystemHandle, x: &State, n: i64, config: &EngineConfig) -> Result<State> {
    system.validate(x)?;
    if n.unsigned_abs() > config.max_iterate.unsigned_abs() {
        return Err(Error::rejected(
            Module::Dynamics,
            "n",
            format!(
                "|n| = {} exceeds the configured maximum {}",
                n.unsigned_abs(),
                config.max_iterate
            ),
        ));
    }
    let signed = n * system.sign();
    match (system, x) {
        (SystemHandle::DiskF | SystemHandle::DiskFInverse, State::Plane(p)) => Ok(State::Plane(f_power(
            p,
            IterateRequest::new(signed, config.precision_digits)?,
        )?)),
        (SystemHandle::PlaneG | SystemHandle::PlaneGInverse, State::Plane(p)) => Ok(State::Plane(g_power(
            p,
            IterateRequest::new(signed, config.precision_digits)?,
        )?)),
        (SystemHandle::TruncatedOperator { schedule, blocks, .. }, State::Operator(v)) => {
            Ok(State::Operator(truncated_apply(schedule, *blocks, v, signed)?))
        }
        _ => unreachable!("validated above"),
    }
}

/// Distance in the system's metric; `index` names the orbit position in range errors.
pub fn state_distance(system: &SystemHandle, a: &State, b: &State, index: i64) -> Result<f64> {
    match (a, b) {
        (State::Plane(p), State::Plane(q)) => euclidean_distance(p, q)
            .ok_or_else(|| Error::range(Module::Dynamics, index, "plane distance exceeds f64 range")),
        (State::Operator(u), State::Operator(v)) => {
            let d = u.log_distance(v)?.exp();
            if d.is_finite() {
                Ok(d)
            } else {
                Err(Error::range(
                    Module::Dynamics,
                    index,
                    "operator distance exceeds f64 range",
                ))
            }
        }
        _ => Err(Error::rejected(
            Module::Dynamics,
            "state",
            format!("{} cannot compare states of different kinds", system.name()),
        )),
    }
}
