//! Shared fixtures for the criterion benches.

use liyorke_core::operator::{build_schedule, ParameterSchedule};
use liyorke_core::plane::PlanePoint;
use liyorke_core::scrambled::{certified_family, ScrambledFamily};
use liyorke_core::NamedIrrational;

/// The example schedule: `eps = 0.1`, `C = {2, 4, 8, 16}`.
pub fn example_schedule() -> ParameterSchedule {
    build_schedule(0.1, &[2.0, 4.0, 8.0, 16.0], 4).expect("example schedule is valid")
}

/// Five disk points with log-odds `0, √2, …, 4√2`.
pub fn sqrt2_family() -> ScrambledFamily {
    certified_family(5, NamedIrrational::Sqrt2, 0.0).expect("valid family")
}

pub fn disk_point(modulus: f64, angle_turns: f64) -> PlanePoint {
    PlanePoint::disk(modulus, angle_turns).expect("inside the disk")
}
