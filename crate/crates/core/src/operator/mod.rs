//! Block-diagonal operator `T = ⊕ T_i` on finite truncations.
//!
//! Each block is upper bidiagonal with spectral radius `1 − ε_i < 1`, so forward
//! orbits decay, while the inverse has every eigenvalue above 1 and inverse
//! orbits of nonzero vectors grow without bound.

mod block;
mod schedule;
mod truncated;

pub use block::{
    block_apply, block_inverse_apply, block_power_apply, block_power_apply_with, forward_decay_by_doubling,
    inverse_growth_crossing, transient_growth_profile, BlockMatrix, Direction, GrowthProfile, InverseMethod,
    PowerMethod, Probe, ScaledVector, MAX_KERNEL_POWER, MAX_POWER,
};
pub use schedule::{build_schedule, exact_growth_reaches, BlockParameters, ParameterSchedule};
pub use truncated::{truncated_apply, InverseGrowthBound, TruncatedVector};

/// Block count used when none is given.
pub const DEFAULT_BLOCKS: usize = 4;
