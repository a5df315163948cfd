//! Li-Yorke chaos laboratory: invertible systems on the disk, the plane and a
//! block-diagonal operator, with a continued-fraction engine that produces the
//! orbit indices along which pairs come close or separate.

// `!(x < bound)` is how parameter checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod diophantine;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod plane;
pub mod scrambled;

pub use dd::DoubleDouble;
pub use diophantine::{ContinuedFraction, RealWithError, SearchStrategy, WitnessSequence};
pub use dynamics::{DistanceSeries, DistributionEstimate, LiYorkeVerdict, Metric, State, SystemHandle, Verdict};
pub use error::{Error, Module, Result};
pub use operator::{BlockMatrix, ParameterSchedule, TruncatedVector};
pub use plane::{IterateRequest, PlanePoint, Space};
pub use scrambled::{NamedIrrational, ScrambledFamily};
