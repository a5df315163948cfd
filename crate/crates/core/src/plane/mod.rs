//! The disk homeomorphism `f`, the plane homeomorphism `g`, the radial
//! conjugacy `h` between them, and their signed iterates in closed form.
//!
//! States are polar. A disk point is stored by its log-odds `ln(r/(1−r))`,
//! a plane point by `ln|w|`; angles are kept in turns. In these coordinates
//! `f` and `g` are both "radial coordinate + 1, angle + radial coordinate":
//! iterating `n` times is an addition and an angle accumulation
//! `frac(angle + n·radial)`, the latter carried out in double-double so that
//! `|n|` up to 10^7 keeps ~20 correct digits of the angle.

mod conjugacy;

pub use conjugacy::{cartesian, conjugacy_residual, orbit_transport_gap, PolarGrid, ResidualReport};

use num_complex::Complex64;

use crate::dd::DoubleDouble;
use crate::error::{Error, Module, Result};

/// Working precision of the double-double angle accumulator.
pub const MAX_PRECISION_DIGITS: u32 = 31;
/// Digits delivered by a plain `f64` product.
pub const F64_DIGITS: u32 = 15;
/// Beyond this many steps the angle product must be accumulated in extended precision.
pub const EXTENDED_PRECISION_THRESHOLD: i64 = 10_000;
/// Minimum digits required once `|n|` exceeds [`EXTENDED_PRECISION_THRESHOLD`].
pub const EXTENDED_PRECISION_DIGITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    /// The open unit disk.
    Disk,
    /// The whole plane.
    Plane,
}

/// A point of the open unit disk or the plane, in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    space: Space,
    /// `None` at the origin; log-odds for disk points, log-modulus for plane points.
    radial: Option<f64>,
    angle_turns: f64,
}

/// Reduces an angle in turns to `[0, 1)`.
pub fn wrap_turns(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Circle distance between two angles in turns, in `[0, 1/2]`.
pub fn turn_distance(a: f64, b: f64) -> f64 {
    let d = wrap_turns(a - b);
    d.min(1.0 - d)
}

impl PlanePoint {
    pub fn origin(space: Space) -> Self {
        Self {
            space,
            radial: None,
            angle_turns: 0.0,
        }
    }

    /// Disk point from modulus and angle. `modulus == 0` gives the origin.
    pub fn disk(modulus: f64, angle_turns: f64) -> Result<Self> {
        check_angle(angle_turns)?;
        if modulus == 0.0 {
            return Ok(Self::origin(Space::Disk));
        }
        if !(modulus > 0.0 && modulus < 1.0) {
            return Err(Error::rejected(
                Module::Plane,
                "modulus",
                format!("disk points need 0 <= |z| < 1, got {modulus}"),
            ));
        }
        Ok(Self {
            space: Space::Disk,
            radial: Some(phi(modulus)?),
            angle_turns: wrap_turns(angle_turns),
        })
    }

    /// Disk point whose modulus is `phi_inverse(log_odds)`.
    pub fn disk_from_log_odds(log_odds: f64, angle_turns: f64) -> Result<Self> {
        check_angle(angle_turns)?;
        if !log_odds.is_finite() {
            return Err(Error::rejected(Module::Plane, "log_odds", "must be finite"));
        }
        Ok(Self {
            space: Space::Disk,
            radial: Some(log_odds),
            angle_turns: wrap_turns(angle_turns),
        })
    }

    /// Plane point from modulus and angle. `modulus == 0` gives the origin.
    pub fn plane(modulus: f64, angle_turns: f64) -> Result<Self> {
        if modulus == 0.0 {
            check_angle(angle_turns)?;
            return Ok(Self::origin(Space::Plane));
        }
        if !(modulus > 0.0 && modulus.is_finite()) {
            return Err(Error::rejected(
                Module::Plane,
                "modulus",
                format!("plane points need a finite non-negative modulus, got {modulus}"),
            ));
        }
        Self::plane_from_log_modulus(modulus.ln(), angle_turns)
    }

    pub fn plane_from_log_modulus(log_modulus: f64, angle_turns: f64) -> Result<Self> {
        check_angle(angle_turns)?;
        if !log_modulus.is_finite() {
            return Err(Error::rejected(Module::Plane, "log_modulus", "must be finite"));
        }
        Ok(Self {
            space: Space::Plane,
            radial: Some(log_modulus),
            angle_turns: wrap_turns(angle_turns),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn is_origin(&self) -> bool {
        self.radial.is_none()
    }

    pub fn angle_turns(&self) -> f64 {
        self.angle_turns
    }

    /// Log-odds `ln(r/(1−r))` of a disk point; `None` for the origin and plane points.
    pub fn log_odds(&self) -> Option<f64> {
        match self.space {
            Space::Disk => self.radial,
            Space::Plane => None,
        }
    }

    /// `ln|z|`; `-inf` at the origin. For disk points close to the boundary
    /// this underflows to `-0.0` even though the point is strictly inside.
    pub fn log_modulus(&self) -> f64 {
        match (self.space, self.radial) {
            (_, None) => f64::NEG_INFINITY,
            (Space::Plane, Some(lm)) => lm,
            (Space::Disk, Some(t)) => -softplus(-t),
        }
    }

    pub fn modulus(&self) -> f64 {
        match (self.space, self.radial) {
            (_, None) => 0.0,
            (Space::Plane, Some(lm)) => lm.exp(),
            (Space::Disk, Some(t)) => phi_inverse(t),
        }
    }

    /// `1 − |z|` for disk points, accurate near the boundary.
    pub fn distance_to_boundary(&self) -> Option<f64> {
        match (self.space, self.radial) {
            (Space::Disk, None) => Some(1.0),
            (Space::Disk, Some(t)) => Some(phi_inverse_complement(t)),
            (Space::Plane, _) => None,
        }
    }

    pub fn to_cartesian(&self) -> Complex64 {
        if self.is_origin() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.modulus(), std::f64::consts::TAU * self.angle_turns)
    }

    /// Builds a point from Cartesian coordinates.
    pub fn from_cartesian(space: Space, z: Complex64) -> Result<Self> {
        let r = z.norm();
        let angle = if r == 0.0 {
            0.0
        } else {
            wrap_turns(z.arg() / std::f64::consts::TAU)
        };
        match space {
            Space::Disk => Self::disk(r, angle),
            Space::Plane => Self::plane(r, angle),
        }
    }
}

fn check_angle(angle: f64) -> Result<()> {
    if angle.is_finite() {
        Ok(())
    } else {
        Err(Error::rejected(Module::Plane, "angle_turns", "must be finite"))
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// The log-odds homeomorphism `(0,1) → ℝ`, `r ↦ ln(r/(1−r))`.
pub fn phi(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::rejected(
            Module::Plane,
            "r",
            format!("phi is defined on (0, 1), got {r}"),
        ));
    }
    Ok(r.ln() - (-r).ln_1p())
}

/// Inverse of [`phi`]: `1/(1+e^{−t})`.
///
/// In `f64` the result rounds to exactly 1 once `t > ~36.7`; use
/// [`phi_inverse_complement`] when the distance to 1 matters.
pub fn phi_inverse(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `1 − phi_inverse(t)`, computed without cancellation.
pub fn phi_inverse_complement(t: f64) -> f64 {
    phi_inverse(-t)
}

/// Signed iterate count plus the working precision of the angle accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterateRequest {
    n: i64,
    precision_digits: u32,
}

impl IterateRequest {
    pub fn new(n: i64, precision_digits: u32) -> Result<Self> {
        if precision_digits == 0 {
            return Err(Error::rejected(Module::Plane, "precision_digits", "must be positive"));
        }
        if precision_digits > MAX_PRECISION_DIGITS {
            return Err(Error::precision(
                Module::Plane,
                "precision_digits",
                format!("{precision_digits} digits requested, the angle accumulator carries {MAX_PRECISION_DIGITS}"),
            ));
        }
        if n.unsigned_abs() > EXTENDED_PRECISION_THRESHOLD as u64 && precision_digits < EXTENDED_PRECISION_DIGITS {
            return Err(Error::rejected(
                Module::Plane,
                "precision_digits",
                format!(
                    "|n| = {} needs at least {EXTENDED_PRECISION_DIGITS} digits, got {precision_digits}",
                    n.unsigned_abs()
                ),
            ));
        }
        Ok(Self { n, precision_digits })
    }

    /// `n` steps at full double-double precision.
    pub fn steps(n: i64) -> Self {
        Self {
            n,
            precision_digits: MAX_PRECISION_DIGITS,
        }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }
}

/// `frac(angle + n·rate)` at the requested precision.
pub fn accumulate_angle(angle_turns: f64, n: i64, rate: f64, precision_digits: u32) -> f64 {
    if precision_digits <= F64_DIGITS {
        return wrap_turns(angle_turns + n as f64 * rate);
    }
    // n·rate is exact in double-double for |n| < 2^53.
    let turns = DoubleDouble::product_exact(n as f64, rate) + DoubleDouble::from(angle_turns);
    wrap_turns(turns.fract().to_f64())
}

fn require_space(z: &PlanePoint, space: Space, what: &'static str) -> Result<()> {
    if z.space == space {
        Ok(())
    } else {
        Err(Error::rejected(
            Module::Plane,
            what,
            format!("expected a {space:?} point, got a {:?} point", z.space),
        ))
    }
}

/// `f^n(z)` on the open disk for signed `n`.
///
/// The modulus follows `r/(r + (1−r)e^{−n})`, i.e. the log-odds shifts by `n`;
/// the angle advances by `n·φ(r)` turns.
pub fn f_power(z: &PlanePoint, req: IterateRequest) -> Result<PlanePoint> {
    require_space(z, Space::Disk, "z")?;
    let Some(t) = z.radial else {
        return Ok(*z);
    };
    let n = req.n;
    let shifted = t + n as f64;
    debug_assert!(shifted.is_finite(), "log-odds left the representable range");
    Ok(PlanePoint {
        space: Space::Disk,
        radial: Some(shifted),
        angle_turns: accumulate_angle(z.angle_turns, n, t, req.precision_digits),
    })
}

/// `g^n(w)` on the plane for signed `n`: log-modulus shifts by `n`, the angle
/// advances by `n·ln|w|` turns (using the original modulus).
pub fn g_power(w: &PlanePoint, req: IterateRequest) -> Result<PlanePoint> {
    require_space(w, Space::Plane, "w")?;
    let Some(lm) = w.radial else {
        return Ok(*w);
    };
    let n = req.n;
    Ok(PlanePoint {
        space: Space::Plane,
        radial: Some(lm + n as f64),
        angle_turns: accumulate_angle(w.angle_turns, n, lm, req.precision_digits),
    })
}

/// The conjugacy `h(z) = z/(1−|z|)` from the disk onto the plane.
///
/// `ln|h(z)| = ln r − ln(1−r)` is exactly the stored log-odds, so the map is
/// a relabelling of the radial coordinate.
pub fn h_apply(z: &PlanePoint) -> Result<PlanePoint> {
    require_space(z, Space::Disk, "z")?;
    Ok(PlanePoint {
        space: Space::Plane,
        radial: z.radial,
        angle_turns: z.angle_turns,
    })
}

/// `h^{-1}(w) = w/(1+|w|)`.
pub fn h_inverse(w: &PlanePoint) -> Result<PlanePoint> {
    require_space(w, Space::Plane, "w")?;
    Ok(PlanePoint {
        space: Space::Disk,
        radial: w.radial,
        angle_turns: w.angle_turns,
    })
}

/// Euclidean distance between two points of the same space, computed from
/// the polar data without forming huge Cartesian coordinates. `None` when
/// the distance exceeds `f64` range.
pub fn euclidean_distance(a: &PlanePoint, b: &PlanePoint) -> Option<f64> {
    debug_assert_eq!(a.space, b.space);
    match (a.radial, b.radial) {
        (None, None) => Some(0.0),
        (None, Some(_)) => finite(b.modulus()),
        (Some(_), None) => finite(a.modulus()),
        (Some(ra), Some(rb)) => {
            let s = (std::f64::consts::PI * turn_distance(a.angle_turns, b.angle_turns)).sin();
            match a.space {
                Space::Disk => {
                    let (ma, mb) = (phi_inverse(ra), phi_inverse(rb));
                    // Near the boundary the radial gap is better taken from the complements.
                    let gap = if ma > 0.5 && mb > 0.5 {
                        phi_inverse_complement(rb) - phi_inverse_complement(ra)
                    } else {
                        ma - mb
                    };
                    Some((gap * gap + 4.0 * ma * mb * s * s).sqrt())
                }
                Space::Plane => {
                    let (hi, lo) = if ra >= rb { (ra, rb) } else { (rb, ra) };
                    let rho = (lo - hi).exp();
                    let unit = ((1.0 - rho) * (1.0 - rho) + 4.0 * rho * s * s).sqrt();
                    if unit == 0.0 {
                        return Some(0.0);
                    }
                    finite((hi + unit.ln()).exp())
                }
            }
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.5).unwrap(), 0.0);
        assert!((phi(E / (1.0 + E)).unwrap() - 1.0).abs() < 1e-15);
        assert!(phi(0.0).is_err());
        assert!(phi(1.0).is_err());
        assert!(phi(f64::NAN).is_err());
    }

    #[test]
    fn phi_inverse_examples() {
        assert_eq!(phi_inverse(0.0), 0.5);
        // 1/(1+e^{-√2}) to 50 digits: 0.80442968250695690519…
        assert!((phi_inverse(std::f64::consts::SQRT_2) - 0.804_429_682_506_956_9).abs() < 1e-15);
        let c = phi_inverse_complement(50.0);
        assert!(c > 0.0 && c < 1e-20);
        assert!(phi_inverse(-800.0) >= 0.0);
        assert_eq!(phi_inverse(800.0), 1.0);
    }

    #[test]
    fn f_power_examples() {
        let origin = PlanePoint::origin(Space::Disk);
        assert_eq!(f_power(&origin, IterateRequest::steps(1_000_000)).unwrap(), origin);

        let z = PlanePoint::disk(0.5, 0.0).unwrap();
        let one = f_power(&z, IterateRequest::steps(1)).unwrap();
        // e/(1+e) = 0.73105857863000487925…
        assert!((one.modulus() - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert_eq!(one.angle_turns(), 0.0);

        let back = f_power(&z, IterateRequest::steps(-20)).unwrap();
        // 0.5/(0.5+0.5e^{20}) = 2.0611536181902035…e-9
        assert!((back.modulus() - 2.061_153_618_190_203_6e-9).abs() < 1e-22);
    }

    #[test]
    fn g_power_examples() {
        let w = PlanePoint::plane(1.0, 0.25).unwrap();
        let w3 = g_power(&w, IterateRequest::steps(3)).unwrap();
        assert_eq!(w3.log_modulus(), 3.0);
        assert_eq!(w3.angle_turns(), 0.25);

        let w = PlanePoint::plane_from_log_modulus(1.0, 0.0).unwrap();
        let back = g_power(&w, IterateRequest::steps(-1)).unwrap();
        assert_eq!(back.log_modulus(), 0.0);
        assert!(turn_distance(back.angle_turns(), 0.0) < 1e-15);

        let w = PlanePoint::plane(0.37, 0.6).unwrap();
        let w40 = g_power(&w, IterateRequest::steps(40)).unwrap();
        assert_eq!(w40.log_modulus() - w.log_modulus(), 40.0);
    }

    #[test]
    fn h_examples() {
        let z = PlanePoint::disk(0.5, 0.1).unwrap();
        assert!((h_apply(&z).unwrap().modulus() - 1.0).abs() < 1e-15);
        let z = PlanePoint::disk(0.9, 0.3).unwrap();
        let w = h_apply(&z).unwrap();
        assert!((w.modulus() - 9.0).abs() < 1e-13);
        assert_eq!(w.angle_turns(), 0.3);
        assert_eq!(h_inverse(&w).unwrap(), z);
        assert!(h_apply(&w).is_err());
        assert!(h_apply(&PlanePoint::origin(Space::Disk)).unwrap().is_origin());
    }

    #[test]
    fn disk_boundary_rejected() {
        assert!(PlanePoint::disk(1.0, 0.0).is_err());
        assert!(PlanePoint::disk(1.5, 0.0).is_err());
        assert!(PlanePoint::disk(-0.1, 0.0).is_err());
        assert!(PlanePoint::plane(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn disk_points_stay_inside_far_along_the_orbit() {
        let z = PlanePoint::disk(0.3, 0.0).unwrap();
        let far = f_power(&z, IterateRequest::steps(10_000)).unwrap();
        assert!(far.log_odds().unwrap() > 9_999.0);
        assert_eq!(far.distance_to_boundary(), Some(0.0));
        assert!(far.space() == Space::Disk);
    }

    #[test]
    fn precision_rules() {
        assert!(IterateRequest::new(20_000, 16).is_err());
        assert!(IterateRequest::new(20_000, 30).is_ok());
        assert!(IterateRequest::new(5, 16).is_ok());
        assert!(matches!(
            IterateRequest::new(5, 40),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn extended_angle_beats_plain_product() {
        // frac(n·φ) with n = 10^7: the double-double path must agree with an
        // exact split of the product, the f64 path may drift.
        let rate = 0.123_456_789_012_345_67;
        let n = 10_000_000i64;
        let dd = accumulate_angle(0.0, n, rate, 31);
        let hi = (n as f64 * rate).floor();
        let exact = DoubleDouble::product_exact(n as f64, rate) - DoubleDouble::from(hi);
        assert!((dd - exact.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn distance_formula_matches_cartesian() {
        let a = PlanePoint::disk(0.7, 0.1).unwrap();
        let b = PlanePoint::disk(0.2, 0.8).unwrap();
        let d = euclidean_distance(&a, &b).unwrap();
        assert!((d - (a.to_cartesian() - b.to_cartesian()).norm()).abs() < 1e-15);

        let a = PlanePoint::plane(3.0, 0.4).unwrap();
        let b = PlanePoint::plane(0.5, 0.05).unwrap();
        let d = euclidean_distance(&a, &b).unwrap();
        assert!((d - (a.to_cartesian() - b.to_cartesian()).norm()).abs() < 1e-14);

        let huge = PlanePoint::plane_from_log_modulus(800.0, 0.0).unwrap();
        assert_eq!(euclidean_distance(&huge, &b), None);
    }
}
