use num_complex::Complex64;

use super::{euclidean_distance, f_power, g_power, h_apply, IterateRequest, PlanePoint};
use crate::error::{Error, Module, Result};

/// Literal Cartesian forms of the maps, evaluated with complex arithmetic.
///
/// These share no code with the polar iterates and serve as the second
/// route in the conjugacy residual.
pub mod cartesian {
    use num_complex::Complex64;
    use std::f64::consts::{E, TAU};

    fn rotation(turns: f64) -> Complex64 {
        Complex64::from_polar(1.0, TAU * turns)
    }

    pub fn f(z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return z;
        }
        E * z / (E * r - r + 1.0) * rotation((r / (1.0 - r)).ln())
    }

    pub fn f_inverse(w: Complex64) -> Complex64 {
        let r = w.norm();
        if r == 0.0 {
            return w;
        }
        w / E / (r / E - r + 1.0) * rotation(-(r / (1.0 - r)).ln())
    }

    pub fn g(z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return z;
        }
        E * z * rotation(r.ln())
    }

    pub fn g_inverse(w: Complex64) -> Complex64 {
        let r = w.norm();
        if r == 0.0 {
            return w;
        }
        w / E * rotation(-r.ln())
    }

    pub fn h(z: Complex64) -> Complex64 {
        z / (1.0 - z.norm())
    }

    pub fn h_inverse(w: Complex64) -> Complex64 {
        w / (1.0 + w.norm())
    }
}

/// Polar sampling grid: `radial` moduli evenly spaced on `[0, r_max]`
/// (both ends included) times `angular` evenly spaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarGrid {
    pub radial: usize,
    pub angular: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub at_modulus: f64,
    pub at_angle_turns: f64,
    pub origin_residual: Option<f64>,
    pub points: usize,
}

/// Upper bound on `r_max`; `h` amplifies rounding like `1/(1−r)`.
pub const R_MAX_LIMIT: f64 = 1.0 - 1e-6;

/// Maximum of `|h(f(z)) − g(h(z))|` over the grid, evaluated in Cartesian form.
pub fn conjugacy_residual(grid: PolarGrid, r_max: f64) -> Result<ResidualReport> {
    if grid.radial < 2 || grid.angular < 1 {
        return Err(Error::rejected(
            Module::Plane,
            "grid",
            "need at least 2 radial and 1 angular samples",
        ));
    }
    if !(r_max > 0.0 && r_max <= R_MAX_LIMIT) {
        return Err(Error::rejected(
            Module::Plane,
            "r_max",
            format!("must lie in (0, {R_MAX_LIMIT}], got {r_max}"),
        ));
    }
    let mut report = ResidualReport {
        max_residual: 0.0,
        at_modulus: 0.0,
        at_angle_turns: 0.0,
        origin_residual: None,
        points: 0,
    };
    for i in 0..grid.radial {
        let r = r_max * i as f64 / (grid.radial - 1) as f64;
        for k in 0..grid.angular {
            let turns = k as f64 / grid.angular as f64;
            let z = Complex64::from_polar(r, std::f64::consts::TAU * turns);
            let lhs = cartesian::h(cartesian::f(z));
            let rhs = cartesian::g(cartesian::h(z));
            let residual = (lhs - rhs).norm();
            if r == 0.0 {
                let prev = report.origin_residual.unwrap_or(0.0);
                report.origin_residual = Some(prev.max(residual));
            }
            if residual > report.max_residual {
                report.max_residual = residual;
                report.at_modulus = r;
                report.at_angle_turns = turns;
            }
            report.points += 1;
        }
    }
    Ok(report)
}

/// `|h(f^n z) − g^n(h z)|` along the polar closed forms.
pub fn orbit_transport_gap(z: &PlanePoint, req: IterateRequest) -> Result<f64> {
    let lhs = h_apply(&f_power(z, req)?)?;
    let rhs = g_power(&h_apply(z)?, req)?;
    euclidean_distance(&lhs, &rhs).ok_or_else(|| Error::range(Module::Plane, req.n(), "transported orbit overflows"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Space;

    #[test]
    fn residual_is_rounding_only() {
        let report = conjugacy_residual(
            PolarGrid {
                radial: 40,
                angular: 40,
            },
            0.99,
        )
        .unwrap();
        assert!(report.max_residual <= 1e-10, "{report:?}");
        assert_eq!(report.origin_residual, Some(0.0));
        assert_eq!(report.points, 1600);
    }

    #[test]
    fn residual_rejects_boundary() {
        assert!(conjugacy_residual(PolarGrid { radial: 4, angular: 4 }, 1.0).is_err());
        assert!(conjugacy_residual(PolarGrid { radial: 1, angular: 4 }, 0.5).is_err());
    }

    #[test]
    fn cartesian_inverses_round_trip() {
        let z = Complex64::new(0.3, -0.55);
        assert!((cartesian::f_inverse(cartesian::f(z)) - z).norm() < 1e-14);
        assert!((cartesian::g_inverse(cartesian::g(z)) - z).norm() < 1e-14);
        assert!((cartesian::h_inverse(cartesian::h(z)) - z).norm() < 1e-15);
    }

    #[test]
    fn polar_maps_match_cartesian_forms() {
        for &(r, a) in &[(0.2, 0.1), (0.5, 0.0), (0.93, 0.77)] {
            let z = PlanePoint::disk(r, a).unwrap();
            let fz = f_power(&z, IterateRequest::steps(1)).unwrap().to_cartesian();
            let expect = cartesian::f(z.to_cartesian());
            assert!((fz - expect).norm() < 1e-13, "f at r={r}");

            let w = h_apply(&z).unwrap();
            assert!((w.to_cartesian() - cartesian::h(z.to_cartesian())).norm() < 1e-12);
            let gw = g_power(&w, IterateRequest::steps(-1)).unwrap().to_cartesian();
            assert!((gw - cartesian::g_inverse(w.to_cartesian())).norm() < 1e-12);
        }
    }

    #[test]
    fn transport_is_exact_in_polar_form() {
        let z = PlanePoint::disk(0.8, 0.4).unwrap();
        for n in [0, 1, 17, 30] {
            assert_eq!(orbit_transport_gap(&z, IterateRequest::steps(n)).unwrap(), 0.0);
        }
        let origin = PlanePoint::origin(Space::Disk);
        assert_eq!(orbit_transport_gap(&origin, IterateRequest::steps(5)).unwrap(), 0.0);
    }
}
