//! Finite samples of a set `B ⊂ (0,1)` whose log-odds values differ pairwise
//! by irrational amounts.
//!
//! The certified construction places log-odds on an arithmetic lattice
//! `center + j·base` with an irrational `base`; every pairwise difference is
//! `(j − k)·base`, irrational with a known continued fraction. The random
//! construction draws log-odds uniformly and is irrational only almost surely.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dd::DoubleDouble;
use crate::diophantine::RealWithError;
use crate::error::{Error, Module, Result};
use crate::plane::{phi_inverse, PlanePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedIrrational {
    Sqrt2,
    Golden,
    E,
}

impl NamedIrrational {
    pub fn real(self) -> RealWithError {
        match self {
            NamedIrrational::Sqrt2 => RealWithError::sqrt2(),
            NamedIrrational::Golden => RealWithError::golden(),
            NamedIrrational::E => RealWithError::euler(),
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            NamedIrrational::Sqrt2 => "sqrt2",
            NamedIrrational::Golden => "golden",
            NamedIrrational::E => "e",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "sqrt2" => Some(NamedIrrational::Sqrt2),
            "golden" => Some(NamedIrrational::Golden),
            "e" => Some(NamedIrrational::E),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    CertifiedLattice {
        base: NamedIrrational,
        center: f64,
        offsets: Vec<i64>,
    },
    /// Uniform log-odds on `[-3, 3]`; irrational differences are not certified.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScrambledFamily {
    points: Vec<f64>,
    phi_values: Vec<f64>,
    provenance: Provenance,
}

/// Half-width of the interval random log-odds are drawn from.
pub const RANDOM_PHI_RANGE: f64 = 3.0;

/// `count` points with log-odds `center + j·base`, `j = 0..count`.
pub fn certified_family(count: usize, base: NamedIrrational, center: f64) -> Result<ScrambledFamily> {
    if count < 2 {
        return Err(Error::rejected(
            Module::Scrambled,
            "count",
            "a family needs at least 2 points",
        ));
    }
    certified_family_with_offsets(&(0..count as i64).collect::<Vec<_>>(), base, center)
}

/// Lattice family with explicit distinct integer offsets.
pub fn certified_family_with_offsets(offsets: &[i64], base: NamedIrrational, center: f64) -> Result<ScrambledFamily> {
    if offsets.len() < 2 {
        return Err(Error::rejected(Module::Scrambled, "offsets", "need at least 2 offsets"));
    }
    let mut seen = offsets.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::rejected(
            Module::Scrambled,
            "offsets",
            "offsets must be distinct",
        ));
    }
    if !center.is_finite() {
        return Err(Error::rejected(Module::Scrambled, "center", "must be finite"));
    }
    let b = base.real().value();
    let phi_values: Vec<f64> = offsets
        .iter()
        .map(|&j| (DoubleDouble::from(center) + b * DoubleDouble::from(j)).to_f64())
        .collect();
    Ok(ScrambledFamily {
        points: phi_values.iter().map(|&t| phi_inverse(t)).collect(),
        phi_values,
        provenance: Provenance::CertifiedLattice {
            base,
            center,
            offsets: offsets.to_vec(),
        },
    })
}

/// `count` points with log-odds drawn uniformly from `[-3, 3]` by a seeded generator.
pub fn random_family(count: usize, seed: u64) -> Result<ScrambledFamily> {
    if count < 2 {
        return Err(Error::rejected(
            Module::Scrambled,
            "count",
            "a family needs at least 2 points",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi_values: Vec<f64> = Vec::with_capacity(count);
    while phi_values.len() < count {
        let t = rng.random_range(-RANDOM_PHI_RANGE..=RANDOM_PHI_RANGE);
        if !phi_values.contains(&t) {
            phi_values.push(t);
        }
    }
    Ok(ScrambledFamily {
        points: phi_values.iter().map(|&t| phi_inverse(t)).collect(),
        phi_values,
        provenance: Provenance::Random { seed },
    })
}

impl ScrambledFamily {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi_values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The `j`-th member as a disk point on the positive real axis.
    pub fn disk_point(&self, j: usize) -> Result<PlanePoint> {
        let t = self
            .phi_values
            .get(j)
            .ok_or_else(|| Error::rejected(Module::Scrambled, "index", format!("{j} out of range")))?;
        PlanePoint::disk_from_log_odds(*t, 0.0)
    }

    /// All unordered pairs `(j, k)` with `j < k`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect()
    }
}

/// `θ = φ(x_j) − φ(x_k)`: the rotation number of the pair's angular gap.
pub fn pairwise_theta(family: &ScrambledFamily, j: usize, k: usize) -> Result<RealWithError> {
    let n = family.len();
    if j >= n || k >= n {
        return Err(Error::rejected(Module::Scrambled, "index", "pair index out of range"));
    }
    if j == k {
        return Err(Error::rejected(
            Module::Scrambled,
            "index",
            "pair needs two distinct points",
        ));
    }
    match &family.provenance {
        Provenance::CertifiedLattice { base, offsets, .. } => base.real().scale(offsets[j] - offsets[k]),
        Provenance::Random { .. } => {
            let (a, b) = (family.phi_values[j], family.phi_values[k]);
            // The difference of two doubles is exact in double-double.
            let value = DoubleDouble::sum_exact(a, -b);
            RealWithError::new(value, f64::EPSILON * (a.abs() + b.abs()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::{continued_fraction, ClosedForm};

    #[test]
    fn certified_two_points() {
        let fam = certified_family(2, NamedIrrational::Sqrt2, 0.0).unwrap();
        assert_eq!(fam.points()[0], 0.5);
        // 1/(1+e^{-√2}) = 0.80442968250695690519…
        assert!((fam.points()[1] - 0.804_429_682_506_956_9).abs() < 1e-15);
    }

    #[test]
    fn certified_thetas_are_lattice_multiples() {
        let fam = certified_family(3, NamedIrrational::Sqrt2, 0.0).unwrap();
        let t01 = pairwise_theta(&fam, 1, 0).unwrap();
        let t12 = pairwise_theta(&fam, 2, 1).unwrap();
        let t02 = pairwise_theta(&fam, 2, 0).unwrap();
        assert!((t01.value() - DoubleDouble::SQRT2).abs().to_f64() < 1e-31);
        assert!(t01.abs_error() <= 1e-30);
        assert!((t12.value() - DoubleDouble::SQRT2).abs().to_f64() < 1e-31);
        assert_eq!(t02.closed_form(), Some(ClosedForm::QuadraticSurd { p: 0, d: 8, q: 1 }));
        let anti = pairwise_theta(&fam, 0, 2).unwrap();
        assert_eq!(anti.value(), -t02.value());
        assert!(pairwise_theta(&fam, 1, 1).is_err());
    }

    #[test]
    fn certified_centered_near_one() {
        let fam = certified_family(2, NamedIrrational::Sqrt2, 10.0).unwrap();
        // 0.99995460213129756…, 0.99998896263915728…
        assert!((fam.points()[0] - 0.999_954_602_131_297_6).abs() < 1e-15);
        assert!((fam.points()[1] - 0.999_988_962_639_157_3).abs() < 1e-15);
        assert!(fam.points().iter().all(|&p| (1.0 - p) < 1e-4));
        assert!(fam.points()[0] < fam.points()[1]);
    }

    #[test]
    fn lattice_points_increase_with_offsets() {
        let fam = certified_family(6, NamedIrrational::Golden, -2.0).unwrap();
        assert!(fam.points().windows(2).all(|w| w[0] < w[1]));
        assert!(certified_family(1, NamedIrrational::Sqrt2, 0.0).is_err());
        assert!(certified_family_with_offsets(&[0, 3, 3], NamedIrrational::Sqrt2, 0.0).is_err());
    }

    #[test]
    fn random_family_is_seeded() {
        let a = random_family(5, 42).unwrap();
        let b = random_family(5, 42).unwrap();
        let c = random_family(5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.phi_values(), c.phi_values());
        assert!(a.points().iter().all(|&p| p > 0.0 && p < 1.0));
        let t = pairwise_theta(&a, 0, 1).unwrap();
        let (x, y) = (a.phi_values()[0], a.phi_values()[1]);
        assert_eq!(t.abs_error(), f64::EPSILON * (x.abs() + y.abs()));
        // Machine-precision θ still has a long certified expansion.
        let cf = continued_fraction(&t, 60).unwrap();
        assert!(cf.certified_depth >= 8 && !cf.terminated);
    }
}
