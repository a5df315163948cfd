use rand::Rng;
use rayon::prelude::*;

use super::block::{block_power_apply, BlockMatrix, ScaledVector};
use super::schedule::ParameterSchedule;
use crate::error::{Error, Module, Result};

/// A vector in the first `K` blocks of the direct sum, each block carrying its own scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedVector {
    blocks: Vec<ScaledVector>,
}

fn check_prefix(schedule: &ParameterSchedule, k: usize) -> Result<()> {
    if k == 0 || k > schedule.len() {
        return Err(Error::rejected(
            Module::Operator,
            "blocks",
            format!("block count {k} outside 1..={}", schedule.len()),
        ));
    }
    Ok(())
}

impl TruncatedVector {
    pub fn zeros(schedule: &ParameterSchedule, k: usize) -> Result<Self> {
        check_prefix(schedule, k)?;
        Ok(Self {
            blocks: schedule.blocks()[..k]
                .iter()
                .map(|b| ScaledVector::new(vec![0.0; b.dim as usize]))
                .collect(),
        })
    }

    /// Builds from plain coordinates, checking the lengths against the schedule.
    pub fn from_blocks(schedule: &ParameterSchedule, blocks: Vec<Vec<f64>>) -> Result<Self> {
        check_prefix(schedule, blocks.len())?;
        for (b, v) in schedule.blocks().iter().zip(&blocks) {
            if v.len() as u64 != b.dim {
                return Err(Error::DimensionMismatch {
                    module: Module::Operator,
                    expected: b.dim as usize,
                    found: v.len(),
                });
            }
        }
        Ok(Self {
            blocks: blocks.into_iter().map(ScaledVector::new).collect(),
        })
    }

    /// Supported on block `i` (1-based) only.
    pub fn single_block(schedule: &ParameterSchedule, k: usize, i: usize, coords: Vec<f64>) -> Result<Self> {
        let mut x = Self::zeros(schedule, k)?;
        if i == 0 || i > k {
            return Err(Error::rejected(
                Module::Operator,
                "block",
                format!("{i} outside 1..={k}"),
            ));
        }
        if coords.len() != x.blocks[i - 1].len() {
            return Err(Error::DimensionMismatch {
                module: Module::Operator,
                expected: x.blocks[i - 1].len(),
                found: coords.len(),
            });
        }
        x.blocks[i - 1] = ScaledVector::new(coords);
        Ok(x)
    }

    /// Independent uniform coordinates in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(schedule: &ParameterSchedule, k: usize, rng: &mut R) -> Result<Self> {
        check_prefix(schedule, k)?;
        Ok(Self {
            blocks: schedule.blocks()[..k]
                .iter()
                .map(|b| ScaledVector::new((0..b.dim).map(|_| rng.random_range(-1.0..=1.0)).collect()))
                .collect(),
        })
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[ScaledVector] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> Option<&ScaledVector> {
        i.checked_sub(1).and_then(|j| self.blocks.get(j))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(ScaledVector::is_zero)
    }

    /// `ln‖x‖` over the orthogonal sum, `-inf` for zero.
    pub fn log_norm(&self) -> f64 {
        log_hypot(self.blocks.iter().map(ScaledVector::log_norm))
    }

    pub fn norm(&self) -> f64 {
        self.log_norm().exp()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::DimensionMismatch {
                module: Module::Operator,
                expected: self.blocks.len(),
                found: other.blocks.len(),
            });
        }
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    module: Module::Operator,
                    expected: a.len(),
                    found: b.len(),
                });
            }
        }
        Ok(())
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.difference(b))
                .collect(),
        })
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.combine(alpha, b, beta))
                .collect(),
        })
    }

    /// `ln‖self − other‖`.
    pub fn log_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.difference(other)?.log_norm())
    }
}

/// `ln √(Σ e^{2 l_i})` without overflow.
fn log_hypot(logs: impl Iterator<Item = f64>) -> f64 {
    let logs: Vec<f64> = logs.collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = logs.iter().map(|&l| (2.0 * (l - m)).exp()).sum();
    m + 0.5 * s.ln()
}

/// `T^n x` blockwise, blocks in parallel.
pub fn truncated_apply(schedule: &ParameterSchedule, k: usize, x: &TruncatedVector, n: i64) -> Result<TruncatedVector> {
    check_prefix(schedule, k)?;
    if x.blocks.len() != k {
        return Err(Error::DimensionMismatch {
            module: Module::Operator,
            expected: k,
            found: x.blocks.len(),
        });
    }
    let blocks = schedule.blocks()[..k]
        .par_iter()
        .zip(x.blocks.par_iter())
        .map(|(p, v)| block_power_apply(&BlockMatrix::from_parameters(p), v, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedVector { blocks })
}

/// Lower bound `ln‖T^{-n} u‖ ≥ max_i (c_i + n·r_i)` for `n ≥ 0`.
///
/// `T_i^{-n}` is upper triangular with diagonal `(1−ε_i)^{-n}`, so the last
/// nonzero coordinate of `u_i` is only scaled: `r_i = −ln(1−ε_i) > 0` and
/// `c_i = ln|u_i[last]|`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseGrowthBound {
    pub terms: Vec<(f64, f64)>,
}

impl InverseGrowthBound {
    pub fn for_vector(schedule: &ParameterSchedule, u: &TruncatedVector) -> Option<Self> {
        let terms: Vec<(f64, f64)> = schedule
            .blocks()
            .iter()
            .zip(&u.blocks)
            .filter_map(|(p, v)| {
                let last = v.coords.iter().rposition(|&x| x != 0.0)?;
                Some((v.log_scale + v.coords[last].abs().ln(), -(1.0 - p.eps).ln()))
            })
            .collect();
        if terms.is_empty() {
            None
        } else {
            Some(Self { terms })
        }
    }

    pub fn log_at(&self, n: u64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, r)| c + n as f64 * r)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rate(&self) -> f64 {
        self.terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::build_schedule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> ParameterSchedule {
        build_schedule(0.1, &[2.0, 4.0], 2).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let s = small();
        let z = TruncatedVector::zeros(&s, 2).unwrap();
        for n in [-50, 0, 50] {
            assert!(truncated_apply(&s, 2, &z, n).unwrap().is_zero());
        }
    }

    #[test]
    fn single_block_matches_block_power() {
        let s = small();
        let coords: Vec<f64> = (0..88).map(|j| (j as f64).sin()).collect();
        let x = TruncatedVector::single_block(&s, 2, 1, coords.clone()).unwrap();
        let y = truncated_apply(&s, 2, &x, -30).unwrap();
        let b = BlockMatrix::from_parameters(s.block(1).unwrap());
        let direct = block_power_apply(&b, &ScaledVector::new(coords), -30).unwrap();
        assert_eq!(y.block(1).unwrap(), &direct);
        assert!(y.block(2).unwrap().is_zero());
    }

    #[test]
    fn shape_mismatch() {
        let s = small();
        assert!(TruncatedVector::from_blocks(&s, vec![vec![0.0; 3]]).is_err());
        let x = TruncatedVector::zeros(&s, 1).unwrap();
        assert!(truncated_apply(&s, 2, &x, 1).is_err());
    }

    #[test]
    fn inverse_bound_holds() {
        let s = small();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = TruncatedVector::random(&s, 2, &mut rng).unwrap();
        let bound = InverseGrowthBound::for_vector(&s, &x).unwrap();
        for n in [1u64, 10, 100, 500] {
            let y = truncated_apply(&s, 2, &x, -(n as i64)).unwrap();
            assert!(y.log_norm() >= bound.log_at(n) - 1e-9);
        }
        assert!(InverseGrowthBound::for_vector(&s, &TruncatedVector::zeros(&s, 2).unwrap()).is_none());
    }
}
