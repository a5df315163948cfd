use num_bigint::BigUint;
use num_traits::float::FloatCore;

use crate::dd::DoubleDouble;
use crate::error::{Error, Module, Result};

/// Constants of one block `H_i` of the direct sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockParameters {
    /// Block index `i ≥ 1`.
    pub index: usize,
    /// `ε_i = 4^{−i} ε`.
    pub eps: f64,
    /// Minimal `L_i` with `(1 + ε_i)^{L_i} ≥ √2·C_i`.
    pub growth_length: u64,
    /// `m_i = i·L_i + 1`, the least integer with `L_i/m_i < 1/i`.
    pub half_dim: u64,
    /// `n_i = 2·m_i`, the dimension of the block.
    pub dim: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSchedule {
    eps: f64,
    c: Vec<f64>,
    blocks: Vec<BlockParameters>,
}

impl ParameterSchedule {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn blocks(&self) -> &[BlockParameters] {
        &self.blocks
    }

    /// Parameters of block `i` (1-based).
    pub fn block(&self, i: usize) -> Option<&BlockParameters> {
        i.checked_sub(1).and_then(|j| self.blocks.get(j))
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Total dimension of the first `k` blocks.
    pub fn total_dim(&self, k: usize) -> u64 {
        self.blocks.iter().take(k).map(|b| b.dim).sum()
    }
}

/// Builds the first `k` blocks of the schedule for `ε` and the growth targets `C`.
pub fn build_schedule(eps: f64, c: &[f64], k: usize) -> Result<ParameterSchedule> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::rejected(
            Module::Operator,
            "eps",
            format!("must lie in (0, 1), got {eps}"),
        ));
    }
    if k == 0 {
        return Err(Error::rejected(Module::Operator, "blocks", "need at least one block"));
    }
    if c.len() < k {
        return Err(Error::rejected(
            Module::Operator,
            "c",
            format!("{k} blocks requested but only {} growth targets given", c.len()),
        ));
    }
    if c.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::rejected(
            Module::Operator,
            "c",
            "growth targets must be positive",
        ));
    }
    if c.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::rejected(
            Module::Operator,
            "c",
            "growth targets must be strictly increasing",
        ));
    }
    let mut blocks = Vec::with_capacity(k);
    for i in 1..=k {
        // Scaling by a power of 4 is exact unless it underflows.
        let eps_i = eps * 0.25f64.powi(i as i32);
        if eps_i == 0.0 || !eps_i.is_normal() {
            return Err(Error::rejected(Module::Operator, "blocks", format!("ε_{i} underflows")));
        }
        let growth_length = minimal_growth_length(eps_i, c[i - 1])?;
        let overflow = || Error::Overflow {
            module: Module::Operator,
            parameter: "schedule",
            depth: i,
        };
        let half_dim = (i as u64)
            .checked_mul(growth_length)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(overflow)?;
        let dim = half_dim.checked_mul(2).ok_or_else(overflow)?;
        blocks.push(BlockParameters {
            index: i,
            eps: eps_i,
            growth_length,
            half_dim,
            dim,
        });
    }
    Ok(ParameterSchedule {
        eps,
        c: c[..k].to_vec(),
        blocks,
    })
}

/// Margin inside which the double-double comparison defers to exact arithmetic.
const AMBIGUITY: f64 = 1e-26;

/// Least `L ≥ 1` with `(1 + eps)^L ≥ √2·c`.
fn minimal_growth_length(eps: f64, c: f64) -> Result<u64> {
    let target = DoubleDouble::LN2.mul_f64(0.5) + DoubleDouble::from(c).ln();
    let rate = DoubleDouble::sum_exact(1.0, eps).ln();
    let estimate = (target.to_f64() / rate.to_f64()).ceil().max(1.0);
    if !(estimate < 1e15) {
        return Err(Error::rejected(Module::Operator, "eps", "growth length exceeds 10^15"));
    }
    let reaches = |l: u64| -> bool {
        let gap = rate * DoubleDouble::from(l as f64) - target;
        if gap.abs().to_f64() <= AMBIGUITY * target.abs().to_f64().max(1.0) {
            exact_growth_reaches(eps, c, l)
        } else {
            !gap.is_negative()
        }
    };
    let mut l = estimate as u64;
    while l > 1 && reaches(l - 1) {
        l -= 1;
    }
    while !reaches(l) {
        l += 1;
    }
    Ok(l)
}

fn dyadic(x: f64) -> (BigUint, i64) {
    let (mantissa, exponent, _) = FloatCore::integer_decode(x);
    (BigUint::from(mantissa), exponent as i64)
}

/// Exact rational test of `(1 + eps)^l ≥ √2·c`, i.e. `(1 + eps)^{2l} ≥ 2c²`,
/// treating both doubles as the dyadic rationals they are.
pub fn exact_growth_reaches(eps: f64, c: f64, l: u64) -> bool {
    let (a, ea) = dyadic(eps);
    let (b, eb) = dyadic(c);
    // eps = a·2^ea with ea < 0: 1 + eps = (2^{-ea} + a)/2^{-ea}.
    let s = (-ea) as u64;
    let base = (BigUint::from(1u8) << s) + a;
    let lhs_num = base.pow((2 * l) as u32);
    // Compare lhs_num / 2^{2ls} ≥ 2·b²·2^{2eb}.
    let rhs = BigUint::from(2u8) * &b * &b;
    let shift = 2 * l as i64 * s as i64 + 2 * eb;
    if shift >= 0 {
        lhs_num >= rhs << (shift as u64)
    } else {
        (lhs_num << ((-shift) as u64)) >= rhs
    }
}
