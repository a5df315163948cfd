use rayon::prelude::*;

use super::schedule::BlockParameters;
use crate::error::{Error, Module, Result};

/// Largest `|n|` for step-by-step powers.
pub const MAX_POWER: i64 = 10_000_000;

/// Largest forward power; beyond [`MAX_POWER`] only the binomial kernel is used,
/// whose cost does not depend on `n`.
pub const MAX_KERNEL_POWER: i64 = 1 << 40;

/// Coordinates are rescaled by a power of two once they leave `[2^-512, 2^512]`.
const RESCALE_EXP: i32 = 512;

/// Kernel weights below `e^{-80}` of the largest one are dropped.
const KERNEL_LOG_CUTOFF: f64 = 80.0;

/// Closed-form inverse terms are dropped once `|r|^k` falls below this.
const INVERSE_TAIL: f64 = 1e-22;

/// Upper-bidiagonal block with `1 − ε` on the diagonal and `2ε` above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockMatrix {
    index: usize,
    eps: f64,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMethod {
    /// Solve `T x = v` from the bottom row up.
    #[default]
    BackSubstitution,
    /// Accumulate the explicit upper-triangular entries of `T^{-1}`.
    ClosedForm,
}

/// A vector represented as `e^{log_scale} · coords`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledVector {
    pub coords: Vec<f64>,
    pub log_scale: f64,
}

impl ScaledVector {
    pub fn new(coords: Vec<f64>) -> Self {
        let mut v = Self { coords, log_scale: 0.0 };
        v.rescale();
        v
    }

    pub fn basis(dim: usize, j: usize) -> Self {
        let mut coords = vec![0.0; dim];
        coords[j] = 1.0;
        Self::new(coords)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0.0)
    }

    /// `ln‖v‖`, `-inf` for the zero vector.
    pub fn log_norm(&self) -> f64 {
        self.log_norm_within(self.coords.len())
    }

    /// `ln‖v‖` when every coordinate from `len` on is zero.
    fn log_norm_within(&self, len: usize) -> f64 {
        let head = &self.coords[..len];
        let m = head.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        let inv = 1.0 / m;
        let s: f64 = head.iter().map(|&x| (x * inv) * (x * inv)).sum();
        self.log_scale + m.ln() + 0.5 * s.ln()
    }

    /// One past the last nonzero coordinate. Both `T` and `T^{-1}` are upper
    /// triangular, so powers never extend it.
    fn support(&self) -> usize {
        self.coords.iter().rposition(|&x| x != 0.0).map_or(0, |i| i + 1)
    }

    pub fn norm(&self) -> f64 {
        self.log_norm().exp()
    }

    /// Plain coordinates; entries overflow to ±inf past `f64` range.
    pub fn to_dense(&self) -> Vec<f64> {
        let f = self.log_scale.exp();
        if f.is_finite() {
            self.coords.iter().map(|&x| x * f).collect()
        } else {
            let half = (0.5 * self.log_scale).exp();
            self.coords.iter().map(|&x| x * half * half).collect()
        }
    }

    /// Brings the largest coordinate back into `[2^-512, 2^512]` by an exact
    /// power-of-two rescale.
    fn rescale(&mut self) {
        self.rescale_within(self.coords.len());
    }

    fn rescale_within(&mut self, len: usize) {
        let m = self.coords[..len].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if m == 0.0 || !m.is_finite() {
            return;
        }
        let e = m.log2().floor() as i32;
        if e.abs() < RESCALE_EXP {
            return;
        }
        let factor = 2f64.powi(-e);
        for x in &mut self.coords[..len] {
            *x *= factor;
        }
        self.log_scale += e as f64 * std::f64::consts::LN_2;
    }

    /// `self − other` expressed on the larger of the two scales.
    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return Self {
                coords: other.coords.iter().map(|&x| -x).collect(),
                log_scale: other.log_scale,
            };
        }
        let s = self.log_scale.max(other.log_scale);
        let (fa, fb) = ((self.log_scale - s).exp(), (other.log_scale - s).exp());
        let mut out = Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a * fa - b * fb)
                .collect(),
            log_scale: s,
        };
        out.rescale();
        out
    }

    /// `α·self + β·other` on the larger of the two scales.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let s = self.log_scale.max(other.log_scale);
        let (fa, fb) = ((self.log_scale - s).exp() * alpha, (other.log_scale - s).exp() * beta);
        let mut out = Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a * fa + b * fb)
                .collect(),
            log_scale: s,
        };
        out.rescale();
        out
    }
}

impl BlockMatrix {
    pub fn new(index: usize, eps: f64, dim: usize) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::rejected(
                Module::Operator,
                "eps",
                format!("must lie in (0, 1), got {eps}"),
            ));
        }
        if dim == 0 {
            return Err(Error::rejected(
                Module::Operator,
                "dim",
                "block dimension must be positive",
            ));
        }
        Ok(Self { index, eps, dim })
    }

    pub fn from_parameters(p: &BlockParameters) -> Self {
        Self {
            index: p.index,
            eps: p.eps,
            dim: p.dim as usize,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diagonal(&self) -> f64 {
        1.0 - self.eps
    }

    pub fn superdiagonal(&self) -> f64 {
        2.0 * self.eps
    }

    /// Entry `(j, k)` of `T^{-1}`: `(1/(1−ε))·(−2ε/(1−ε))^{k−j}` for `k ≥ j`.
    pub fn inverse_entry(&self, j: usize, k: usize) -> f64 {
        if k < j {
            return 0.0;
        }
        let d = self.diagonal();
        (-self.superdiagonal() / d).powi((k - j) as i32) / d
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                module: Module::Operator,
                expected: self.dim,
                found: len,
            })
        }
    }

    fn forward_in_place(&self, v: &mut [f64]) {
        if v.is_empty() {
            return;
        }
        let (d, s) = (self.diagonal(), self.superdiagonal());
        let last = v.len() - 1;
        for j in 0..last {
            v[j] = d * v[j] + s * v[j + 1];
        }
        v[last] *= d;
    }

    /// Multiplies by reciprocals: a division in the recurrence chain costs
    /// several times its latency on large blocks.
    fn back_substitute_in_place(&self, v: &mut [f64]) {
        if v.is_empty() {
            return;
        }
        let inv = 1.0 / self.diagonal();
        let q = self.superdiagonal() * inv;
        let last = v.len() - 1;
        v[last] *= inv;
        for j in (0..last).rev() {
            v[j] = v[j] * inv - q * v[j + 1];
        }
    }

    fn closed_form_inverse(&self, v: &[f64]) -> Vec<f64> {
        let d = self.diagonal();
        let r = -self.superdiagonal() / d;
        let dim = v.len();
        // Terms past |r|^span are below INVERSE_TAIL when |r| < 1.
        let span = if r.abs() < 1.0 {
            ((INVERSE_TAIL.ln() / r.abs().ln()).ceil() as usize).min(dim)
        } else {
            dim
        };
        (0..dim)
            .map(|j| {
                let mut acc = 0.0;
                let mut p = 1.0 / d;
                for &x in &v[j..dim.min(j + span + 1)] {
                    acc += p * x;
                    p *= r;
                }
                acc
            })
            .collect()
    }
}

/// One application of `T` or `T^{-1}`.
pub fn block_apply(b: &BlockMatrix, v: &[f64], direction: Direction) -> Result<Vec<f64>> {
    b.check_len(v.len())?;
    let mut out = v.to_vec();
    match direction {
        Direction::Forward => b.forward_in_place(&mut out),
        Direction::Inverse => b.back_substitute_in_place(&mut out),
    }
    Ok(out)
}

/// `T^{-1} v` by either route.
pub fn block_inverse_apply(b: &BlockMatrix, v: &[f64], method: InverseMethod) -> Result<Vec<f64>> {
    b.check_len(v.len())?;
    Ok(match method {
        InverseMethod::BackSubstitution => {
            let mut out = v.to_vec();
            b.back_substitute_in_place(&mut out);
            out
        }
        InverseMethod::ClosedForm => b.closed_form_inverse(v),
    })
}

/// Evaluation route for a forward power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerMethod {
    /// Kernel when its band is narrower than `n`, stepping otherwise.
    #[default]
    Auto,
    Stepping,
    /// `T^n = (1−ε)^n Σ_k C(n,k) c^k N^k` with `c = 2ε/(1−ε)` and `N` the shift.
    BinomialKernel,
}

/// `T^n v` for signed `n` with log-scale tracking.
pub fn block_power_apply(b: &BlockMatrix, v: &ScaledVector, n: i64) -> Result<ScaledVector> {
    block_power_apply_with(b, v, n, PowerMethod::Auto)
}

pub fn block_power_apply_with(b: &BlockMatrix, v: &ScaledVector, n: i64, method: PowerMethod) -> Result<ScaledVector> {
    b.check_len(v.len())?;
    let stepping_only = n < 0 || method == PowerMethod::Stepping;
    if n.abs() > MAX_KERNEL_POWER || (stepping_only && n.abs() > MAX_POWER) {
        return Err(Error::range(
            Module::Operator,
            n,
            format!("|n| beyond {MAX_POWER} exceeds the scale-tracking budget"),
        ));
    }
    if n == 0 || v.is_zero() {
        return Ok(v.clone());
    }
    if n < 0 {
        let mut out = v.clone();
        let len = out.support();
        for _ in 0..(-n) {
            b.back_substitute_in_place(&mut out.coords[..len]);
            out.rescale_within(len);
        }
        return Ok(out);
    }
    let kernel = ForwardKernel::new(b, n as u64);
    let use_kernel = match method {
        PowerMethod::Stepping => false,
        PowerMethod::BinomialKernel => true,
        PowerMethod::Auto => n > MAX_POWER || (kernel.weights.len() as u64) < n as u64,
    };
    if use_kernel {
        Ok(kernel.apply(v))
    } else {
        let mut out = v.clone();
        let len = out.support();
        for _ in 0..n {
            b.forward_in_place(&mut out.coords[..len]);
            out.rescale_within(len);
        }
        Ok(out)
    }
}

/// Band of significant binomial weights of `T^n`, normalized so the largest is 1.
struct ForwardKernel {
    first: usize,
    weights: Vec<f64>,
    log_peak: f64,
}

impl ForwardKernel {
    fn new(b: &BlockMatrix, n: u64) -> Self {
        let d = b.diagonal();
        let log_ratio = (b.superdiagonal() / d).ln();
        let kmax = (n.min(b.dim as u64 - 1)) as usize;
        // ln C(n,k) accumulated with compensation; each term is one log.
        let mut logs = Vec::with_capacity(kmax + 1);
        let (mut acc, mut comp) = (0.0f64, 0.0f64);
        for k in 0..=kmax {
            if k > 0 {
                let term = ((n - k as u64 + 1) as f64).ln() - (k as f64).ln() + log_ratio - comp;
                let t = acc + term;
                comp = (t - acc) - term;
                acc = t;
            }
            logs.push(acc);
        }
        let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let first = logs.iter().position(|&l| l >= peak - KERNEL_LOG_CUTOFF).unwrap_or(0);
        let last = logs.iter().rposition(|&l| l >= peak - KERNEL_LOG_CUTOFF).unwrap_or(0);
        let weights = logs[first..=last].iter().map(|&l| (l - peak).exp()).collect();
        Self {
            first,
            weights,
            log_peak: peak + n as f64 * d.ln(),
        }
    }

    fn apply(&self, v: &ScaledVector) -> ScaledVector {
        let dim = v.len();
        let src = &v.coords;
        let mut out = vec![0.0; dim];
        out.par_chunks_mut(1024).enumerate().for_each(|(chunk, rows)| {
            for (r, y) in rows.iter_mut().enumerate() {
                let j = chunk * 1024 + r;
                let start = j + self.first;
                if start >= dim {
                    continue;
                }
                let span = (dim - start).min(self.weights.len());
                *y = self.weights[..span]
                    .iter()
                    .zip(&src[start..start + span])
                    .map(|(w, x)| w * x)
                    .sum();
            }
        });
        let mut result = ScaledVector {
            coords: out,
            log_scale: v.log_scale + self.log_peak,
        };
        result.rescale();
        result
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    FirstBasis,
    LastBasis,
    /// `(1, …, 1)/√dim`.
    Uniform,
}

impl Probe {
    pub fn vector(self, dim: usize) -> ScaledVector {
        match self {
            Probe::FirstBasis => ScaledVector::basis(dim, 0),
            Probe::LastBasis => ScaledVector::basis(dim, dim - 1),
            Probe::Uniform => ScaledVector::new(vec![1.0 / (dim as f64).sqrt(); dim]),
        }
    }
}

/// `ln‖T^n u‖` for `n = 0..=n_max` with its maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthProfile {
    pub log_norms: Vec<f64>,
    pub argmax: usize,
    pub max_log_norm: f64,
}

impl GrowthProfile {
    /// Plain norms; entries past `f64` range are `inf`.
    pub fn norms(&self) -> Vec<f64> {
        self.log_norms.iter().map(|l| l.exp()).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.max_log_norm.exp()
    }
}

pub fn transient_growth_profile(b: &BlockMatrix, probe: Probe, n_max: usize) -> GrowthProfile {
    let mut v = probe.vector(b.dim);
    let len = v.support();
    let mut log_norms = Vec::with_capacity(n_max + 1);
    log_norms.push(v.log_norm());
    for _ in 0..n_max {
        b.forward_in_place(&mut v.coords[..len]);
        v.rescale_within(len);
        log_norms.push(v.log_norm_within(len));
    }
    let (argmax, max_log_norm) =
        log_norms.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |(ai, am), (i, &l)| if l > am { (i, l) } else { (ai, am) },
        );
    GrowthProfile {
        log_norms,
        argmax,
        max_log_norm,
    }
}

/// Smallest `n ≥ 1` at which `‖T^{-n} u‖ ≥ threshold·‖u‖`, stepping up to `n_max`.
pub fn inverse_growth_crossing(b: &BlockMatrix, u: &ScaledVector, threshold: f64, n_max: u64) -> Option<u64> {
    let target = u.log_norm() + threshold.ln();
    let mut v = u.clone();
    let len = v.support();
    for n in 1..=n_max {
        b.back_substitute_in_place(&mut v.coords[..len]);
        v.rescale_within(len);
        if v.log_norm_within(len) >= target {
            return Some(n);
        }
    }
    None
}

/// First power of two `n ≤ n_cap` with `‖T^n u‖ ≤ tol·‖u‖`, with the ratio reached.
pub fn forward_decay_by_doubling(
    b: &BlockMatrix,
    u: &ScaledVector,
    tol: f64,
    n_cap: i64,
) -> Result<Option<(i64, f64)>> {
    let base = u.log_norm();
    let mut n = 1i64;
    while n <= n_cap {
        let v = block_power_apply(b, u, n)?;
        let ratio = (v.log_norm() - base).exp();
        if ratio <= tol {
            return Ok(Some((n, ratio)));
        }
        n *= 2;
    }
    Ok(None)
}
