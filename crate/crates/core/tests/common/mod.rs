//! Property checks shared by the proptest suite and the acceptance runner.
#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use liyorke_core::diophantine::{continued_fraction, convergents, frac_mul, RealWithError};
use liyorke_core::dynamics::{distribution_function, iterate, DistanceSeries, State, SystemHandle};
use liyorke_core::operator::{
    build_schedule, exact_growth_reaches, truncated_apply, ParameterSchedule, TruncatedVector,
};
use liyorke_core::plane::{euclidean_distance, turn_distance, wrap_turns, PlanePoint, Space};
use liyorke_core::Error;

pub type CaseResult = Result<(), TestCaseError>;

/// Two-block schedule small enough for hundreds of cases.
pub fn small_schedule() -> Arc<ParameterSchedule> {
    Arc::new(build_schedule(0.1, &[2.0, 4.0], 2).expect("valid schedule"))
}

pub fn disk_point() -> impl Strategy<Value = PlanePoint> {
    (0.0f64..0.999, 0.0f64..1.0).prop_map(|(r, a)| PlanePoint::disk(r, a).unwrap())
}

pub fn plane_point() -> impl Strategy<Value = PlanePoint> {
    (0.0f64..20.0, 0.0f64..1.0).prop_map(|(r, a)| PlanePoint::plane(r, a).unwrap())
}

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, dim)
}

pub fn truncated_vector(schedule: Arc<ParameterSchedule>) -> impl Strategy<Value = TruncatedVector> {
    let dims: Vec<usize> = schedule.blocks().iter().map(|b| b.dim as usize).collect();
    (coords(dims[0]), coords(dims[1]))
        .prop_map(move |(a, b)| TruncatedVector::from_blocks(&schedule, vec![a, b]).unwrap())
}

/// A handle with a valid state for it.
pub fn system_and_state() -> impl Strategy<Value = (SystemHandle, State)> {
    let schedule = small_schedule();
    let op = SystemHandle::operator(schedule.clone(), 2).unwrap();
    prop_oneof![
        disk_point().prop_map(|p| (SystemHandle::DiskF, State::Plane(p))),
        disk_point().prop_map(|p| (SystemHandle::DiskFInverse, State::Plane(p))),
        plane_point().prop_map(|p| (SystemHandle::PlaneG, State::Plane(p))),
        plane_point().prop_map(|p| (SystemHandle::PlaneGInverse, State::Plane(p))),
        truncated_vector(schedule.clone()).prop_map(move |v| (op.clone(), State::Operator(v))),
        truncated_vector(schedule.clone()).prop_map({
            let inv = SystemHandle::operator(schedule, 2).unwrap().inverse();
            move |v| (inv.clone(), State::Operator(v))
        }),
    ]
}

/// Disk points: Cartesian distance. Plane points: polar state, since `g`
/// carries moduli out to e^100 where only the log-modulus is meaningful.
/// Operator: relative distance.
fn discrepancy(a: &State, b: &State) -> f64 {
    match (a, b) {
        (State::Plane(p), State::Plane(q)) if p.space() == Space::Disk => {
            euclidean_distance(p, q).unwrap_or(f64::INFINITY)
        }
        (State::Plane(p), State::Plane(q)) => match (p.is_origin(), q.is_origin()) {
            (true, true) => 0.0,
            (false, false) => (p.log_modulus() - q.log_modulus())
                .abs()
                .max(turn_distance(p.angle_turns(), q.angle_turns())),
            _ => f64::INFINITY,
        },
        (State::Operator(u), State::Operator(v)) => {
            let diff = u.log_distance(v).unwrap();
            if diff == f64::NEG_INFINITY {
                return 0.0;
            }
            (diff - u.log_norm().max(v.log_norm())).exp()
        }
        _ => f64::INFINITY,
    }
}

pub fn group_law(system: &SystemHandle, x: &State, m: i64, n: i64) -> CaseResult {
    let direct = iterate(system, x, m + n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let composed =
        iterate(system, &iterate(system, x, n).unwrap(), m).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let d = discrepancy(&direct, &composed);
    prop_assert!(d <= 1e-9, "{} m={m} n={n}: discrepancy {d:e}", system.name());
    Ok(())
}

pub fn inversion(system: &SystemHandle, x: &State, n: i64) -> CaseResult {
    let there = iterate(system, x, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let back = iterate(&system.inverse(), &there, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let d = discrepancy(x, &back);
    prop_assert!(d <= 1e-9, "{} n={n}: round trip off by {d:e}", system.name());
    Ok(())
}

/// `ρ(m + n) ≡ ρ(m) + ρ(n)` for the angle increments of `f`, and the same
/// for `frac(kθ)` of the exact engine.
pub fn rotation_additivity(z: &PlanePoint, theta_num: i64, theta_den: i64, m: i64, n: i64) -> CaseResult {
    let angle = |k: i64| {
        let State::Plane(p) = iterate(&SystemHandle::DiskF, &State::Plane(*z), k).unwrap() else {
            unreachable!()
        };
        p.angle_turns()
    };
    let rho = |k: i64| wrap_turns(angle(k) - z.angle_turns());
    let gap = turn_distance(rho(m + n), wrap_turns(rho(m) + rho(n)));
    prop_assert!(gap <= 1e-9, "disk rotation m={m} n={n}: {gap:e}");

    let theta = RealWithError::quadratic_surd(theta_num, 2, theta_den).unwrap();
    let f = |k: i64| frac_mul(k, &theta).unwrap().to_f64();
    let gap = turn_distance(f(m + n), wrap_turns(f(m) + f(n)));
    prop_assert!(gap <= 1e-12, "frac(kθ) m={m} n={n}: {gap:e}");
    Ok(())
}

pub fn distribution_bounds(values: &[f64], grid: &[f64]) -> CaseResult {
    let n = values.len() as u64;
    let series = DistanceSeries::new((0..n).collect(), values.to_vec(), n.max(1)).unwrap();
    let est = distribution_function(&series, grid).unwrap();
    for j in 0..grid.len() {
        let (lo, hi) = (est.lower_values[j], est.upper_values[j]);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= hi);
        if j > 0 {
            prop_assert!(est.lower_values[j - 1] <= lo);
            prop_assert!(est.upper_values[j - 1] <= hi);
        }
    }
    Ok(())
}

/// `p_k q_{k−1} − p_{k−1} q_k = (−1)^{k−1}`.
pub fn cf_determinant(theta: &RealWithError) -> CaseResult {
    let cf = match continued_fraction(theta, 40) {
        Ok(cf) => cf,
        // Error bar too wide to fix even one quotient: nothing to check.
        Err(e @ Error::PrecisionExhausted { .. }) => return Err(TestCaseError::reject(e.to_string())),
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    // Denominators are capped below 2^100; retry just short of the cap.
    let convs = match convergents(&cf) {
        Ok(c) => c,
        Err(Error::Overflow { depth, .. }) => convergents(&continued_fraction(theta, depth - 1).unwrap()).unwrap(),
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    for k in 1..convs.len() {
        // Products overflow i128 for deep convergents; the result is ±1, so
        // arithmetic mod 2^128 still determines it exactly.
        let det = convs[k]
            .p
            .wrapping_mul(convs[k - 1].q)
            .wrapping_sub(convs[k - 1].p.wrapping_mul(convs[k].q));
        let expect = if k % 2 == 1 { 1 } else { -1 };
        prop_assert_eq!(det, expect, "k = {}", k);
    }
    Ok(())
}

pub fn schedule_invariants(eps: f64, c: &[f64]) -> CaseResult {
    let s = build_schedule(eps, c, c.len()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for (b, &ci) in s.blocks().iter().zip(c) {
        let i = b.index as i32;
        prop_assert_eq!(b.eps, eps / 4f64.powi(i));
        prop_assert_eq!(b.half_dim, b.index as u64 * b.growth_length + 1);
        prop_assert!((b.index as u64) * b.growth_length < b.half_dim);
        prop_assert_eq!(b.dim, 2 * b.half_dim);
        let target = (2f64.sqrt() * ci).ln();
        let rate = b.eps.ln_1p();
        if b.growth_length <= 2000 {
            prop_assert!(exact_growth_reaches(b.eps, ci, b.growth_length));
            prop_assert!(b.growth_length == 1 || !exact_growth_reaches(b.eps, ci, b.growth_length - 1));
        } else {
            let slack = 1e-12 * target.abs().max(1.0);
            prop_assert!(b.growth_length as f64 * rate >= target - slack);
            prop_assert!((b.growth_length - 1) as f64 * rate < target + slack);
        }
    }
    Ok(())
}

pub fn operator_linearity(
    schedule: &ParameterSchedule,
    x: &TruncatedVector,
    y: &TruncatedVector,
    alpha: f64,
    beta: f64,
    n: i64,
) -> CaseResult {
    let lhs = truncated_apply(schedule, 2, &x.combine(alpha, y, beta).unwrap(), n).unwrap();
    let tx = truncated_apply(schedule, 2, x, n).unwrap();
    let ty = truncated_apply(schedule, 2, y, n).unwrap();
    let rhs = tx.combine(alpha, &ty, beta).unwrap();
    let scale = (alpha.abs() * tx.norm()).max(beta.abs() * ty.norm());
    let err = lhs.log_distance(&rhs).unwrap().exp();
    prop_assert!(err <= 1e-10 * scale, "n={n}: {err:e} vs scale {scale:e}");
    Ok(())
}
