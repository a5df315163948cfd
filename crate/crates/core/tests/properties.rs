mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use common::*;
use liyorke_core::diophantine::RealWithError;
use liyorke_core::dynamics::{
    estimate_liminf_limsup, iterate, liyorke_verdict, DistanceSeries, State, SystemHandle, VerdictOptions,
};
use liyorke_core::operator::{transient_growth_profile, truncated_apply, BlockMatrix, Probe};
use liyorke_core::plane::{cartesian, PlanePoint, Space};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_law_holds((system, x) in system_and_state(), m in -50i64..=50, n in -50i64..=50) {
        group_law(&system, &x, m, n)?;
    }

    #[test]
    fn inversion_round_trips((system, x) in system_and_state(), n in -50i64..=50) {
        inversion(&system, &x, n)?;
    }

    #[test]
    fn rotation_is_additive(
        z in disk_point(),
        p in -5i64..=5,
        q in 1i64..=7,
        m in -2000i64..=2000,
        n in -2000i64..=2000,
    ) {
        rotation_additivity(&z, p, q, m, n)?;
    }

    #[test]
    fn distribution_estimates_are_bounded_and_monotone(
        values in proptest::collection::vec(0.0f64..2.0, 1..300),
        mut grid in proptest::collection::vec(0.0f64..2.5, 1..20),
    ) {
        grid.sort_by(f64::total_cmp);
        distribution_bounds(&values, &grid)?;
    }

    #[test]
    fn cf_determinant_surds(p in -20i64..=20, d in 2i64..200, q in 1i64..=30) {
        cf_determinant(&RealWithError::quadratic_surd(p, d, q).unwrap())?;
    }

    #[test]
    fn cf_determinant_rationals(num in -100_000i64..=100_000, den in 1i64..=100_000) {
        cf_determinant(&RealWithError::from_ratio(num, den).unwrap())?;
    }

    #[test]
    fn cf_determinant_decimals(x in -10.0f64..10.0, err_exp in -15i32..=-6) {
        cf_determinant(&RealWithError::from_f64(x, 10f64.powi(err_exp)).unwrap())?;
    }

    #[test]
    fn schedule_invariants_hold(
        eps in 0.01f64..0.5,
        steps in proptest::collection::vec(0.1f64..10.0, 1..=6),
        c0 in 0.8f64..5.0,
    ) {
        let c: Vec<f64> = steps.iter().scan(c0, |acc, s| { let v = *acc; *acc += s; Some(v) }).collect();
        schedule_invariants(eps, &c)?;
    }

    #[test]
    fn operator_is_linear(
        (x, y) in (truncated_vector(small_schedule()), truncated_vector(small_schedule())),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        n in -300i64..=300,
    ) {
        operator_linearity(&small_schedule(), &x, &y, alpha, beta, n)?;
    }

    #[test]
    fn extremes_are_attained_at_witnesses(
        values in proptest::collection::vec(0.0f64..2.0, 1..200),
        tail in 0.05f64..=1.0,
    ) {
        let n = values.len() as u64;
        let series = DistanceSeries::new((1..=n).collect(), values, n).unwrap();
        let est = estimate_liminf_limsup(&series, tail).unwrap();
        prop_assert_eq!(series.value_at(*est.low_witnesses.last().unwrap()), Some(est.low));
        prop_assert_eq!(series.value_at(*est.high_witnesses.last().unwrap()), Some(est.high));
        prop_assert!(est.low <= est.high);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Extra sample indices can only widen the observed range.
    #[test]
    fn hints_only_widen_estimates(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        hints in proptest::collection::vec(1u64..2000, 0..40),
    ) {
        prop_assume!((a - b).abs() > 1e-3);
        let x = State::Plane(PlanePoint::disk_from_log_odds(a, 0.0).unwrap());
        let y = State::Plane(PlanePoint::disk_from_log_odds(b, 0.0).unwrap());
        let opts = VerdictOptions { horizon: 1000, stride: 7, ..VerdictOptions::default() };
        let plain = liyorke_verdict(&SystemHandle::DiskF, &x, &y, None, &opts).unwrap();
        let hinted = liyorke_verdict(&SystemHandle::DiskF, &x, &y, Some(&hints), &opts).unwrap();
        prop_assert!(hinted.liminf_estimate <= plain.liminf_estimate);
        prop_assert!(hinted.limsup_estimate >= plain.limsup_estimate);
        let again = liyorke_verdict(&SystemHandle::DiskF, &x, &y, Some(&hints), &opts).unwrap();
        prop_assert_eq!(hinted, again);
    }

    /// Closed forms agree with repeated Cartesian steps.
    #[test]
    fn closed_form_matches_stepping(r in 0.0f64..0.9, a in 0.0f64..1.0, n in 0i64..=10) {
        let z = PlanePoint::disk(r, a).unwrap();
        let State::Plane(closed) = iterate(&SystemHandle::DiskF, &State::Plane(z), n).unwrap() else {
            unreachable!()
        };
        let mut c = z.to_cartesian();
        for _ in 0..n {
            c = cartesian::f(c);
        }
        prop_assert!((closed.to_cartesian() - c).norm() <= 1e-6, "f^{}: {:?} vs {:?}", n, closed, c);

        let w = PlanePoint::plane(r * 5.0, a).unwrap();
        let State::Plane(closed) = iterate(&SystemHandle::PlaneGInverse, &State::Plane(w), n).unwrap() else {
            unreachable!()
        };
        let mut c = w.to_cartesian();
        for _ in 0..n {
            c = cartesian::g_inverse(c);
        }
        prop_assert!((closed.to_cartesian() - c).norm() <= 1e-9);
        let back = PlanePoint::from_cartesian(Space::Plane, c).unwrap();
        prop_assert!((back.modulus() - closed.modulus()).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// `‖T^{-n} x‖` is increasing from some point on and unbounded.
    #[test]
    fn inverse_orbits_grow_without_bound(x in truncated_vector(small_schedule())) {
        let s = small_schedule();
        let mut v = x.clone();
        let mut logs = Vec::with_capacity(10_001);
        logs.push(v.log_norm());
        for _ in 0..10_000 {
            v = truncated_apply(&s, 2, &v, -1).unwrap();
            logs.push(v.log_norm());
        }
        let tail = &logs[5_000..];
        prop_assert!(tail.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(logs[10_000] - logs[0] > 200.0);
        let direct = truncated_apply(&s, 2, &x, -10_000).unwrap().log_norm();
        prop_assert!((direct - logs[10_000]).abs() <= 1e-8 * direct.abs());
    }
}

/// Dense matrix powers as an independent check of the dim-88 profile.
#[test]
fn dim88_profile_matches_dense_powers() {
    let eps = 0.025;
    let dim = 88;
    let b = BlockMatrix::new(1, eps, dim).unwrap();
    let profile = transient_growth_profile(&b, Probe::Uniform, 6000);

    let mut t = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        t[(j, j)] = 1.0 - eps;
        if j + 1 < dim {
            t[(j, j + 1)] = 2.0 * eps;
        }
    }
    let mut v = DVector::from_element(dim, 1.0 / (dim as f64).sqrt());
    for n in 1..=1000 {
        v = &t * v;
        let dense = v.norm();
        let ours = profile.log_norms[n].exp();
        assert!((dense - ours).abs() <= 1e-10 * dense, "n = {n}: {dense} vs {ours}");
    }

    // Peak from a 40-digit evaluation of the same recurrence.
    assert_eq!(profile.argmax, 3427);
    let peak = 1.637_869_962_647_260_7e24;
    assert!(
        (profile.max_norm() - peak).abs() <= 1e-9 * peak,
        "{}",
        profile.max_norm()
    );
}
