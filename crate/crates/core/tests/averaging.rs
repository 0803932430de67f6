mod common;

use proptest::prelude::*;
use torus_scan::averaging::{
    lyapunov_spectrum, rotation_and_digits, weighted_average, digits_from_difference, CompensatedSum,
};
use torus_scan::maps::{parameter_catalog, wrap, CircleParams, OrbitSpec, TorusMap, CATALOG_LEN};
use torus_scan::GOLDEN_MEAN;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn constant_streams_average_to_themselves(c in -10.0f64..10.0, steps in 3usize..5000) {
        let v = weighted_average(std::iter::repeat([c]), steps).unwrap();
        prop_assert!((v[0] - c).abs() <= 1e-13 * c.abs().max(1e-300));
    }

    #[test]
    fn lift_commutes_with_integer_shifts(
        k1 in 0u64..(1 << 40), k2 in 0u64..(1 << 40), m1 in -8i32..=8, m2 in -8i32..=8,
        case in 0..CATALOG_LEN, eps in 0.0f64..5.0, a in 0.0f64..3.0,
    ) {
        // dyadic points so that x + m is exact
        let x = [k1 as f64 / (1u64 << 40) as f64, k2 as f64 / (1u64 << 40) as f64];
        let m = [m1 as f64, m2 as f64];
        let p = parameter_catalog(case).unwrap().with_eps(eps).unwrap();
        let fx = p.lift_step(&x);
        let fxm = p.lift_step(&[x[0] + m[0], x[1] + m[1]]);
        prop_assert_eq!(fxm, [fx[0] + m[0], fx[1] + m[1]]);
        let c = CircleParams::new(0.3, a).unwrap();
        prop_assert_eq!(c.lift_step(&[x[0] + m[0]])[0], c.lift_step(&[x[0]])[0] + m[0]);
    }

    #[test]
    fn rotation_is_independent_of_the_lift_of_x0(x in 0.0f64..1.0, m in -5i32..5) {
        let c = CircleParams::new(0.37, 0.6).unwrap();
        let a = rotation_and_digits(&c, &OrbitSpec::new([x], 100, 2000).unwrap()).unwrap();
        let b = rotation_and_digits(&c, &OrbitSpec::new([x + m as f64], 100, 2000).unwrap()).unwrap();
        prop_assert!((a.omega[0] - b.omega[0]).abs() < 1e-12);
    }
}

#[test]
fn weighted_and_plain_averages_agree() {
    let c = CircleParams::new(GOLDEN_MEAN, 0.5).unwrap();
    let spec = OrbitSpec::with_steps(1_000_000);
    let (plain, _) = common::plain_birkhoff(&c, &spec);
    let r = rotation_and_digits(&c, &spec).unwrap();
    assert!((r.omega[0] - wrap(plain)).abs() < 1e-6, "{} vs {plain}", r.omega[0]);
}

#[test]
fn weighting_gains_at_least_four_digits() {
    let c = CircleParams::new(GOLDEN_MEAN, 0.5).unwrap();
    let spec = OrbitSpec::with_steps(100_000);
    let (a, b) = common::plain_birkhoff(&c, &spec);
    let plain_digits = digits_from_difference((a - b).abs());
    let r = rotation_and_digits(&c, &spec).unwrap();
    assert!(r.digits >= plain_digits + 4.0, "{} vs {plain_digits}", r.digits);
}

#[test]
fn digits_never_exceed_cap_or_nan() {
    for &(w, a) in &[(0.0, 0.0), (0.5, 0.9), (0.31, 1.7), (GOLDEN_MEAN, 2.5), (0.999, 0.2)] {
        let r = rotation_and_digits(&CircleParams::new(w, a).unwrap(), &OrbitSpec::with_steps(5000)).unwrap();
        assert!(r.digits.is_finite() && r.digits <= 16.0 && r.digits >= 0.0);
        assert!((0.0..1.0).contains(&r.omega[0]));
    }
}

#[test]
fn exponent_sum_is_mean_log_determinant() {
    for case in 0..CATALOG_LEN {
        for &(eps, w) in &[(0.8, [0.2, 0.7]), (2.6, [0.7, 0.3]), (4.0, [0.24, 0.4])] {
            let p = parameter_catalog(case).unwrap().with_eps(eps).unwrap().with_omega(w).unwrap();
            let spec = OrbitSpec::with_steps(20_000);
            let l = lyapunov_spectrum(&p, &spec).unwrap();
            let mut x = spec.x0;
            for _ in 0..spec.transient {
                x = p.torus_step(&x);
            }
            let mut s = CompensatedSum::default();
            for _ in 0..spec.steps {
                let j = p.jacobian(&x);
                s.add((j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs().ln());
                x = p.torus_step(&x);
            }
            let mean = s.value() / spec.steps as f64;
            assert!((l.lambda1 + l.lambda2 - mean).abs() < 1e-8, "case {case} eps {eps}");
            assert!(l.lambda1 >= l.lambda2);
        }
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for case in 0..CATALOG_LEN {
        let p = parameter_catalog(case).unwrap().with_eps(1.3).unwrap();
        for _ in 0..100 {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let fd = common::fd_jacobian(&p, x, 1e-6);
            let j = p.jacobian(&x);
            for r in 0..2 {
                for c in 0..2 {
                    assert!((fd[r][c] - j[r][c]).abs() < 1e-5, "case {case} at {x:?}");
                }
            }
        }
    }
}
