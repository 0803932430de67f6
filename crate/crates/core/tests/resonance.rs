mod common;

use proptest::prelude::*;
use torus_scan::averaging::{ChaosThreshold, RotationResult};
use torus_scan::farey::IrrationalityConfig;
use torus_scan::resonance::{
    classify_rotation_vector, resonance_distance, resonance_order, OrbitClass, ResonanceBand, ResonanceConfig,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn enumeration_matches_double_loop(w1 in 0.0f64..1.0, w2 in 0.0f64..1.0) {
        let w = [w1, w2];
        let fast = resonance_order(w, 1e-3, 50).map(|h| (h.order, h.m, h.n));
        prop_assert_eq!(fast, common::brute_resonance(w, 1e-3, 50));
    }

    #[test]
    fn order_is_monotone_in_delta(w1 in 0.0f64..1.0, w2 in 0.0f64..1.0) {
        let w = [w1, w2];
        let mut last = 0;
        for delta in [1e-2, 1e-3, 1e-4, 1e-5] {
            let m = resonance_order(w, delta, 3000).map_or(u64::MAX, |h| h.order);
            prop_assert!(m >= last);
            last = m;
        }
    }

    #[test]
    fn nearest_integer_is_best(w1 in 0.0f64..1.0, w2 in 0.0f64..1.0, m1 in 0i64..40, m2 in -40i64..40) {
        prop_assume!(m1 != 0 || m2 != 0);
        let w = [w1, w2];
        let n = (m1 as f64 * w1 + m2 as f64 * w2).round() as i64;
        let best = resonance_distance(w, [m1, m2], n).unwrap();
        for other in [n - 2, n - 1, n + 1, n + 2] {
            prop_assert!(best <= resonance_distance(w, [m1, m2], other).unwrap());
        }
    }

    #[test]
    fn rational_vectors_are_periodic(q in 1i64..=100, p1 in 0i64..100, p2 in 0i64..100) {
        let w = [(p1 % q) as f64 / q as f64, (p2 % q) as f64 / q as f64];
        let r = RotationResult { omega: w, digits: 16.0 };
        let class = classify_rotation_vector(
            &r,
            &ChaosThreshold::TORUS,
            &IrrationalityConfig::default(),
            &ResonanceConfig::default(),
        )
        .unwrap();
        prop_assert!(matches!(class, OrbitClass::Periodic(Some(_))), "{:?}", class);
    }
}

#[test]
fn band_bounds() {
    let b = ResonanceBand::default();
    assert_eq!((b.lo, b.hi), (256, 2673));
    assert!(b.contains(256) && b.contains(2673));
    assert!(!b.contains(255) && !b.contains(2674));
}

#[test]
fn irrational_pair_regression() {
    let w = [2f64.sqrt() - 1.0, 5f64.sqrt() - 2.0];
    let h = resonance_order(w, 1e-9, 3000).expect("hit below the cap");
    assert!(resonance_order(w, 1e-9, 255).is_none());
    assert!(ResonanceBand::default().contains(h.order));
    // cross-checked in 40-digit arithmetic: distance 9.91e-10
    assert_eq!((h.order, h.m, h.n), (1495, [432, -1063], -72));
}
