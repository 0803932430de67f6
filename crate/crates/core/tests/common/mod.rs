// Independent reference implementations shared by the integration tests
// and the acceptance runner. They are deliberately naive.
#![allow(dead_code)]

use torus_scan::maps::{CircleParams, OrbitSpec, TorusMap, Torus2Params};

/// Smallest q with some p satisfying |x − p/q| < δ, by trying every q.
pub fn brute_qmin(x: f64, delta: f64) -> (i64, u64) {
    for q in 1u64.. {
        let p = (x * q as f64).round();
        for cand in [p - 1.0, p, p + 1.0] {
            if (x - cand / q as f64).abs() < delta {
                return (cand as i64, q);
            }
        }
    }
    unreachable!()
}

/// Minimal-order resonance by scanning every m with ‖m‖₁ ≤ max_order and
/// every n with |n| ≤ ‖m‖₁ + 1. Returns (order, m, n), ties broken by
/// lexicographic canonical m.
pub fn brute_resonance(w: [f64; 2], delta: f64, max_order: i64) -> Option<(u64, [i64; 2], i64)> {
    let mut best: Option<(u64, [i64; 2], i64)> = None;
    for m1 in -max_order..=max_order {
        for m2 in -max_order..=max_order {
            let k = m1.abs() + m2.abs();
            if k == 0 || k > max_order {
                continue;
            }
            // canonical sign: first nonzero component positive
            if m1 < 0 || (m1 == 0 && m2 < 0) {
                continue;
            }
            let norm = ((m1 * m1 + m2 * m2) as f64).sqrt();
            for n in -(k + 1)..=(k + 1) {
                let d = (m1 as f64 * w[0] + m2 as f64 * w[1] - n as f64).abs() / norm;
                if d < delta {
                    let cand = (k as u64, [m1, m2], n);
                    if best.map_or(true, |b| (cand.0, cand.1) < (b.0, b.1)) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    best
}

/// Unweighted two-window Birkhoff average of the displacement along a
/// circle-map orbit, summed on the lift.
pub fn plain_birkhoff(p: &CircleParams, spec: &OrbitSpec<1>) -> (f64, f64) {
    let mut x = spec.x0[0];
    for _ in 0..spec.transient {
        x = p.lift_step(&[x])[0];
    }
    let mut window = || {
        let start = x;
        for _ in 0..spec.steps {
            x = p.lift_step(&[x])[0];
        }
        (x - start) / spec.steps as f64
    };
    let a = window();
    let b = window();
    (a, b)
}

/// Central-difference Jacobian of the lift.
pub fn fd_jacobian(p: &Torus2Params, x: [f64; 2], h: f64) -> [[f64; 2]; 2] {
    let mut j = [[0.0; 2]; 2];
    for col in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[col] += h;
        xm[col] -= h;
        let fp = p.lift_step(&xp);
        let fm = p.lift_step(&xm);
        for row in 0..2 {
            j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    j
}

/// Smallest positive root of ε² det H + ε tr H + 1 over an n×n grid.
pub fn grid_root_eps_crit(p: &Torus2Params, n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..n {
        for k in 0..n {
            let h = p.h_matrix(&[i as f64 / n as f64, k as f64 / n as f64]);
            let t = h[0][0] + h[1][1];
            let d = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let roots: Vec<f64> = if d.abs() < 1e-300 {
                vec![-1.0 / t]
            } else {
                let disc = t * t - 4.0 * d;
                if disc < 0.0 {
                    vec![]
                } else {
                    vec![(-t - disc.sqrt()) / (2.0 * d), (-t + disc.sqrt()) / (2.0 * d)]
                }
            };
            for r in roots {
                if r > 0.0 && r < best {
                    best = r;
                }
            }
        }
    }
    best
}

/// Reference ε_crit values for Cases 0..7.
pub const EPS_CRIT_TABLE: [f64; 8] = [2.22044, 2.2070, 2.4566, 2.0564, 1.3148, 2.3434, 5.2100, 1.5436];
