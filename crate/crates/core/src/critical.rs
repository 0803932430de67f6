//! Critical forcing amplitude of the two-torus family.
//!
//! `det Df = ε² det H + ε tr H + 1` equals one at `ε = 0`. The critical
//! amplitude `ε_crit` is the smallest `ε` at which its minimum over the
//! torus reaches zero; beyond it the map is not a local diffeomorphism and
//! cannot be conjugate to a rotation.

use serde::Serialize;

use crate::exec::Execution;
use crate::maps::{wrap, Torus2Params};
use crate::{Error, Result};

/// Location and value of the minimum of `det Df` over the torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetMinimum {
    pub value: f64,
    pub x: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalResult {
    pub eps_crit: f64,
    /// Where `det Df` vanishes at `eps_crit`.
    pub argmin_x: [f64; 2],
    /// `|min det Df|` at `eps_crit`.
    pub residual: f64,
}

/// Search settings for [`min_det_df_with`] and [`eps_crit_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalOptions {
    /// Points per side of the coarse grid.
    pub grid: usize,
    /// Number of best grid points refined locally.
    pub starts: usize,
    /// Simplex size at which local refinement stops.
    pub x_tol: f64,
    /// Width of the final ε bracket.
    pub eps_tol: f64,
    /// Give up if no sign change is found below this ε.
    pub eps_max: f64,
    pub exec: Execution,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self {
            grid: 256,
            starts: 5,
            x_tol: 1e-10,
            eps_tol: 1e-6,
            eps_max: 1e3,
            exec: Execution::default(),
        }
    }
}

/// `tr H` and `det H` tabulated on a uniform grid. Both are independent of
/// `ε`, so one table serves every amplitude tried during bisection.
struct HGrid {
    n: usize,
    trace: Vec<f64>,
    det: Vec<f64>,
}

impl HGrid {
    fn new(params: &Torus2Params, n: usize, exec: Execution) -> Self {
        let rows = exec.map(n, |i| {
            let x1 = i as f64 / n as f64;
            (0..n)
                .map(|j| {
                    let h = params.h_matrix(&[x1, j as f64 / n as f64]);
                    (h[0][0] + h[1][1], h[0][0] * h[1][1] - h[0][1] * h[1][0])
                })
                .collect::<Vec<_>>()
        });
        let (trace, det) = rows.into_iter().flatten().unzip();
        Self { n, trace, det }
    }

    /// Indices of the `k` smallest grid values of `det Df` at `eps`.
    fn lowest(&self, eps: f64, k: usize) -> Vec<(f64, usize)> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for (idx, (t, d)) in self.trace.iter().zip(&self.det).enumerate() {
            let v = eps * eps * d + eps * t + 1.0;
            if best.len() < k || v < best[best.len() - 1].0 {
                let pos = best.partition_point(|&(b, _)| b <= v);
                best.insert(pos, (v, idx));
                best.truncate(k);
            }
        }
        best
    }

    fn point(&self, idx: usize) -> [f64; 2] {
        [(idx / self.n) as f64 / self.n as f64, (idx % self.n) as f64 / self.n as f64]
    }
}

/// Derivative-free Nelder-Mead minimisation in the plane.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], size: f64, x_tol: f64) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + size, start[1]], [start[0], start[1] + size]];
    let mut values = simplex.map(&f);
    for _ in 0..5000 {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let diameter = (1..3)
            .map(|i| (simplex[i][0] - simplex[0][0]).hypot(simplex[i][1] - simplex[0][1]))
            .fold(0.0, f64::max);
        if diameter < x_tol {
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                // shrink towards the best vertex
                for i in 1..3 {
                    simplex[i] = [
                        0.5 * (simplex[0][0] + simplex[i][0]),
                        0.5 * (simplex[0][1] + simplex[i][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    (simplex[best], values[best])
}

fn refine(params: &Torus2Params, grid: &HGrid, eps: f64, opts: &CriticalOptions) -> DetMinimum {
    let f = |x: [f64; 2]| params.det_jacobian_at(eps, &x);
    let size = 1.0 / grid.n as f64;
    grid.lowest(eps, opts.starts.max(1))
        .into_iter()
        .map(|(v, idx)| {
            let start = grid.point(idx);
            let (x, fx) = nelder_mead(f, start, size, opts.x_tol);
            if fx <= v {
                DetMinimum { value: fx, x: x.map(wrap) }
            } else {
                DetMinimum { value: v, x: start }
            }
        })
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start")
}

/// Global minimum of `det Df` over the torus at amplitude `eps`: a coarse
/// grid followed by Nelder-Mead from the best few grid points.
pub fn min_det_df(params: &Torus2Params, eps: f64) -> DetMinimum {
    min_det_df_with(params, eps, &CriticalOptions::default())
}

pub fn min_det_df_with(params: &Torus2Params, eps: f64, opts: &CriticalOptions) -> DetMinimum {
    let grid = HGrid::new(params, opts.grid.max(2), opts.exec);
    refine(params, &grid, eps, opts)
}

/// True when `det Df ≡ 1` for every `ε`: `a₁ = a₄ = 0` and `a₂a₃ = 0`.
pub fn is_degenerate(params: &Torus2Params) -> bool {
    let [a1, a2, a3, a4] = params.amps;
    a1 == 0.0 && a4 == 0.0 && a2 * a3 == 0.0
}

/// Smallest `ε ≥ 0` at which `min det Df ≤ 0`.
///
/// The upper end of the bracket starts at 1 and doubles until the minimum
/// is negative; the bracket is then bisected to `eps_tol`.
pub fn eps_crit(params: &Torus2Params) -> Result<CriticalResult> {
    eps_crit_with(params, &CriticalOptions::default())
}

pub fn eps_crit_with(params: &Torus2Params, opts: &CriticalOptions) -> Result<CriticalResult> {
    if is_degenerate(params) {
        return Err(Error::NoCriticalValue(
            "a₁ = a₄ = 0 and a₂a₃ = 0: det Df is identically 1".into(),
        ));
    }
    let grid = HGrid::new(params, opts.grid.max(2), opts.exec);
    let singular = |eps: f64| refine(params, &grid, eps, opts).value <= 0.0;

    let mut lo = 0.0;
    let mut hi = 1.0;
    while !singular(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > opts.eps_max {
            return Err(Error::Capacity(format!(
                "det Df stays positive up to ε = {}",
                opts.eps_max
            )));
        }
    }
    while hi - lo >= opts.eps_tol {
        let mid = 0.5 * (lo + hi);
        if singular(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let eps = 0.5 * (lo + hi);
    let at = refine(params, &grid, eps, opts);
    Ok(CriticalResult {
        eps_crit: eps,
        argmin_x: at.x,
        residual: at.value.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::parameter_catalog;

    #[test]
    fn no_forcing_gives_unit_determinant() {
        let p = parameter_catalog(0).unwrap();
        let m = min_det_df(&p, 0.0);
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (x, v) = nelder_mead(|x| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.1).powi(2) - 1.0, [0.0, 0.0], 0.1, 1e-10);
        assert!((x[0] - 0.3).abs() < 1e-8 && (x[1] + 0.1).abs() < 1e-8);
        assert!((v + 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_family_has_no_critical_value() {
        let c = parameter_catalog(0).unwrap();
        let p = Torus2Params::new([0.0, 0.0], 0.0, [0.0, 1.0, 0.0, 0.0], c.phases).unwrap();
        assert!(matches!(eps_crit(&p), Err(Error::NoCriticalValue(_))));
        let p = Torus2Params::new([0.0, 0.0], 0.0, [0.0, 0.0, 1.0, 0.0], c.phases).unwrap();
        assert!(is_degenerate(&p));
    }

    #[test]
    fn uncoupled_case_closed_form() {
        let p = parameter_catalog(4).unwrap();
        let r = eps_crit(&p).unwrap();
        let expected = 1.0 / p.amps[0].max(p.amps[3]);
        assert!((r.eps_crit - expected).abs() < 1e-5, "{} vs {expected}", r.eps_crit);
        assert!(r.residual < 1e-4);
    }
}
