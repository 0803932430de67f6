//! Minimal-denominator rational approximation.
//!
//! `q_min(ω, δ)` is the smallest `q` such that some `p/q` lies in the open
//! ball `(ω − δ, ω + δ)`. The first fraction met while descending the
//! Stern-Brocot tree towards `ω` that falls inside the ball attains it.
//! Runs of consecutive moves in the same direction are taken in one jump
//! (galloping then bisecting on the run length), so the cost grows with the
//! number of continued-fraction terms rather than with `q`.
//!
//! A rotation number is called effectively irrational when `log₁₀ q_min`
//! sits within `s` of its typical value `−½ log₁₀ δ` for uniformly random
//! reals: too small means close to a low-order rational, too large means
//! the ball barely misses one.

use serde::Serialize;

use crate::exec::{map_uniform_samples, Execution};
use crate::{Error, Result};

/// Largest denominator the descent will produce.
pub const MAX_DENOMINATOR: u64 = 1 << 53;

const MAX_RUNS: usize = 100_000;

/// `p/q` with `|ω − p/q| = distance < δ` and `q` minimal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RationalApprox {
    pub p: i64,
    pub q: u64,
    pub distance: f64,
}

/// Signed residual `p − q·x` with a single rounding.
#[inline]
fn residual(p: u64, q: u64, x: f64) -> f64 {
    (-(q as f64)).mul_add(x, p as f64)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Below,
    Inside,
    Above,
}

#[inline]
fn side(p: u64, q: u64, x: f64, delta: f64) -> Side {
    let r = residual(p, q, x);
    let width = q as f64 * delta;
    if r <= -width {
        Side::Below
    } else if r >= width {
        Side::Above
    } else {
        Side::Inside
    }
}

/// Largest `k ≥ 1` with `pred(k)` true, given `pred(1)` true and `pred`
/// monotone (true then false).
fn last_true(mut pred: impl FnMut(u64) -> bool, limit: u64) -> u64 {
    let mut lo = 1u64;
    let mut hi = 2u64;
    while hi <= limit && pred(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    let mut hi = hi.min(limit.saturating_add(1));
    // invariant: pred(lo), !pred(hi) or hi beyond limit
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Minimal-denominator fraction in `(ω − δ, ω + δ)`.
///
/// The integer part of `ω` is removed before the descent and added back to
/// the numerator of the result.
pub fn qmin(omega: f64, delta: f64) -> Result<RationalApprox> {
    if !omega.is_finite() {
        return Err(Error::invalid(format!("ω must be finite, got {omega}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!("δ must lie in (0, 1/2), got {delta}")));
    }
    let int_part = omega.floor();
    let x = omega - int_part;
    let shift = int_part as i64;
    let finish = |p: u64, q: u64| {
        let distance = residual(p, q, x).abs() / q as f64;
        RationalApprox {
            p: p as i64 + shift * q as i64,
            q,
            distance,
        }
    };

    if side(0, 1, x, delta) == Side::Inside {
        return Ok(finish(0, 1));
    }
    if side(1, 1, x, delta) == Side::Inside {
        return Ok(finish(1, 1));
    }

    let (mut lp, mut lq) = (0u64, 1u64);
    let (mut rp, mut rq) = (1u64, 1u64);
    for _ in 0..MAX_RUNS {
        let (mp, mq) = (lp + rp, lq + rq);
        if mq > MAX_DENOMINATOR {
            break;
        }
        match side(mp, mq, x, delta) {
            Side::Inside => return Ok(finish(mp, mq)),
            Side::Below => {
                // l + k·r stays below the ball for k = 1..=k*
                let limit = (MAX_DENOMINATOR - lq) / rq;
                let k = last_true(|k| side(lp + k * rp, lq + k * rq, x, delta) == Side::Below, limit);
                lp += k * rp;
                lq += k * rq;
            }
            Side::Above => {
                let limit = (MAX_DENOMINATOR - rq) / lq;
                let k = last_true(|k| side(rp + k * lp, rq + k * lq, x, delta) == Side::Above, limit);
                rp += k * lp;
                rq += k * lq;
            }
        }
    }
    Err(Error::Capacity(format!(
        "no fraction with denominator ≤ 2^53 found within δ = {delta} of {omega}"
    )))
}

/// Radius `δ` and log-band half-width `s` of the irrationality test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IrrationalityConfig {
    pub delta: f64,
    pub s: f64,
}

impl Default for IrrationalityConfig {
    fn default() -> Self {
        Self { delta: 1e-9, s: 1.6875 }
    }
}

impl IrrationalityConfig {
    pub fn new(delta: f64, s: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::invalid(format!("δ must lie in (0, 1/2), got {delta}")));
        }
        if !(s > 0.0) {
            return Err(Error::invalid(format!("s must be positive, got {s}")));
        }
        Ok(Self { delta, s })
    }

    /// Open band `(lo, hi)` of denominators counted as typical.
    pub fn denominator_band(&self) -> (f64, f64) {
        let centre = -0.5 * self.delta.log10();
        (10f64.powf(centre - self.s), 10f64.powf(centre + self.s))
    }

    /// `|log₁₀ q + ½ log₁₀ δ| < s`.
    pub fn is_typical_denominator(&self, q: u64) -> bool {
        ((q as f64).log10() + 0.5 * self.delta.log10()).abs() < self.s
    }
}

/// Whether `ω` is effectively irrational at precision `cfg.delta`.
pub fn is_effectively_irrational(omega: f64, cfg: &IrrationalityConfig) -> Result<bool> {
    Ok(cfg.is_typical_denominator(qmin(omega, cfg.delta)?.q))
}

/// Sample moments of `log₁₀ q_min` over uniform random `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DenominatorStats {
    pub samples: usize,
    pub delta: f64,
    pub mean_log10: f64,
    pub sigma: f64,
}

/// Mean and standard deviation of `log₁₀ q_min(ω, δ)` over `n` uniform
/// `ω ∈ (0,1)` drawn by [`map_uniform_samples`].
pub fn qmin_statistics(n: usize, delta: f64, seed: u64, exec: Execution) -> Result<DenominatorStats> {
    if n < 1000 {
        return Err(Error::invalid(format!("need at least 1000 samples, got {n}")));
    }
    let logs = map_uniform_samples::<1, _, _>(exec, n, seed, |[w]| {
        qmin(w, delta).map(|r| (r.q as f64).log10())
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let (mean, sigma) = mean_and_std(&logs);
    Ok(DenominatorStats {
        samples: n,
        delta,
        mean_log10: mean,
        sigma,
    })
}

/// Sample mean and (n − 1)-normalised standard deviation.
pub(crate) fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}
