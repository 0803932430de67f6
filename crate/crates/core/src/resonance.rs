//! Resonance orders of rotation vectors and orbit classification.
//!
//! A rotation vector `ω ∈ T²` is `(m, n)`-resonant to precision `δ` when
//! the line `m·α = n` passes within `δ` of `ω`. The resonance order
//! `M(ω, δ)` is the smallest `‖m‖₁` over such lines. There is no tree
//! algorithm for it in two dimensions, so it is found by enumerating `m`
//! shell by shell in `‖m‖₁`.

use serde::Serialize;

use crate::averaging::{classify_chaos, ChaosThreshold, RotationResult};
use crate::exec::{map_uniform_samples, Execution};
use crate::farey::{mean_and_std, qmin, IrrationalityConfig};
use crate::{Error, Result};

/// A resonance `m·ω ≈ n` with `order = ‖m‖₁` and Euclidean distance
/// `distance` from `ω` to the line. The first nonzero entry of `m` is
/// positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonanceHit {
    pub m: [i64; 2],
    pub n: i64,
    pub order: u64,
    pub distance: f64,
}

/// Orbit type.
///
/// For circle maps a rotation number `≈ p/q` is recorded as the resonance
/// `m = (q, 0)`, `n = p`, of order `q`, and the irrational case is
/// reported as [`OrbitClass::Nonresonant`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", content = "resonance", rename_all = "lowercase")]
pub enum OrbitClass {
    Chaotic,
    /// Rank-two resonance (rational rotation vector). `None` when the
    /// order search hit its cap.
    Periodic(Option<ResonanceHit>),
    /// Rank-one resonance. `None` when the order search hit its cap.
    Resonant(Option<ResonanceHit>),
    /// Incommensurate: the resonance order lies in the typical band.
    Nonresonant(ResonanceHit),
}

impl OrbitClass {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitClass::Chaotic => "chaotic",
            OrbitClass::Periodic(_) => "periodic",
            OrbitClass::Resonant(_) => "resonant",
            OrbitClass::Nonresonant(_) => "nonresonant",
        }
    }

    pub fn resonance(&self) -> Option<&ResonanceHit> {
        match self {
            OrbitClass::Chaotic => None,
            OrbitClass::Periodic(h) | OrbitClass::Resonant(h) => h.as_ref(),
            OrbitClass::Nonresonant(h) => Some(h),
        }
    }
}

/// `|m·ω − n| / ‖m‖₂`.
pub fn resonance_distance(omega: [f64; 2], m: [i64; 2], n: i64) -> Result<f64> {
    if m == [0, 0] {
        return Err(Error::invalid("resonance vector must be nonzero"));
    }
    let (m1, m2) = (m[0] as f64, m[1] as f64);
    Ok((m1 * omega[0] + m2 * omega[1] - n as f64).abs() / m1.hypot(m2))
}

#[inline]
fn try_vector(omega: [f64; 2], m1: i64, m2: i64, delta_sq: f64) -> Option<(i64, f64)> {
    let (a, b) = (m1 as f64, m2 as f64);
    let dot = a * omega[0] + b * omega[1];
    let n = dot.round();
    let r = dot - n;
    let norm_sq = a * a + b * b;
    (r * r < delta_sq * norm_sq).then(|| (n as i64, r.abs() / norm_sq.sqrt()))
}

/// Smallest-order resonance within `delta` of `omega`, searching
/// `‖m‖₁ = 1..=cap`.
///
/// Within one order, candidates are visited in lexicographic order of
/// `m = (m₁, m₂)` with `m₁ ≥ 0` (and `m₂ > 0` when `m₁ = 0`). For each `m`
/// only `n = round(m·ω)` is tried, since it minimises `|m·ω − n|`.
pub fn resonance_order(omega: [f64; 2], delta: f64, cap: u64) -> Option<ResonanceHit> {
    let delta_sq = delta * delta;
    for k in 1..=cap as i64 {
        for m1 in 0..=k {
            let m2 = k - m1;
            let candidates: [Option<i64>; 2] = if m1 == 0 {
                [Some(m2), None]
            } else if m2 == 0 {
                [Some(0), None]
            } else {
                [Some(-m2), Some(m2)]
            };
            for m2 in candidates.into_iter().flatten() {
                if let Some((n, distance)) = try_vector(omega, m1, m2, delta_sq) {
                    return Some(ResonanceHit {
                        m: [m1, m2],
                        n,
                        order: k as u64,
                        distance,
                    });
                }
            }
        }
    }
    None
}

/// Closed band `lo ..= hi` of resonance orders counted as typical for
/// incommensurate vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonanceBand {
    pub lo: u64,
    pub hi: u64,
}

impl ResonanceBand {
    /// Integers `M` with `lo < log₁₀ M < hi`.
    pub fn from_log10_bounds(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || lo < 0.0 {
            return Err(Error::invalid(format!("bad log10 band ({lo}, {hi})")));
        }
        let lo_m = 10f64.powf(lo);
        let hi_m = 10f64.powf(hi);
        let lo_i = if lo_m.fract() == 0.0 { lo_m + 1.0 } else { lo_m.ceil() };
        let hi_i = if hi_m.fract() == 0.0 { hi_m - 1.0 } else { hi_m.floor() };
        Ok(Self {
            lo: lo_i as u64,
            hi: hi_i as u64,
        })
    }

    /// `mean ± k·σ` in log₁₀ space using the scaling law of `M(ω, δ)` for
    /// random `ω`.
    pub fn from_statistics(law: &OrderScaling, delta: f64, k: f64) -> Result<Self> {
        let mean = law.mean_log10(delta);
        Self::from_log10_bounds(mean - k * law.sigma, mean + k * law.sigma)
    }

    pub fn contains(&self, order: u64) -> bool {
        (self.lo..=self.hi).contains(&order)
    }
}

impl Default for ResonanceBand {
    /// `256 ≤ M ≤ 2673`, i.e. `2.407 < log₁₀ M < 3.427`.
    fn default() -> Self {
        Self::from_log10_bounds(2.407, 3.427).expect("valid default band")
    }
}

/// Empirical law `⟨log₁₀ M⟩ = slope·log₁₀ δ + intercept`, spread `sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderScaling {
    pub slope: f64,
    pub intercept: f64,
    pub sigma: f64,
}

impl Default for OrderScaling {
    fn default() -> Self {
        Self {
            slope: -0.334,
            intercept: -0.091,
            sigma: 0.171,
        }
    }
}

impl OrderScaling {
    pub fn mean_log10(&self, delta: f64) -> f64 {
        self.slope * delta.log10() + self.intercept
    }
}

/// Parameters of the resonance-order test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonanceConfig {
    pub delta: f64,
    pub cap: u64,
    pub band: ResonanceBand,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        Self {
            delta: 1e-9,
            cap: 3000,
            band: ResonanceBand::default(),
        }
    }
}

impl ResonanceConfig {
    pub fn new(delta: f64, cap: u64, band: ResonanceBand) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::invalid(format!("δ must lie in (0, 1/2), got {delta}")));
        }
        if cap == 0 {
            return Err(Error::invalid("order cap must be at least 1"));
        }
        Ok(Self { delta, cap, band })
    }
}

/// Classifies a two-dimensional rotation vector.
///
/// Chaotic if `dig_T < D_T`; otherwise nonresonant if the resonance order
/// lies in the band; otherwise periodic if neither component is
/// effectively irrational, and resonant if at least one is.
pub fn classify_rotation_vector(
    r: &RotationResult<2>,
    thr: &ChaosThreshold,
    farey: &IrrationalityConfig,
    res: &ResonanceConfig,
) -> Result<OrbitClass> {
    if classify_chaos(r, thr) {
        return Ok(OrbitClass::Chaotic);
    }
    let hit = resonance_order(r.omega, res.delta, res.cap);
    if let Some(h) = hit {
        if res.band.contains(h.order) {
            return Ok(OrbitClass::Nonresonant(h));
        }
    }
    let rational = |w: f64| -> Result<bool> { Ok(!farey.is_typical_denominator(qmin(w, farey.delta)?.q)) };
    if rational(r.omega[0])? && rational(r.omega[1])? {
        Ok(OrbitClass::Periodic(hit))
    } else {
        Ok(OrbitClass::Resonant(hit))
    }
}

/// Classifies a circle-map rotation number: chaotic, periodic (effectively
/// rational) or nonresonant (effectively irrational).
pub fn classify_rotation_number(
    r: &RotationResult<1>,
    thr: &ChaosThreshold,
    farey: &IrrationalityConfig,
) -> Result<OrbitClass> {
    if classify_chaos(r, thr) {
        return Ok(OrbitClass::Chaotic);
    }
    let approx = qmin(r.omega[0], farey.delta)?;
    let hit = ResonanceHit {
        m: [approx.q as i64, 0],
        n: approx.p,
        order: approx.q,
        distance: approx.distance,
    };
    if farey.is_typical_denominator(approx.q) {
        Ok(OrbitClass::Nonresonant(hit))
    } else {
        Ok(OrbitClass::Periodic(Some(hit)))
    }
}

/// Statistics of `log₁₀ M` over uniform random `ω ∈ [0,1)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonanceStats {
    pub samples: usize,
    pub delta: f64,
    pub mean_log10: f64,
    pub sigma: f64,
    /// Fraction outside the band, i.e. wrongly called resonant.
    pub misclassified_fraction: f64,
    pub below_fraction: f64,
    pub above_fraction: f64,
    /// Samples whose order exceeded the cap; counted as above the band and
    /// left out of the moments.
    pub beyond_cap: usize,
}

/// Mean and spread of `log₁₀ M(ω, δ)` for `n` uniform samples, plus the
/// fraction rejected by the band test.
pub fn resonance_statistics(
    n: usize,
    seed: u64,
    cfg: &ResonanceConfig,
    exec: Execution,
) -> Result<ResonanceStats> {
    if n < 1000 {
        return Err(Error::invalid(format!("need at least 1000 samples, got {n}")));
    }
    let orders: Vec<Option<u64>> = map_uniform_samples::<2, _, _>(exec, n, seed, |w| {
        resonance_order(w, cfg.delta, cfg.cap).map(|h| h.order)
    });
    let logs: Vec<f64> = orders.iter().flatten().map(|&m| (m as f64).log10()).collect();
    let beyond_cap = orders.iter().filter(|o| o.is_none()).count();
    let below = orders.iter().flatten().filter(|&&m| m < cfg.band.lo).count();
    let above = orders.iter().flatten().filter(|&&m| m > cfg.band.hi).count() + beyond_cap;
    let (mean, sigma) = mean_and_std(&logs);
    let total = n as f64;
    Ok(ResonanceStats {
        samples: n,
        delta: cfg.delta,
        mean_log10: mean,
        sigma,
        misclassified_fraction: (below + above) as f64 / total,
        below_fraction: below as f64 / total,
        above_fraction: above as f64 / total,
        beyond_cap,
    })
}
