//! Parameter sweeps, class proportions, digit histograms and power-law fits.

use serde::Serialize;

use crate::averaging::{
    lyapunov_spectrum, rotation_and_digits_with, ChaosThreshold, LyapunovPair, RotationResult,
    WeightTable,
};
use crate::exec::{map_uniform_samples, Execution};
use crate::farey::IrrationalityConfig;
use crate::maps::{parameter_catalog, CircleParams, OrbitSpec, Torus2Params};
use crate::resonance::{classify_rotation_number, classify_rotation_vector, OrbitClass, ResonanceConfig};
use crate::{Error, Result, GOLDEN_MEAN};

/// Parameters of one scanned map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapParams {
    Circle(CircleParams),
    Torus2(Torus2Params),
}

impl MapParams {
    /// `a` for the circle map, `ε` for the two-torus map.
    pub fn amplitude(&self) -> f64 {
        match self {
            MapParams::Circle(c) => c.a,
            MapParams::Torus2(t) => t.eps,
        }
    }

    pub fn drive(&self) -> Vec<f64> {
        match self {
            MapParams::Circle(c) => vec![c.omega],
            MapParams::Torus2(t) => t.omega.to_vec(),
        }
    }
}

/// Rotation estimate of either dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rotation {
    Circle(RotationResult<1>),
    Torus2(RotationResult<2>),
}

impl Rotation {
    pub fn digits(&self) -> f64 {
        match self {
            Rotation::Circle(r) => r.digits,
            Rotation::Torus2(r) => r.digits,
        }
    }

    pub fn omega(&self) -> &[f64] {
        match self {
            Rotation::Circle(r) => &r.omega,
            Rotation::Torus2(r) => &r.omega,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Classified { rotation: Rotation, class: OrbitClass },
    /// Numeric failure along the orbit; the scan carries on.
    Failed(String),
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub params: MapParams,
    pub outcome: Outcome,
    pub lyapunov: Option<LyapunovPair>,
}

impl ScanRecord {
    pub fn class(&self) -> Option<&OrbitClass> {
        match &self.outcome {
            Outcome::Classified { class, .. } => Some(class),
            Outcome::Failed(_) => None,
        }
    }

    pub fn rotation(&self) -> Option<&Rotation> {
        match &self.outcome {
            Outcome::Classified { rotation, .. } => Some(rotation),
            Outcome::Failed(_) => None,
        }
    }
}

/// Orbit and classification settings shared by every point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig<const D: usize> {
    pub spec: OrbitSpec<D>,
    /// Digit cutoff `D_T` below which an orbit is chaotic.
    pub min_digits: f64,
    pub farey: IrrationalityConfig,
    pub resonance: ResonanceConfig,
    /// Also compute Lyapunov exponents (two-torus scans only).
    pub lyapunov: bool,
    pub exec: Execution,
}

impl<const D: usize> ScanConfig<D> {
    /// Default classifiers with `steps` averaging iterates.
    pub fn with_steps(steps: usize) -> Self {
        Self {
            spec: OrbitSpec::with_steps(steps),
            min_digits: 9.0,
            farey: IrrationalityConfig::default(),
            resonance: ResonanceConfig::default(),
            lyapunov: false,
            exec: Execution::default(),
        }
    }

    pub fn threshold(&self) -> ChaosThreshold {
        ChaosThreshold {
            steps: self.spec.steps,
            digits: self.min_digits,
        }
    }
}

impl Default for ScanConfig<1> {
    /// `T = 10⁵`, `D_T = 9`.
    fn default() -> Self {
        Self::with_steps(ChaosThreshold::CIRCLE.steps)
    }
}

impl Default for ScanConfig<2> {
    /// `T = 10⁶`, `D_T = 9`.
    fn default() -> Self {
        Self::with_steps(ChaosThreshold::TORUS.steps)
    }
}

/// `Ωᵢ = (i + γ/2)/n`, offset from the low-order rationals by a badly
/// approximable shift.
pub fn shifted_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5 * GOLDEN_MEAN) / n as f64).collect()
}

/// Evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn classify_circle(table: &WeightTable, params: CircleParams, cfg: &ScanConfig<1>) -> ScanRecord {
    let outcome = rotation_and_digits_with(table, &params, &cfg.spec)
        .and_then(|r| {
            let class = classify_rotation_number(&r, &cfg.threshold(), &cfg.farey)?;
            Ok(Outcome::Classified {
                rotation: Rotation::Circle(r),
                class,
            })
        })
        .unwrap_or_else(|e| Outcome::Failed(e.to_string()));
    ScanRecord {
        params: MapParams::Circle(params),
        outcome,
        lyapunov: None,
    }
}

/// Classifies a single two-torus orbit.
pub fn classify_torus(table: &WeightTable, params: Torus2Params, cfg: &ScanConfig<2>) -> ScanRecord {
    let outcome = rotation_and_digits_with(table, &params, &cfg.spec)
        .and_then(|r| {
            let class = classify_rotation_vector(&r, &cfg.threshold(), &cfg.farey, &cfg.resonance)?;
            Ok(Outcome::Classified {
                rotation: Rotation::Torus2(r),
                class,
            })
        })
        .unwrap_or_else(|e| Outcome::Failed(e.to_string()));
    let lyapunov = if cfg.lyapunov {
        lyapunov_spectrum(&params, &cfg.spec).ok()
    } else {
        None
    };
    ScanRecord {
        params: MapParams::Torus2(params),
        outcome,
        lyapunov,
    }
}

/// Circle-map sweep over `a_values × shifted_grid(n_omega)`, ordered by
/// `a` then `Ω`.
pub fn scan_circle(a_values: &[f64], n_omega: usize, cfg: &ScanConfig<1>) -> Result<Vec<ScanRecord>> {
    if n_omega == 0 {
        return Err(Error::invalid("n_omega must be at least 1"));
    }
    let grid = shifted_grid(n_omega);
    let params = a_values
        .iter()
        .flat_map(|&a| grid.iter().map(move |&w| CircleParams::new(w, a)))
        .collect::<Result<Vec<_>>>()?;
    let table = WeightTable::new(cfg.spec.steps)?;
    Ok(cfg.exec.map(params.len(), |i| classify_circle(&table, params[i], cfg)))
}

/// Two-torus sweep: `omega_samples` uniform drives, drawn once from `seed`,
/// crossed with every amplitude in `eps_values`. Ordered by `ε` then sample.
pub fn scan_torus_params(
    base: &Torus2Params,
    eps_values: &[f64],
    omega_samples: usize,
    seed: u64,
    cfg: &ScanConfig<2>,
) -> Result<Vec<ScanRecord>> {
    if omega_samples == 0 {
        return Err(Error::invalid("omega_samples must be at least 1"));
    }
    let drives: Vec<[f64; 2]> = map_uniform_samples(Execution::Sequential, omega_samples, seed, |w| w);
    scan_torus_drives(base, eps_values, &drives, cfg)
}

/// [`scan_torus_params`] for a catalogued case.
pub fn scan_torus(
    case_id: usize,
    eps_values: &[f64],
    omega_samples: usize,
    seed: u64,
    cfg: &ScanConfig<2>,
) -> Result<Vec<ScanRecord>> {
    scan_torus_params(&parameter_catalog(case_id)?, eps_values, omega_samples, seed, cfg)
}

/// Two-torus sweep over explicit drives.
pub fn scan_torus_drives(
    base: &Torus2Params,
    eps_values: &[f64],
    drives: &[[f64; 2]],
    cfg: &ScanConfig<2>,
) -> Result<Vec<ScanRecord>> {
    let params = eps_values
        .iter()
        .flat_map(|&e| drives.iter().map(move |&w| base.with_omega(w).and_then(|p| p.with_eps(e))))
        .collect::<Result<Vec<_>>>()?;
    let table = WeightTable::new(cfg.spec.steps)?;
    Ok(cfg.exec.map(params.len(), |i| classify_torus(&table, params[i], cfg)))
}

/// Slice with fixed `Ω₂ = omega2` and `Ω₁` on [`shifted_grid`].
pub fn scan_torus_slice(
    base: &Torus2Params,
    eps_values: &[f64],
    n_omega1: usize,
    omega2: f64,
    cfg: &ScanConfig<2>,
) -> Result<Vec<ScanRecord>> {
    let drives: Vec<[f64; 2]> = shifted_grid(n_omega1).into_iter().map(|w| [w, omega2]).collect();
    scan_torus_drives(base, eps_values, &drives, cfg)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub chaotic: usize,
    pub periodic: usize,
    pub resonant: usize,
    pub nonresonant: usize,
    pub failed: usize,
    /// Orbits with `dig_T = 16`.
    pub max_digits: usize,
}

/// Class fractions of a record set. `nonresonant` is the measure `μ` of
/// incommensurate (for circle maps: irrational) orbits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proportions {
    pub total: usize,
    pub counts: ClassCounts,
    pub chaotic: f64,
    pub periodic: f64,
    pub resonant: f64,
    pub nonresonant: f64,
    pub failed: f64,
    pub max_digits: f64,
}

impl Proportions {
    /// Nonresonant fraction.
    pub fn mu(&self) -> f64 {
        self.nonresonant
    }
}

/// Normalised class counts.
pub fn proportions(records: &[ScanRecord]) -> Result<Proportions> {
    if records.is_empty() {
        return Err(Error::invalid("no records to aggregate"));
    }
    let mut c = ClassCounts::default();
    for r in records {
        match &r.outcome {
            Outcome::Failed(_) => c.failed += 1,
            Outcome::Classified { rotation, class } => {
                if rotation.digits() >= crate::averaging::MAX_DIGITS {
                    c.max_digits += 1;
                }
                match class {
                    OrbitClass::Chaotic => c.chaotic += 1,
                    OrbitClass::Periodic(_) => c.periodic += 1,
                    OrbitClass::Resonant(_) => c.resonant += 1,
                    OrbitClass::Nonresonant(_) => c.nonresonant += 1,
                }
            }
        }
    }
    let n = records.len();
    let f = |k: usize| k as f64 / n as f64;
    Ok(Proportions {
        total: n,
        counts: c,
        chaotic: f(c.chaotic),
        periodic: f(c.periodic),
        resonant: f(c.resonant),
        nonresonant: f(c.nonresonant),
        failed: f(c.failed),
        max_digits: f(c.max_digits),
    })
}

/// Proportions for each distinct amplitude (`a` or `ε`), in order of first
/// appearance.
pub fn proportions_by_amplitude(records: &[ScanRecord]) -> Result<Vec<(f64, Proportions)>> {
    let mut keys: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<ScanRecord>> = Vec::new();
    for r in records {
        let a = r.params.amplitude();
        match keys.iter().position(|&k| k == a) {
            Some(i) => groups[i].push(r.clone()),
            None => {
                keys.push(a);
                groups.push(vec![r.clone()]);
            }
        }
    }
    keys.into_iter()
        .zip(groups)
        .map(|(k, g)| Ok((k, proportions(&g)?)))
        .collect()
}

/// Coefficients of `μ(a) = (1 − a)^(p₁ + p₂(1 − a))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub p1: f64,
    pub p2: f64,
    /// Root-mean-square error in `μ` (not `log μ`).
    pub rms: f64,
    pub points: usize,
}

impl FitResult {
    pub fn predict(&self, a: f64) -> f64 {
        let u = 1.0 - a;
        u.powf(self.p1 + self.p2 * u)
    }
}

/// Linear least squares of `ln μ` on `{ln(1−a), (1−a) ln(1−a)}` (or just
/// the first column when `two_term` is false). Points with `a ∉ (0,1)` or
/// `μ ≤ 0` are dropped first.
pub fn fit_power_law(points: &[(f64, f64)], two_term: bool) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(a, mu)| a > 0.0 && a < 1.0 && mu > 0.0 && mu.is_finite())
        .collect();
    let need = if two_term { 2 } else { 1 }.max(2);
    if usable.len() < need {
        return Err(Error::invalid(format!(
            "power-law fit needs at least {need} points with 0 < a < 1 and μ > 0, got {}",
            usable.len()
        )));
    }
    let cols: usize = if two_term { 2 } else { 1 };
    let rows: Vec<([f64; 2], f64)> = usable
        .iter()
        .map(|&(a, mu)| {
            let u = 1.0 - a;
            let l = u.ln();
            ([l, u * l], mu.ln())
        })
        .collect();

    // modified Gram-Schmidt QR on the design columns
    let mut q: Vec<Vec<f64>> = (0..cols).map(|j| rows.iter().map(|r| r.0[j]).collect()).collect();
    let mut r = [[0.0; 2]; 2];
    for j in 0..cols {
        for k in 0..j {
            let d: f64 = q[k].iter().zip(&q[j]).map(|(x, y)| x * y).sum();
            r[k][j] = d;
            let qk = q[k].clone();
            q[j].iter_mut().zip(&qk).for_each(|(x, y)| *x -= d * y);
        }
        let norm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::invalid("degenerate design matrix in power-law fit"));
        }
        r[j][j] = norm;
        q[j].iter_mut().for_each(|x| *x /= norm);
    }
    let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let qty: Vec<f64> = (0..cols).map(|j| q[j].iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
    let mut coef = [0.0; 2];
    for j in (0..cols).rev() {
        let tail: f64 = (j + 1..cols).map(|k| r[j][k] * coef[k]).sum();
        coef[j] = (qty[j] - tail) / r[j][j];
    }
    let mut fit = FitResult {
        p1: coef[0],
        p2: coef[1],
        rms: 0.0,
        points: usable.len(),
    };
    let sse: f64 = usable.iter().map(|&(a, mu)| (mu - fit.predict(a)).powi(2)).sum();
    fit.rms = (sse / usable.len() as f64).sqrt();
    Ok(fit)
}

/// `(a, μ(a))` pairs from a circle scan, keeping `a_min ≤ a ≤ a_max` and
/// `μ > 0`.
pub fn fit_points(records: &[ScanRecord], a_min: f64, a_max: f64) -> Result<Vec<(f64, f64)>> {
    Ok(proportions_by_amplitude(records)?
        .into_iter()
        .filter(|(a, p)| *a >= a_min && *a <= a_max && p.mu() > 0.0)
        .map(|(a, p)| (a, p.mu()))
        .collect())
}

/// Probability mass of `dig_T` per bin, with `dig_T = 16` in its own bin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitHistogram {
    /// `edges[i]..edges[i+1]` bounds bin `i`.
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
    /// Mass at `dig_T = 16`.
    pub terminal_mass: f64,
    pub mean_digits: f64,
    pub min_digits: f64,
    pub samples: usize,
}

impl DigitHistogram {
    /// Fraction of samples with `dig_T < cutoff`, `cutoff` a bin edge.
    pub fn mass_below(&self, cutoff: f64) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.mass)
            .filter(|(e, _)| e[1] <= cutoff + 1e-12)
            .map(|(_, m)| m)
            .sum()
    }
}

/// Histogram of `dig_T` over classified records.
pub fn histogram_digits(records: &[ScanRecord], bin_width: f64) -> Result<DigitHistogram> {
    if !(bin_width > 0.0) {
        return Err(Error::invalid(format!("bin width must be positive, got {bin_width}")));
    }
    let digits: Vec<f64> = records.iter().filter_map(|r| r.rotation()).map(|r| r.digits()).collect();
    if digits.is_empty() {
        return Err(Error::invalid("no classified records"));
    }
    let top = crate::averaging::MAX_DIGITS;
    let bins = (top / bin_width).ceil() as usize;
    let edges: Vec<f64> = (0..=bins).map(|i| (i as f64 * bin_width).min(top)).collect();
    let mut counts = vec![0usize; bins];
    let mut terminal = 0usize;
    for &d in &digits {
        if d >= top {
            terminal += 1;
        } else {
            let i = ((d.max(0.0) / bin_width).floor() as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    let n = digits.len() as f64;
    Ok(DigitHistogram {
        edges,
        mass: counts.iter().map(|&c| c as f64 / n).collect(),
        terminal_mass: terminal as f64 / n,
        mean_digits: digits.iter().sum::<f64>() / n,
        min_digits: digits.iter().copied().fold(f64::INFINITY, f64::min),
        samples: digits.len(),
    })
}
