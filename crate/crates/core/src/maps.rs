//! Circle and two-torus map families.
//!
//! Both families have the form `x ↦ x + Ω + g(x) mod 1` with `g` periodic.
//! Orbits are iterated on the torus (coordinates in `[0, 1)`), and the
//! rotation is accumulated from the per-step displacement `Ω + g(x)`, which
//! is the same on every lift.

use std::f64::consts::TAU;

use crate::config::KeyValues;
use crate::{Error, Result};

/// Initial point used when none is given.
pub const DEFAULT_X0: f64 = 0.117_789_164_297_101;

/// Iterates discarded before averaging starts.
pub const DEFAULT_TRANSIENT: usize = 500;

/// Reduces `x` to `[0, 1)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A degree-one map of the `D`-torus, `x ↦ x + drive + forcing(x)`.
pub trait TorusMap<const D: usize>: Sync {
    /// The constant drive `Ω`.
    fn drive(&self) -> [f64; D];

    /// The periodic nonlinearity `g(x)`; `x` must already lie in `[0,1)^D`.
    fn forcing(&self, x: &[f64; D]) -> [f64; D];

    /// `Ω + g(x)` for a point of the torus.
    fn displacement(&self, x: &[f64; D]) -> [f64; D] {
        let g = self.forcing(x);
        let w = self.drive();
        std::array::from_fn(|i| w[i] + g[i])
    }

    /// One step of the lift `F: R^D → R^D`.
    ///
    /// The integer part of each coordinate is split off, the step is taken
    /// from the reduced point, and the integer part is added back, so
    /// `F(x + m) = F(x) + m` holds bit for bit whenever `x + m` is exact.
    fn lift_step(&self, x: &[f64; D]) -> [f64; D] {
        let base: [f64; D] = std::array::from_fn(|i| x[i].floor());
        let reduced: [f64; D] = std::array::from_fn(|i| wrap(x[i] - base[i]));
        let d = self.displacement(&reduced);
        std::array::from_fn(|i| base[i] + (reduced[i] + d[i]))
    }

    /// One step on the torus.
    fn torus_step(&self, x: &[f64; D]) -> [f64; D] {
        let d = self.displacement(x);
        std::array::from_fn(|i| wrap(x[i] + d[i]))
    }
}

/// Arnold's circle map `x ↦ x + Ω + (a/2π) sin(2πx)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleParams {
    pub omega: f64,
    pub a: f64,
}

impl CircleParams {
    pub fn new(omega: f64, a: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&omega) {
            return Err(Error::invalid(format!("circle drive must lie in [0,1), got {omega}")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("circle amplitude must be finite and ≥ 0, got {a}")));
        }
        Ok(Self { omega, a })
    }

    /// Derivative of the lift at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        1.0 + self.a * (TAU * wrap(x)).cos()
    }
}

impl TorusMap<1> for CircleParams {
    fn drive(&self) -> [f64; 1] {
        [self.omega]
    }

    #[inline]
    fn forcing(&self, x: &[f64; 1]) -> [f64; 1] {
        [self.a / TAU * (TAU * x[0]).sin()]
    }
}

/// Two-torus map with single-harmonic forcing,
///
/// ```text
/// g₁ = ε/2π · (a₁ cos 2π(x₁+φ₁) + a₂ cos 2π(x₂+φ₂))
/// g₂ = ε/2π · (a₃ cos 2π(x₁+φ₃) + a₄ cos 2π(x₂+φ₄))
/// ```
///
/// with amplitudes normalised to `‖a‖₁ = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Torus2Params {
    pub omega: [f64; 2],
    pub eps: f64,
    pub amps: [f64; 4],
    pub phases: [f64; 4],
}

const AMP_NORM_TOL: f64 = 1e-12;

impl Torus2Params {
    /// Validates the parameters and reduces phases mod 1.
    pub fn new(omega: [f64; 2], eps: f64, amps: [f64; 4], phases: [f64; 4]) -> Result<Self> {
        for w in omega {
            if !(0.0..1.0).contains(&w) {
                return Err(Error::invalid(format!("drive components must lie in [0,1), got {w}")));
            }
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::invalid(format!("eps must be finite and ≥ 0, got {eps}")));
        }
        let norm: f64 = amps.iter().map(|a| a.abs()).sum();
        if (norm - 1.0).abs() > AMP_NORM_TOL {
            return Err(Error::invalid(format!("amplitudes must have unit 1-norm, got {norm}")));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("phases must be finite"));
        }
        Ok(Self {
            omega,
            eps,
            amps,
            phases: phases.map(wrap),
        })
    }

    pub fn with_eps(self, eps: f64) -> Result<Self> {
        Self::new(self.omega, eps, self.amps, self.phases)
    }

    pub fn with_omega(self, omega: [f64; 2]) -> Result<Self> {
        Self::new(omega, self.eps, self.amps, self.phases)
    }

    /// The matrix `H` with `Df = I + εH`:
    /// `H = -[[a₁ s(x₁+φ₁), a₂ s(x₂+φ₂)], [a₃ s(x₁+φ₃), a₄ s(x₂+φ₄)]]`, `s = sin 2π(·)`.
    pub fn h_matrix(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        let [a1, a2, a3, a4] = self.amps;
        let [p1, p2, p3, p4] = self.phases;
        let (x1, x2) = (wrap(x[0]), wrap(x[1]));
        let s = |y: f64| (TAU * wrap(y)).sin();
        [
            [-a1 * s(x1 + p1), -a2 * s(x2 + p2)],
            [-a3 * s(x1 + p3), -a4 * s(x2 + p4)],
        ]
    }

    /// `Df(x) = I + εH(x)`.
    pub fn jacobian(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        let h = self.h_matrix(x);
        let e = self.eps;
        [
            [1.0 + e * h[0][0], e * h[0][1]],
            [e * h[1][0], 1.0 + e * h[1][1]],
        ]
    }

    /// `det Df` at amplitude `eps` (overriding `self.eps`), evaluated as
    /// `ε² det H + ε tr H + 1`.
    pub fn det_jacobian_at(&self, eps: f64, x: &[f64; 2]) -> f64 {
        let h = self.h_matrix(x);
        let det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let tr_h = h[0][0] + h[1][1];
        eps * eps * det_h + eps * tr_h + 1.0
    }

    /// Writes the parameters as `key = value` lines.
    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("omega1", format!("{:?}", self.omega[0]));
        kv.set("omega2", format!("{:?}", self.omega[1]));
        kv.set("eps", format!("{:?}", self.eps));
        for i in 0..4 {
            kv.set(&format!("a{}", i + 1), format!("{:?}", self.amps[i]));
            kv.set(&format!("phi{}", i + 1), format!("{:?}", self.phases[i]));
        }
        kv
    }

    /// Reads parameters written by [`to_key_values`](Self::to_key_values).
    /// `omega1`, `omega2` and `eps` default to zero when absent.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let omega = [
            kv.parse_value("omega1")?.unwrap_or(0.0),
            kv.parse_value("omega2")?.unwrap_or(0.0),
        ];
        let eps = kv.parse_value("eps")?.unwrap_or(0.0);
        let mut amps = [0.0; 4];
        let mut phases = [0.0; 4];
        for i in 0..4 {
            amps[i] = kv.require(&format!("a{}", i + 1))?;
            phases[i] = kv.require(&format!("phi{}", i + 1))?;
        }
        Self::new(omega, eps, amps, phases)
    }
}

impl TorusMap<2> for Torus2Params {
    fn drive(&self) -> [f64; 2] {
        self.omega
    }

    #[inline]
    fn forcing(&self, x: &[f64; 2]) -> [f64; 2] {
        let [a1, a2, a3, a4] = self.amps;
        let [p1, p2, p3, p4] = self.phases;
        let c = |y: f64| (TAU * wrap(y)).cos();
        let k = self.eps / TAU;
        [
            k * (a1 * c(x[0] + p1) + a2 * c(x[1] + p2)),
            k * (a3 * c(x[0] + p3) + a4 * c(x[1] + p4)),
        ]
    }
}

const CATALOG: [([f64; 4], [f64; 4]); 8] = [
    (
        [0.221320306832860, 0.220593736048273, 0.152270586812051, 0.405815370306816],
        [0.369246781120215, 0.111202755293787, 0.780252068321138, 0.389738836961253],
    ),
    (
        [0.406588842221655, 0.062715680327705, 0.179066359898821, 0.351629117551819],
        [0.957506835434298, 0.964888535199277, 0.157613081677548, 0.970592781760616],
    ),
    (
        [0.211681398612178, 0.317651811580494, 0.375591536887180, 0.095075252920149],
        [0.273022072458714, 0.542430207288253, 0.431224181579691, 0.153093675447227],
    ),
    (
        [0.012536281513538, 0.465737538631897, 0.503609970119032, 0.018116209735533],
        [0.739790415703666, 0.023926884448995, 0.490328482174893, 0.304888898615625],
    ),
    (
        [0.760566444256527, 0.0, 0.0, 0.239433555743473],
        [0.739790415703666, 0.023926884448995, 0.490328482174893, 0.304888898615625],
    ),
    (
        [0.0, 0.760566444256527, 0.239433555743473, 0.0],
        [0.739790415703666, 0.02392688444899, 0.490328482174893, 0.304888898615625],
    ),
    (
        [0.007280035519179, 0.942703650246408, 0.039647117954398, 0.010369196280015],
        [0.384398913909761, 0.203897175276146, 0.913862879483257, 0.191420654770675],
    ),
    (
        [0.0, 0.352156017226267, 0.0, 0.647843982773733],
        [0.369246781120215, 0.111202755293787, 0.780252068321138, 0.389738836961253],
    ),
];

/// Number of catalogued amplitude/phase sets.
pub const CATALOG_LEN: usize = CATALOG.len();

/// Amplitudes and phases of a catalogued case, with `Ω = 0` and `ε = 0`.
///
/// Cases 0–3 are generic, 4 is uncoupled, 5 anti-coupled, 6 a weakly
/// coupled perturbation of a semidirect product, 7 a semidirect product.
pub fn parameter_catalog(case_id: usize) -> Result<Torus2Params> {
    let (amps, phases) = CATALOG
        .get(case_id)
        .ok_or_else(|| Error::invalid(format!("unknown case {case_id}; expected 0..{}", CATALOG_LEN - 1)))?;
    Torus2Params::new([0.0, 0.0], 0.0, *amps, *phases)
}

/// Initial point, transient length and averaging length of one orbit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitSpec<const D: usize> {
    pub x0: [f64; D],
    pub transient: usize,
    pub steps: usize,
}

impl<const D: usize> OrbitSpec<D> {
    pub fn new(x0: [f64; D], transient: usize, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("averaging length must be at least 1"));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("initial point must be finite"));
        }
        Ok(Self { x0, transient, steps })
    }

    /// Default initial point and transient with `steps` averaging iterates.
    pub fn with_steps(steps: usize) -> Self {
        Self {
            x0: [DEFAULT_X0; D],
            transient: DEFAULT_TRANSIENT,
            steps: steps.max(1),
        }
    }
}

/// Orbit state on the torus.
#[derive(Clone, Debug)]
pub struct Orbit<'m, M, const D: usize> {
    map: &'m M,
    x: [f64; D],
}

impl<'m, M: TorusMap<D>, const D: usize> Orbit<'m, M, D> {
    pub fn new(map: &'m M, x0: [f64; D]) -> Self {
        Self { map, x: x0.map(wrap) }
    }

    pub fn point(&self) -> [f64; D] {
        self.x
    }

    /// Returns `g(x_t)` and advances to `x_{t+1}`.
    #[inline]
    pub fn step_forcing(&mut self) -> [f64; D] {
        let g = self.map.forcing(&self.x);
        let w = self.map.drive();
        for i in 0..D {
            self.x[i] = wrap(self.x[i] + (w[i] + g[i]));
        }
        g
    }

    pub fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.step_forcing();
        }
    }
}

impl<M: TorusMap<D>, const D: usize> Iterator for Orbit<'_, M, D> {
    type Item = [f64; D];

    /// The displacement `F(x_t) − x_t = Ω + g(x_t)`.
    fn next(&mut self) -> Option<[f64; D]> {
        let w = self.map.drive();
        let g = self.step_forcing();
        Some(std::array::from_fn(|i| w[i] + g[i]))
    }
}

/// Discards `spec.transient` iterates, then yields exactly `spec.steps`
/// displacements `Ω + g(x_t)`.
pub fn iterate_displacements<'m, M: TorusMap<D>, const D: usize>(
    map: &'m M,
    spec: &OrbitSpec<D>,
) -> std::iter::Take<Orbit<'m, M, D>> {
    let mut orbit = Orbit::new(map, spec.x0);
    orbit.advance(spec.transient);
    orbit.take(spec.steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rigid_rotation_step() {
        let m = CircleParams::new(0.25, 0.0).unwrap();
        assert_eq!(m.lift_step(&[0.0]), [0.25]);
    }

    #[test]
    fn arnold_step_direct_evaluation() {
        let m = CircleParams::new(0.0, 1.0).unwrap();
        let y = m.lift_step(&[0.25])[0];
        assert!((y - (0.25 + 1.0 / TAU)).abs() < 1e-15);
        assert!((y - 0.409155).abs() < 1e-6);
    }

    #[test]
    fn zero_forcing_is_translation() {
        let p = parameter_catalog(0).unwrap().with_omega([0.3, 0.7]).unwrap();
        let x = [3.2, -1.7];
        let y = p.lift_step(&x);
        assert!((y[0] - 3.5).abs() < 1e-14 && (y[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn lift_commutes_with_integer_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = CircleParams::new(0.37, 1.7).unwrap();
        let t = parameter_catalog(2).unwrap().with_omega([0.11, 0.93]).unwrap().with_eps(3.1).unwrap();
        for _ in 0..500 {
            // dyadic points so that x + m is exact
            let x1 = (rng.gen_range(0..1u64 << 40) as f64) / (1u64 << 40) as f64;
            let x2 = (rng.gen_range(0..1u64 << 40) as f64) / (1u64 << 40) as f64;
            let m1 = rng.gen_range(-8..=8) as f64;
            let m2 = rng.gen_range(-8..=8) as f64;
            assert_eq!(c.lift_step(&[x1 + m1])[0], c.lift_step(&[x1])[0] + m1);
            let a = t.lift_step(&[x1 + m1, x2 + m2]);
            let b = t.lift_step(&[x1, x2]);
            assert_eq!(a, [b[0] + m1, b[1] + m2]);
        }
    }

    #[test]
    fn forcing_is_periodic() {
        let t = parameter_catalog(0).unwrap().with_eps(1.3).unwrap();
        let x = [0.3, 0.8];
        let g = t.forcing(&x);
        let g2 = t.forcing(&[wrap(x[0] + 5.0), wrap(x[1] - 3.0)]);
        assert!((g[0] - g2[0]).abs() < 1e-14 && (g[1] - g2[1]).abs() < 1e-14);
    }

    #[test]
    fn identity_jacobian_without_forcing() {
        let t = parameter_catalog(3).unwrap();
        let j = t.jacobian(&[0.4, 0.1]);
        assert_eq!(j, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(t.det_jacobian_at(0.0, &[0.4, 0.1]), 1.0);
    }

    #[test]
    fn determinant_identity_case0() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = parameter_catalog(0).unwrap().with_eps(1.7).unwrap();
        for _ in 0..100 {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            let j = t.jacobian(&x);
            let direct = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            assert!((direct - t.det_jacobian_at(1.7, &x)).abs() < 1e-13);
        }
    }

    #[test]
    fn catalog_rows() {
        let c0 = parameter_catalog(0).unwrap();
        assert_eq!(c0.amps[0], 0.221320306832860);
        assert_eq!(c0.phases[0], 0.369246781120215);
        let c4 = parameter_catalog(4).unwrap();
        assert_eq!((c4.amps[1], c4.amps[2]), (0.0, 0.0));
        assert_eq!(c4.amps[0], 0.760566444256527);
        let c7 = parameter_catalog(7).unwrap();
        assert_eq!((c7.amps[0], c7.amps[2]), (0.0, 0.0));
        for k in 0..CATALOG_LEN {
            let p = parameter_catalog(k).unwrap();
            let n: f64 = p.amps.iter().map(|a| a.abs()).sum();
            assert!((n - 1.0).abs() <= 1e-12, "case {k}");
        }
        assert!(matches!(parameter_catalog(8), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn invalid_parameters() {
        assert!(CircleParams::new(1.0, 0.5).is_err());
        assert!(CircleParams::new(0.5, -0.1).is_err());
        let c = parameter_catalog(0).unwrap();
        assert!(c.with_eps(-1.0).is_err());
        assert!(Torus2Params::new([0.1, 0.2], 1.0, [0.5, 0.5, 0.5, 0.0], c.phases).is_err());
        assert!(OrbitSpec::<1>::new([0.0], 0, 0).is_err());
    }

    #[test]
    fn phases_reduced() {
        let c = parameter_catalog(0).unwrap();
        let mut ph = c.phases;
        ph[2] += 3.0;
        let p = Torus2Params::new(c.omega, c.eps, c.amps, ph).unwrap();
        assert!((p.phases[2] - c.phases[2]).abs() < 1e-15);
    }

    #[test]
    fn key_value_round_trip() {
        for k in 0..CATALOG_LEN {
            let p = parameter_catalog(k)
                .unwrap()
                .with_omega([0.84, 0.835])
                .unwrap()
                .with_eps(0.8)
                .unwrap();
            let text = p.to_key_values().render();
            let back = Torus2Params::from_key_values(&KeyValues::parse(&text).unwrap()).unwrap();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn displacement_stream_lengths() {
        let m = CircleParams::new(0.3, 0.0).unwrap();
        let spec = OrbitSpec::new([0.1], 10, 1).unwrap();
        let v: Vec<_> = iterate_displacements(&m, &spec).collect();
        assert_eq!(v, vec![[0.3]]);
        let spec = OrbitSpec::new([0.1], 0, 50).unwrap();
        assert!(iterate_displacements(&m, &spec).all(|d| d == [0.3]));
        assert_eq!(iterate_displacements(&m, &spec).count(), 50);
    }

    #[test]
    fn displacements_telescope_on_the_lift() {
        let m = CircleParams::new(0.41, 0.8).unwrap();
        let spec = OrbitSpec::new([0.2], 37, 1000).unwrap();
        let mut start = Orbit::new(&m, spec.x0);
        start.advance(spec.transient);
        let x0 = start.point()[0];
        let total: f64 = iterate_displacements(&m, &spec).map(|d| d[0]).sum();
        let mut y = x0;
        for _ in 0..spec.steps {
            y = m.lift_step(&[y])[0];
        }
        assert!((total - (y - x0)).abs() < 1e-9, "{total} vs {}", y - x0);
    }

    #[test]
    fn wrap_stays_in_unit_interval() {
        assert_eq!(wrap(-1e-18), 0.0);
        assert_eq!(wrap(3.0), 0.0);
        assert!((wrap(-0.25) - 0.75).abs() < 1e-16);
    }
}
