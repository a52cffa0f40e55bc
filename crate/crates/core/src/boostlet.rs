//! Hyperbolic frequency coordinates, mother-boostlet profiles and the
//! (scale, boost) lattice.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QbtError, Result};
use crate::field::Grid;
use crate::quat::Quaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cone {
    NearField,
    FarField,
    LightCone,
}

/// (ρ, η) on the near cone; (ρ, φ) on the far cone, stored in `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeCoords {
    pub cone: Cone,
    pub rho: f64,
    pub eta: f64,
}

const LIGHT_CONE_TOL: f64 = 1e-12;

pub fn classify_cone(w1: f64, w2: f64) -> ConeCoords {
    let (a1, a2) = (w1.abs(), w2.abs());
    let scale = a1.max(a2);
    if scale == 0.0 || (a1 - a2).abs() <= LIGHT_CONE_TOL * scale {
        return ConeCoords { cone: Cone::LightCone, rho: 0.0, eta: 0.0 };
    }
    let rho = ((a1 - a2).abs() * (a1 + a2)).sqrt();
    if a1 > a2 {
        ConeCoords { cone: Cone::NearField, rho, eta: (w2 / w1).atanh() }
    } else {
        ConeCoords { cone: Cone::FarField, rho, eta: (w1 / w2).atanh() }
    }
}

/// Inverse of [`classify_cone`]; `sign` is the sign of ω1 (near) or ω2 (far).
pub fn cone_to_frequency(coords: ConeCoords, sign: f64) -> (f64, f64) {
    let (r, e) = (coords.rho, coords.eta);
    match coords.cone {
        Cone::NearField => (sign * r * e.cosh(), sign * r * e.sinh()),
        Cone::FarField => (sign * r * e.sinh(), sign * r * e.cosh()),
        Cone::LightCone => (0.0, 0.0),
    }
}

/// M_{c,α}ᵀ ω = c·[[cosh α, −sinh α], [−sinh α, cosh α]]·ω.
/// On either cone this maps (ρ, η) to (cρ, η − α).
pub fn dilate_boost(c: f64, alpha: f64, w1: f64, w2: f64) -> (f64, f64) {
    let (ch, sh) = (alpha.cosh(), alpha.sinh());
    (c * (ch * w1 - sh * w2), c * (-sh * w1 + ch * w2))
}

/// Meyer auxiliary polynomial on [0, 1].
#[inline]
fn meyer_nu(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x.powi(4) * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
}

/// Meyer radial window on [lo, hi], rising to its maximum at √(lo·hi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeyerProfile {
    pub lo: f64,
    pub hi: f64,
    mid: f64,
    norm: f64,
}

impl MeyerProfile {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(QbtError::Config(format!("meyer band [{lo}, {hi}] must satisfy 0 < lo < hi")));
        }
        let mut p = MeyerProfile { lo, hi, mid: (lo * hi).sqrt(), norm: 1.0 };
        // ∫ψ² du/u in the log variable; the integrand is C³ so a fine midpoint rule is exact to ~1e-13.
        let n = 20_000;
        let (a, b) = (lo.ln(), hi.ln());
        let h = (b - a) / n as f64;
        let raw: f64 = (0..n).map(|i| p.raw((a + (i as f64 + 0.5) * h).exp()).powi(2)).sum::<f64>() * h;
        p.norm = raw.sqrt();
        Ok(p)
    }

    #[inline]
    fn raw(&self, u: f64) -> f64 {
        if u <= self.lo || u >= self.hi {
            0.0
        } else if u <= self.mid {
            (0.5 * PI * meyer_nu((u - self.lo) / (self.mid - self.lo))).sin()
        } else {
            (0.5 * PI * meyer_nu((u - self.mid) / (self.hi - self.mid))).cos()
        }
    }

    /// Normalized so that ∫ψ(u)² du/u = 1.
    #[inline]
    pub fn value(&self, u: f64) -> f64 {
        self.raw(u) / self.norm
    }

    pub fn peak(&self) -> f64 {
        self.mid
    }
}

fn default_meyer() -> &'static MeyerProfile {
    static P: OnceLock<MeyerProfile> = OnceLock::new();
    P.get_or_init(|| MeyerProfile::new(0.5, 2.0).expect("default band"))
}

/// Meyer profile on the default band [1/2, 2].
pub fn meyer_profile(u: f64) -> f64 {
    default_meyer().value(u)
}

/// ∫_{−1}^{1} exp(−2/(1 − x²)) dx
fn bump_base_integral() -> f64 {
    static K: OnceLock<f64> = OnceLock::new();
    *K.get_or_init(|| {
        // every derivative vanishes at ±1, so the trapezoid rule converges geometrically
        let n = 8192;
        let h = 2.0 / n as f64;
        (1..n)
            .map(|i| {
                let x = -1.0 + i as f64 * h;
                (-2.0 / (1.0 - x * x)).exp()
            })
            .sum::<f64>()
            * h
    })
}

#[inline]
fn bump_raw(theta: f64, delta: f64) -> f64 {
    let x = 2.0 * theta / delta;
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Even bump of full width δ with ∫b² dθ = 1.
#[inline]
pub fn bump_profile(theta: f64, delta: f64) -> f64 {
    bump_raw(theta, delta) / (0.5 * delta * bump_base_integral()).sqrt()
}

/// Mean of b² over a rapidity cell of width 2h, read off the tabulated
/// primitive G(θ) = ∫_{−∞}^{θ} b²: (G(θ + h) − G(θ − h))/2h. Summing it
/// over a uniform α lattice of step 2h telescopes, so a lattice that covers
/// the bump integrates b² exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RapidityCell {
    half: f64,
    lo: f64,
    step: f64,
    primitive: Vec<f64>,
}

impl RapidityCell {
    const INTERVALS: usize = 4096;

    pub fn new(delta: f64, cell_width: f64) -> Self {
        let n = Self::INTERVALS;
        let lo = -0.5 * delta;
        let step = delta / n as f64;
        let mut primitive = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let mut prev = 0.0;
        primitive.push(0.0);
        for i in 1..=n {
            let v = bump_profile(lo + step * i as f64, delta).powi(2);
            acc += 0.5 * (prev + v) * step;
            prev = v;
            primitive.push(acc);
        }
        let total = acc;
        primitive.iter_mut().for_each(|g| *g /= total);
        RapidityCell { half: 0.5 * cell_width, lo, step, primitive }
    }

    fn g(&self, theta: f64) -> f64 {
        let x = (theta - self.lo) / self.step;
        if x <= 0.0 {
            return 0.0;
        }
        let i = x.floor() as usize;
        if i >= Self::INTERVALS {
            return 1.0;
        }
        let f = x - i as f64;
        self.primitive[i] * (1.0 - f) + self.primitive[i + 1] * f
    }

    /// Cell mean of b² centred at θ.
    #[inline]
    pub fn mean_sq(&self, theta: f64) -> f64 {
        if theta.abs() >= -self.lo + self.half {
            return 0.0;
        }
        (self.g(theta + self.half) - self.g(theta - self.half)) / (2.0 * self.half)
    }
}

/// Lattice and profile parameters, also readable from `key = value` files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub meyer_lo: f64,
    pub meyer_hi: f64,
    pub bump_delta: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub n_c: usize,
    pub alpha_max: f64,
    pub n_alpha: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            meyer_lo: 0.5,
            meyer_hi: 2.0,
            bump_delta: 0.5,
            c_min: 0.3,
            c_max: 3.0,
            n_c: 20,
            alpha_max: 2.0,
            n_alpha: 20,
        }
    }
}

impl SystemConfig {
    pub fn with_lattice(c_min: f64, c_max: f64, n_c: usize, alpha_max: f64, n_alpha: usize) -> Self {
        SystemConfig { c_min, c_max, n_c, alpha_max, n_alpha, ..SystemConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(QbtError::Config(m));
        if !(self.bump_delta > 0.0 && self.bump_delta.is_finite()) {
            return bad(format!("bump_delta = {} must be positive", self.bump_delta));
        }
        if !(self.c_min > 0.0 && self.c_max > self.c_min && self.c_max.is_finite()) {
            return bad(format!("scale range [{}, {}] must satisfy 0 < c_min < c_max", self.c_min, self.c_max));
        }
        if self.n_c < 2 || self.n_alpha < 2 {
            return bad("n_c and n_alpha must both be at least 2".into());
        }
        if !(self.alpha_max > 0.0 && self.alpha_max.is_finite()) {
            return bad(format!("alpha_max = {} must be positive", self.alpha_max));
        }
        MeyerProfile::new(self.meyer_lo, self.meyer_hi).map(|_| ())
    }
}

/// Result of the admissibility quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub delta: f64,
    /// (max − min) / mean over the probes
    pub spread: f64,
    pub per_probe: Vec<f64>,
}

/// Eight probes, four per cone, away from the light cone.
pub const DEFAULT_PROBES: [(f64, f64); 8] = [
    (2.0, -1.8),
    (1.0, 0.3),
    (-1.5, 0.5),
    (0.8, -0.1),
    (0.3, 2.0),
    (-0.5, 1.2),
    (0.2, -0.9),
    (1.0, -3.0),
];

/// Sub-bin offsets (units of the bin width) used to average atoms over a
/// frequency cell; none lies on a diagonal, so light-cone bins get the mean
/// of their two halves. The set is closed under both axis reflections.
pub const CELL_OFFSETS: [(f64, f64); 8] = [
    (0.125, 0.375),
    (0.375, -0.125),
    (-0.125, -0.375),
    (-0.375, 0.125),
    (-0.125, 0.375),
    (-0.375, -0.125),
    (0.125, -0.375),
    (0.375, 0.125),
];

#[derive(Debug, Clone, PartialEq)]
pub struct BoostletSystem {
    pub config: SystemConfig,
    pub meyer: MeyerProfile,
    pub scales: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Constant quaternion p of the window p·φ; 1 for the shipped system.
    pub window: Quaternion,
    pub rapidity: RapidityCell,
    delta_const: Option<f64>,
    delta_spread: Option<f64>,
}

impl BoostletSystem {
    /// System without the admissibility constant; see [`BoostletSystem::admissible`].
    pub fn new(config: SystemConfig) -> Result<Self> {
        config.validate()?;
        let meyer = MeyerProfile::new(config.meyer_lo, config.meyer_hi)?;
        let lr = (config.c_max / config.c_min).ln() / (config.n_c - 1) as f64;
        let scales = (0..config.n_c).map(|i| config.c_min * (lr * i as f64).exp()).collect();
        let da = 2.0 * config.alpha_max / (config.n_alpha - 1) as f64;
        let alphas = (0..config.n_alpha)
            .map(|j| {
                let a = -config.alpha_max + da * j as f64;
                // the middle of an odd lattice is exactly zero
                if 2 * j + 1 == config.n_alpha {
                    0.0
                } else {
                    a
                }
            })
            .collect();
        let rapidity = RapidityCell::new(config.bump_delta, da);
        Ok(BoostletSystem { config, meyer, scales, alphas, window: Quaternion::ONE, rapidity, delta_const: None, delta_spread: None })
    }

    /// Builds the system and caches Δ from the default probes.
    pub fn admissible(config: SystemConfig) -> Result<Self> {
        let mut sys = BoostletSystem::new(config)?;
        sys.compute_admissibility(&DEFAULT_PROBES)?;
        Ok(sys)
    }

    pub fn with_window(mut self, p: Quaternion) -> Result<Self> {
        if p.norm_sq() == 0.0 {
            return Err(QbtError::ZeroDivisor);
        }
        self.window = p;
        if self.delta_const.is_some() {
            self.compute_admissibility(&DEFAULT_PROBES)?;
        }
        Ok(self)
    }

    pub fn compute_admissibility(&mut self, probes: &[(f64, f64)]) -> Result<Admissibility> {
        let adm = admissibility_delta(self, probes)?;
        self.delta_const = Some(adm.delta);
        self.delta_spread = Some(adm.spread);
        Ok(adm)
    }

    pub fn delta(&self) -> Result<f64> {
        self.delta_const.ok_or(QbtError::AdmissibilityNotComputed)
    }

    pub fn delta_spread(&self) -> Option<f64> {
        self.delta_spread
    }

    /// True when the window has no j or k part (φ2 = 0).
    pub fn has_complex_window(&self) -> bool {
        self.window.c == 0.0 && self.window.d == 0.0
    }

    pub fn n_cells(&self) -> usize {
        self.scales.len() * self.alphas.len()
    }

    /// Δ(ln c)
    pub fn log_scale_step(&self) -> f64 {
        (self.config.c_max / self.config.c_min).ln() / (self.config.n_c - 1) as f64
    }

    pub fn alpha_step(&self) -> f64 {
        2.0 * self.config.alpha_max / (self.config.n_alpha - 1) as f64
    }

    /// Δ(ln c)·c⁻²·Δα, the quadrature weight of dc dα / c³.
    pub fn haar_weight(&self, i: usize) -> f64 {
        self.log_scale_step() * self.alpha_step() / (self.scales[i] * self.scales[i])
    }

    /// Flattened cell index → (scale index, boost index).
    #[inline]
    pub fn cell(&self, k: usize) -> (usize, usize) {
        (k / self.alphas.len(), k % self.alphas.len())
    }

    #[inline]
    fn bump(&self, theta: f64) -> f64 {
        bump_profile(theta, self.config.bump_delta)
    }

    /// Mother spectrum ψ_M(ρ)·b(η) on the requested cone, zero elsewhere.
    pub fn mother_spectrum(&self, cone: Cone, w1: f64, w2: f64) -> f64 {
        let cc = classify_cone(w1, w2);
        if cc.cone != cone || cone == Cone::LightCone {
            return 0.0;
        }
        self.meyer.value(cc.rho) * self.bump(cc.eta)
    }

    /// Φ̂(M_{c,α}ᵀω) = ψ_M(cρ)·b(η − α) on the requested cone.
    pub fn atom_value(&self, c: f64, alpha: f64, cone: Cone, w1: f64, w2: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(QbtError::NonPositiveScale(c));
        }
        let cc = classify_cone(w1, w2);
        if cc.cone != cone || cone == Cone::LightCone {
            return Ok(0.0);
        }
        Ok(self.meyer.value(c * cc.rho) * self.bump(cc.eta - alpha))
    }

    /// Atom made even in each frequency axis by averaging the energy of
    /// the rapidity pair ±η: ψ_M(cρ)·√(½[b(η − α)² + b(−η − α)²]).
    pub fn atom_value_even(&self, c: f64, alpha: f64, cone: Cone, w1: f64, w2: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(QbtError::NonPositiveScale(c));
        }
        let cc = classify_cone(w1, w2);
        if cc.cone != cone || cone == Cone::LightCone {
            return Ok(0.0);
        }
        Ok(self.even_from_coords(c, alpha, cc.rho, cc.eta))
    }

    #[inline]
    fn even_from_coords(&self, c: f64, alpha: f64, rho: f64, eta: f64) -> f64 {
        let r = self.meyer.value(c * rho);
        if r == 0.0 {
            return 0.0;
        }
        let (b1, b2) = (self.bump(eta - alpha), self.bump(-eta - alpha));
        if b1 == 0.0 && b2 == 0.0 {
            return 0.0;
        }
        r * (0.5 * (b1 * b1 + b2 * b2)).sqrt()
    }

    #[inline]
    fn lattice_from_coords(&self, c: f64, alpha: f64, rho: f64, eta: f64) -> f64 {
        let r = self.meyer.value(c * rho);
        if r == 0.0 {
            return 0.0;
        }
        r * (0.5 * (self.rapidity.mean_sq(eta - alpha) + self.rapidity.mean_sq(-eta - alpha))).sqrt()
    }

    /// Even atom of one lattice cell, with b² replaced by its mean over the
    /// boost cell [α − Δα/2, α + Δα/2].
    pub fn lattice_atom_value(&self, c: f64, alpha: f64, cone: Cone, w1: f64, w2: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(QbtError::NonPositiveScale(c));
        }
        let cc = classify_cone(w1, w2);
        if cc.cone != cone || cone == Cone::LightCone {
            return Ok(0.0);
        }
        Ok(self.lattice_from_coords(c, alpha, cc.rho, cc.eta))
    }

    /// Grid sampling used by the transform: the root mean square of
    /// [`lattice_atom_value`] over the [`CELL_OFFSETS`] points of each bin.
    pub fn atom_spectrum(&self, c: f64, alpha: f64, cone: Cone, geometry: &SpectralGeometry) -> Result<Vec<f64>> {
        if !(c > 0.0) {
            return Err(QbtError::NonPositiveScale(c));
        }
        Ok(geometry.evaluate(self, c, alpha, cone, false))
    }

    /// Like [`atom_spectrum`](Self::atom_spectrum) but with the point
    /// rapidity profile of [`atom_value_even`], for (c, α) off the lattice.
    pub fn point_atom_spectrum(&self, c: f64, alpha: f64, cone: Cone, geometry: &SpectralGeometry) -> Result<Vec<f64>> {
        if !(c > 0.0) {
            return Err(QbtError::NonPositiveScale(c));
        }
        Ok(geometry.evaluate(self, c, alpha, cone, true))
    }
}

/// Per-bin cone coordinates of the cell sub-points, reused across atoms.
#[derive(Debug, Clone)]
pub struct SpectralGeometry {
    pub grid: Grid,
    points: Vec<[(Cone, f64, f64); 8]>,
}

impl SpectralGeometry {
    pub fn new(grid: Grid) -> Self {
        let (d1, d2) = grid.freq_step();
        let mut points = Vec::with_capacity(grid.len());
        for p in 0..grid.ns {
            let w1 = grid.w1(p);
            for q in 0..grid.nt {
                let w2 = grid.w2(q);
                let mut cell = [(Cone::LightCone, 0.0, 0.0); 8];
                for (slot, &(ox, oy)) in cell.iter_mut().zip(CELL_OFFSETS.iter()) {
                    let cc = classify_cone(w1 + ox * d1, w2 + oy * d2);
                    *slot = (cc.cone, cc.rho, cc.eta);
                }
                points.push(cell);
            }
        }
        SpectralGeometry { grid, points }
    }

    fn evaluate(&self, sys: &BoostletSystem, c: f64, alpha: f64, cone: Cone, point: bool) -> Vec<f64> {
        let (lo, hi) = (sys.meyer.lo, sys.meyer.hi);
        self.points
            .iter()
            .map(|cell| {
                let mut acc = 0.0;
                for &(k, rho, eta) in cell {
                    let u = c * rho;
                    if k != cone || u <= lo || u >= hi {
                        continue;
                    }
                    let v = if point {
                        sys.even_from_coords(c, alpha, rho, eta)
                    } else {
                        sys.lattice_from_coords(c, alpha, rho, eta)
                    };
                    acc += v * v;
                }
                (acc / 8.0).sqrt()
            })
            .collect()
    }
}

/// Δ(ω) = ∫∫|Φ̂(M_{c,α}ᵀω)|² dc/c dα + ∫∫|Φ̂*(M_{c,α}ᵀω)|² dc/c dα for each
/// probe, by midpoint quadrature over a (ln c, α) box that covers the
/// support; reports the mean and the relative spread.
pub fn admissibility_delta(sys: &BoostletSystem, probes: &[(f64, f64)]) -> Result<Admissibility> {
    let half = 0.5 * sys.config.bump_delta;
    let n = 600;
    let per_probe: Vec<f64> = probes
        .par_iter()
        .map(|&(w1, w2)| {
            let cc = classify_cone(w1, w2);
            if cc.cone == Cone::LightCone {
                return Err(QbtError::ProbeOnLightCone(w1, w2));
            }
            let (l0, l1) = ((sys.meyer.lo / cc.rho).ln(), (sys.meyer.hi / cc.rho).ln());
            let (a0, a1) = (cc.eta - half, cc.eta + half);
            let (hl, ha) = ((l1 - l0) / n as f64, (a1 - a0) / n as f64);
            let mut total = 0.0;
            for cone in [Cone::NearField, Cone::FarField] {
                for i in 0..n {
                    let c = (l0 + (i as f64 + 0.5) * hl).exp();
                    let mut row = 0.0;
                    for j in 0..n {
                        let a = a0 + (j as f64 + 0.5) * ha;
                        let v = sys.atom_value(c, a, cone, w1, w2)?;
                        row += v * v;
                    }
                    total += row;
                }
            }
            Ok(total * hl * ha * sys.window.norm_sq())
        })
        .collect::<Result<_>>()?;
    let mean = per_probe.iter().sum::<f64>() / per_probe.len().max(1) as f64;
    if !(mean.is_finite() && mean > 0.0) {
        return Err(QbtError::NonFiniteAdmissibility(mean));
    }
    let (lo, hi) = per_probe.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    Ok(Admissibility { delta: mean, spread: (hi - lo) / mean, per_probe })
}

/// The same constant after substituting u = cρ, β = η − α:
/// ∫ψ_M(u)² du/u · ∫b(β)² dβ · |p|², by Simpson's rule.
pub fn admissibility_substituted(sys: &BoostletSystem) -> f64 {
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let m = sys.meyer;
    let radial = simpson(&|u: f64| m.value(u).powi(2) / u, m.lo, m.hi, 10_000);
    let d = sys.config.bump_delta;
    let angular = simpson(&|t: f64| bump_profile(t, d).powi(2), -0.5 * d, 0.5 * d, 10_000);
    radial * angular * sys.window.norm_sq()
}
