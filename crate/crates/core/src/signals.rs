//! Test signals: modulated Gaussian packets with a quaternion coupling, and noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::boostlet::{classify_cone, Cone};
use crate::error::{QbtError, Result};
use crate::field::{Grid, QField2D};
use crate::qfourier::{qft_inverse, QSpectrum2D};
use crate::quat::Quaternion;

/// a·exp(−π‖μ − μ_n‖²/σ²)·e^{i2π(k s − ω t)}·coupling
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub amplitude: f64,
    pub centre: (f64, f64),
    pub sigma: f64,
    pub k: f64,
    pub omega: f64,
    pub coupling: Quaternion,
}

/// Temporal frequency of the single-packet example, moved just inside the
/// near cone (|ω| < k) so its spectrum avoids the light cone.
pub const SUBLUMINAL_OMEGA: f64 = 1.8;

impl PacketSpec {
    /// Unit Gaussian envelope at the origin, k = 2, ω = 1.8, coupling 1 + j; ‖F‖² = 1.
    pub fn single_packet() -> Self {
        PacketSpec {
            amplitude: 1.0,
            centre: (0.0, 0.0),
            sigma: 1.0,
            k: 2.0,
            omega: SUBLUMINAL_OMEGA,
            coupling: Quaternion::new(1.0, 0.0, 1.0, 0.0),
        }
    }

    /// Coupling 1 + j·r.
    pub fn with_ratio(mut self, r: f64) -> Self {
        self.coupling = Quaternion::new(1.0, 0.0, r, 0.0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(QbtError::Config(format!("packet width {} must be positive", self.sigma)));
        }
        if self.coupling.norm_sq() == 0.0 {
            return Err(QbtError::Config("packet coupling must be nonzero".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn value(&self, s: f64, t: f64) -> Quaternion {
        let (ds, dt) = (s - self.centre.0, t - self.centre.1);
        let env = self.amplitude * (-PI * (ds * ds + dt * dt) / (self.sigma * self.sigma)).exp();
        let g = Complex64::from_polar(env, 2.0 * PI * (self.k * s - self.omega * t));
        Quaternion::from_complex_i(g) * self.coupling
    }

    /// True if the grid spans at least 4σ on each side of the centre.
    pub fn fits(&self, grid: &Grid) -> bool {
        let reach = 4.0 * self.sigma;
        let s1 = grid.s(grid.ns - 1);
        let t1 = grid.t(grid.nt - 1);
        self.centre.0 - reach >= grid.s0 - 1e-12
            && self.centre.0 + reach <= s1 + grid.ds
            && self.centre.1 - reach >= grid.t0 - 1e-12
            && self.centre.1 + reach <= t1 + grid.dt
    }
}

/// Samples the packet. A grid narrower than ±4σ is accepted with a warning on stderr.
pub fn make_gaussian_packet(spec: &PacketSpec, grid: Grid) -> QField2D {
    if !spec.fits(&grid) {
        eprintln!("warning: grid does not cover 4 sigma around the packet centre");
    }
    QField2D::from_fn(grid, |s, t| spec.value(s, t))
}

/// Sum of packets sampled on one grid.
pub fn make_packet_sum(specs: &[PacketSpec], grid: Grid) -> QField2D {
    QField2D::from_fn(grid, |s, t| specs.iter().map(|p| p.value(s, t)).sum())
}

/// Packets with assorted wavenumbers, widths and couplings, all centred
/// away from the light cone so a wide lattice covers them.
pub fn generator_suite() -> Vec<PacketSpec> {
    let base = PacketSpec::single_packet();
    vec![
        base,
        PacketSpec { k: 2.0, omega: 1.0, sigma: 1.2, ..base },
        PacketSpec { k: 1.0, omega: 2.5, coupling: Quaternion::new(1.0, 0.5, 0.0, -0.7), ..base },
        PacketSpec { k: -2.5, omega: 1.2, sigma: 0.8, coupling: Quaternion::new(0.3, 0.0, 1.0, 0.4), ..base },
        PacketSpec { k: 1.5, omega: -0.5, centre: (0.5, -0.5), sigma: 1.0, ..base },
        PacketSpec { k: 0.6, omega: -2.0, sigma: 1.4, amplitude: 2.0, coupling: Quaternion::new(0.0, 1.0, 0.0, 1.0), ..base },
    ]
}

/// The two packets of the sparsity experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPacketConfig {
    pub first: PacketSpec,
    pub second: PacketSpec,
}

impl Default for TwoPacketConfig {
    fn default() -> Self {
        TwoPacketConfig {
            first: PacketSpec {
                amplitude: 1.0,
                centre: (1.0, 1.0),
                sigma: 0.5,
                k: 2.0,
                omega: 1.8,
                coupling: Quaternion::new(1.0, 0.0, 0.8, 0.0),
            },
            second: PacketSpec {
                amplitude: 0.6,
                centre: (-1.0, -1.0),
                sigma: 0.5,
                k: -2.0,
                omega: -1.8,
                coupling: Quaternion::new(1.0, 0.0, 1.2, 0.0),
            },
        }
    }
}

pub fn make_two_packet_signal(cfg: &TwoPacketConfig, grid: Grid) -> QField2D {
    make_packet_sum(&[cfg.first, cfg.second], grid)
}

/// Adds i.i.d. N(0, σ²) to all four components, with σ fixed so the
/// realized ratio 10·log10(‖F‖²/‖η‖²) equals `snr_db`. Noise comes from
/// ChaCha20 seeded with `seed_from_u64(seed)`, four normals per sample in
/// component order. An infinite SNR returns F unchanged.
pub fn add_quaternion_noise(f: &QField2D, snr_db: f64, seed: u64) -> Result<QField2D> {
    let (noisy, _) = add_quaternion_noise_parts(f, snr_db, seed)?;
    Ok(noisy)
}

/// Like [`add_quaternion_noise`], also returning the noise field.
pub fn add_quaternion_noise_parts(f: &QField2D, snr_db: f64, seed: u64) -> Result<(QField2D, QField2D)> {
    let signal: f64 = f.values.iter().map(|q| q.norm_sq()).sum();
    if signal == 0.0 {
        return Err(QbtError::ZeroSignal);
    }
    if snr_db == f64::INFINITY {
        return Ok((f.clone(), QField2D::zeros(f.grid)));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let raw: Vec<Quaternion> = (0..f.values.len()).map(|_| Quaternion::new(draw(), draw(), draw(), draw())).collect();
    let raw_energy: f64 = raw.iter().map(|q| q.norm_sq()).sum();
    let target = signal / 10f64.powf(snr_db / 10.0);
    let scale = (target / raw_energy).sqrt();
    let noise = QField2D { grid: f.grid, values: raw.iter().map(|&q| q * scale).collect() };
    let noisy = f.add(&noise)?;
    Ok((noisy, noise))
}

/// I.i.d. standard normal components, ChaCha20 seeded from `seed`.
pub fn random_field(grid: Grid, seed: u64) -> QField2D {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    QField2D::from_fn(grid, |_, _| Quaternion::new(draw(), draw(), draw(), draw()))
}

/// Random spectrum on the bins with hyperbolic radius in `rho` and
/// |rapidity| ≤ `eta_max` (either cone), brought back to space.
pub fn random_band_limited(grid: Grid, seed: u64, rho: (f64, f64), eta_max: f64) -> QField2D {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut spec = QSpectrum2D::zeros(grid);
    for p in 0..grid.ns {
        for q in 0..grid.nt {
            let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
            let v = Quaternion::new(draw(), draw(), draw(), draw());
            let cc = classify_cone(grid.w1(p), grid.w2(q));
            if cc.cone != Cone::LightCone && cc.rho >= rho.0 && cc.rho <= rho.1 && cc.eta.abs() <= eta_max {
                spec.values[p * grid.nt + q] = v;
            }
        }
    }
    qft_inverse(&spec)
}

/// 10·log10(‖F‖²/‖η‖²)
pub fn realized_snr_db(signal: &QField2D, noise: &QField2D) -> f64 {
    let s: f64 = signal.values.iter().map(|q| q.norm_sq()).sum();
    let n: f64 = noise.values.iter().map(|q| q.norm_sq()).sum();
    10.0 * (s / n).log10()
}

/// 20·log10(‖F‖/‖F − F_rec‖)
pub fn reconstruction_snr_db(reference: &QField2D, rec: &QField2D) -> f64 {
    -20.0 * rec.rel_error(reference).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_norm_sq;
    use crate::qfourier::qft_forward;

    #[test]
    fn band_limited_spectrum_stays_in_band() {
        let g = Grid::centered(32, 4.0).unwrap();
        let f = random_band_limited(g, 3, (0.8, 2.0), 1.0);
        let s = qft_forward(&f);
        for p in 0..32 {
            for q in 0..32 {
                let cc = classify_cone(g.w1(p), g.w2(q));
                let inside = cc.cone != Cone::LightCone && cc.rho >= 0.8 && cc.rho <= 2.0 && cc.eta.abs() <= 1.0;
                if !inside {
                    assert!(s.at(p, q).norm() < 1e-12);
                }
            }
        }
        assert!(f.norm_sq() > 0.0);
        assert_eq!(random_field(g, 9), random_field(g, 9));
    }

    #[test]
    fn single_packet_has_unit_norm() {
        let g = Grid::centered(128, 4.0).unwrap();
        let f = make_gaussian_packet(&PacketSpec::single_packet(), g);
        assert!((field_norm_sq(&f) - 1.0).abs() < 0.01);
    }

    #[test]
    fn zero_amplitude() {
        let g = Grid::centered(32, 4.0).unwrap();
        let spec = PacketSpec { amplitude: 0.0, ..PacketSpec::single_packet() };
        assert!(make_gaussian_packet(&spec, g).values.iter().all(|q| *q == Quaternion::ZERO));
    }

    #[test]
    fn coupling_sits_on_the_right() {
        let spec = PacketSpec::single_packet().with_ratio(0.8);
        let q = spec.value(0.3, -0.2);
        let g = Complex64::from_polar(
            (-PI * (0.09 + 0.04f64)).exp(),
            2.0 * PI * (2.0 * 0.3 - 1.8 * -0.2),
        );
        // g·(1 + 0.8j) = g + 0.8·j·ḡ
        let expect = Quaternion::from_complex_i(g) + Quaternion::J * Quaternion::from_complex_i(g.conj()) * 0.8;
        assert!((q - expect).max_abs() < 1e-15);
    }

    #[test]
    fn spectrum_peaks_at_wavenumber_pair() {
        let g = Grid::centered(128, 4.0).unwrap();
        let spec = PacketSpec { omega: 2.0, ..PacketSpec::single_packet() };
        let s = qft_forward(&make_gaussian_packet(&spec, g));
        let target = s.nearest_bin(2.0, -2.0);
        let peak = s.at(s.peak_bin().0, s.peak_bin().1).norm();
        assert!((s.at(target.0, target.1).norm() - peak).abs() < 1e-9 * peak);
    }

    #[test]
    fn second_amplitude_zero_reduces_to_one_packet() {
        let g = Grid::centered(64, 4.0).unwrap();
        let mut cfg = TwoPacketConfig::default();
        cfg.second.amplitude = 0.0;
        let two = make_two_packet_signal(&cfg, g);
        let one = make_gaussian_packet(&cfg.first, g);
        assert!(two.rel_error(&one) < 1e-15);
    }

    #[test]
    fn noise_hits_target_snr_and_is_deterministic() {
        let g = Grid::centered(64, 4.0).unwrap();
        let f = make_two_packet_signal(&TwoPacketConfig::default(), g);
        let (a, noise) = add_quaternion_noise_parts(&f, 10.0, 7).unwrap();
        assert!((realized_snr_db(&f, &noise) - 10.0).abs() < 0.1);
        let b = add_quaternion_noise(&f, 10.0, 7).unwrap();
        assert_eq!(a, b);
        let c = add_quaternion_noise(&f, 10.0, 8).unwrap();
        assert_ne!(a, c);
        assert_eq!(add_quaternion_noise(&f, f64::INFINITY, 1).unwrap(), f);
        assert!(add_quaternion_noise(&QField2D::zeros(g), 10.0, 1).is_err());
    }
}
