//! Sparsity ratios and thresholded reconstructions for the quaternion
//! transform (Method B) and the componentwise scalar transform (Method A).
//!
//! Both studies stream the lattice twice: once for the largest magnitude,
//! once to count and rebuild with the small coefficients zeroed.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boostlet::{BoostletSystem, Cone, SpectralGeometry};
use crate::error::{QbtError, Result};
use crate::fft::Fft2;
use crate::field::{Grid, QField2D};
use crate::qbt::QbtEngine;
use crate::quat::Quaternion;
use crate::signals::reconstruction_snr_db;

/// (count above frac·max, total, count/total). Counts strictly greater entries.
pub fn sparsity_ratio(mags: &[f64], frac: f64) -> Result<(usize, usize, f64)> {
    check_fraction(frac)?;
    if mags.is_empty() {
        return Err(QbtError::EmptyArray);
    }
    let max = mags.iter().cloned().fold(0.0f64, f64::max);
    let thr = frac * max;
    let count = mags.iter().filter(|&&m| m > thr).count();
    Ok((count, mags.len(), count as f64 / mags.len() as f64))
}

fn check_fraction(frac: f64) -> Result<()> {
    if frac > 0.0 && frac < 1.0 {
        Ok(())
    } else {
        Err(QbtError::InvalidThreshold(frac))
    }
}

/// Scalar transform of f1 and f2 for one lattice cell.
pub struct ScalarCell {
    pub k: usize,
    pub weight: f64,
    pub near: Vec<f64>,
    pub far: Vec<f64>,
    /// [f1 near, f2 near, f1 far, f2 far]
    pub channels: [Vec<Complex64>; 4],
}

/// Componentwise scalar boostlet transform, swept cell by cell.
pub struct ScalarBtEngine<'a> {
    pub sys: &'a BoostletSystem,
    pub grid: Grid,
    fft: Fft2,
    geometry: SpectralGeometry,
    spectra: [Vec<Complex64>; 2],
    p: Complex64,
    delta: f64,
}

impl<'a> ScalarBtEngine<'a> {
    pub fn new(f: &QField2D, sys: &'a BoostletSystem) -> Result<Self> {
        if !sys.has_complex_window() {
            return Err(QbtError::QuaternionWindow);
        }
        let delta = sys.delta()?;
        let fft = Fft2::new(f.grid.ns, f.grid.nt);
        let (mut f1, mut f2) = f.split();
        fft.forward(&mut f1);
        fft.forward(&mut f2);
        Ok(ScalarBtEngine {
            sys,
            grid: f.grid,
            geometry: SpectralGeometry::new(f.grid),
            fft,
            spectra: [f1, f2],
            p: Complex64::new(sys.window.a, sys.window.b),
            delta,
        })
    }

    fn multipliers(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let (i, j) = self.sys.cell(k);
        let (c, a) = (self.sys.scales[i], self.sys.alphas[j]);
        let eval = |cone| {
            let mut w = self.sys.atom_spectrum(c, a, cone, &self.geometry).expect("positive scale");
            w.iter_mut().for_each(|x| *x *= c);
            w
        };
        (eval(Cone::NearField), eval(Cone::FarField))
    }

    fn apply(&self, s: &[Complex64], mult: &[f64], right: Complex64) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = s.iter().zip(mult).map(|(&x, &m)| x * m).collect();
        self.fft.inverse(&mut v);
        let scale = right / v.len() as f64;
        v.iter_mut().for_each(|x| *x *= scale);
        v
    }

    pub fn cell(&self, k: usize) -> ScalarCell {
        let (near, far) = self.multipliers(k);
        let [s1, s2] = &self.spectra;
        let pc = self.p.conj();
        let channels = [
            self.apply(s1, &near, pc),
            self.apply(s2, &near, pc),
            self.apply(s1, &far, self.p),
            self.apply(s2, &far, self.p),
        ];
        ScalarCell { k, weight: self.sys.haar_weight(self.sys.cell(k).0), near, far, channels }
    }

    pub fn fold_cells<T: Send>(&self, map: impl Fn(ScalarCell) -> T + Sync, mut reduce: impl FnMut(T)) {
        let n = self.sys.n_cells();
        let step = 8 * rayon::current_num_threads();
        let mut start = 0;
        while start < n {
            let end = (start + step).min(n);
            let out: Vec<T> = (start..end).into_par_iter().map(|k| map(self.cell(k))).collect();
            out.into_iter().for_each(&mut reduce);
            start = end;
        }
    }

    /// Per-component synthesis, joined back into a quaternion field.
    pub fn reconstruct_with(&self, edit: impl Fn(&mut ScalarCell) + Sync) -> QField2D {
        let len = self.grid.len();
        let mut acc = [vec![Complex64::new(0.0, 0.0); len], vec![Complex64::new(0.0, 0.0); len]];
        let (p, pc) = (self.p, self.p.conj());
        self.fold_cells(
            |mut cell| {
                edit(&mut cell);
                let spec = |v: &[Complex64], right: Complex64| {
                    let mut x: Vec<Complex64> = v.iter().map(|&z| z * right).collect();
                    self.fft.forward(&mut x);
                    x
                };
                let mut out = [Vec::new(), Vec::new()];
                for (comp, slot) in out.iter_mut().enumerate() {
                    let a = spec(&cell.channels[comp], p);
                    let b = spec(&cell.channels[comp + 2], pc);
                    *slot = a
                        .iter()
                        .zip(&b)
                        .zip(cell.near.iter().zip(&cell.far))
                        .map(|((&x, &y), (&wn, &wf))| (x * wn + y * wf) * cell.weight)
                        .collect::<Vec<_>>();
                }
                out
            },
            |terms| {
                for (a, t) in acc.iter_mut().zip(terms) {
                    a.iter_mut().zip(t).for_each(|(u, v)| *u += v);
                }
            },
        );
        let scale = 1.0 / (self.delta * len as f64);
        for a in acc.iter_mut() {
            self.fft.inverse(a);
            a.iter_mut().for_each(|z| *z *= scale);
        }
        QField2D::from_complex_pair(self.grid, &acc[0], &acc[1]).expect("same grid")
    }
}

/// Outcome of thresholding one method's coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOutcome {
    pub method: String,
    /// Coefficients with magnitude above the threshold.
    pub count: u64,
    /// Coefficients the method produces.
    pub total: u64,
    pub max_magnitude: f64,
    pub threshold: f64,
    /// 20·log10(‖F‖/‖F − F_thr‖) against the clean signal.
    pub reconstruction_snr_db: f64,
}

impl ThresholdOutcome {
    pub fn own_ratio(&self) -> f64 {
        self.count as f64 / self.total as f64
    }
}

/// Method B: one quaternion magnitude per (channel, cell, τ).
pub fn qbt_threshold_study(noisy: &QField2D, clean: &QField2D, sys: &BoostletSystem, frac: f64) -> Result<ThresholdOutcome> {
    check_fraction(frac)?;
    let engine = QbtEngine::new(noisy, sys)?;
    let mut max = 0.0f64;
    engine.fold_cells(
        |cell| cell.c1.values.iter().chain(&cell.c2.values).map(|q| q.norm()).fold(0.0f64, f64::max),
        |m| max = max.max(m),
    );
    let thr = frac * max;
    let count = AtomicU64::new(0);
    let rec = engine.reconstruct_with(|cell| {
        let mut kept = 0;
        for v in cell.c1.values.iter_mut().chain(cell.c2.values.iter_mut()) {
            if v.norm() > thr {
                kept += 1;
            } else {
                *v = Quaternion::ZERO;
            }
        }
        count.fetch_add(kept, Ordering::Relaxed);
    });
    Ok(ThresholdOutcome {
        method: "B".into(),
        count: count.into_inner(),
        total: 2 * (sys.n_cells() * noisy.grid.len()) as u64,
        max_magnitude: max,
        threshold: thr,
        reconstruction_snr_db: reconstruction_snr_db(clean, &rec),
    })
}

/// Method A: one complex magnitude per (component, channel, cell, τ).
pub fn scalar_threshold_study(noisy: &QField2D, clean: &QField2D, sys: &BoostletSystem, frac: f64) -> Result<ThresholdOutcome> {
    check_fraction(frac)?;
    let engine = ScalarBtEngine::new(noisy, sys)?;
    let mut max = 0.0f64;
    engine.fold_cells(
        |cell| cell.channels.iter().flatten().map(|z| z.norm()).fold(0.0f64, f64::max),
        |m| max = max.max(m),
    );
    let thr = frac * max;
    let count = AtomicU64::new(0);
    let rec = engine.reconstruct_with(|cell| {
        let mut kept = 0;
        for z in cell.channels.iter_mut().flatten() {
            if z.norm() > thr {
                kept += 1;
            } else {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        count.fetch_add(kept, Ordering::Relaxed);
    });
    Ok(ThresholdOutcome {
        method: "A".into(),
        count: count.into_inner(),
        total: 4 * (sys.n_cells() * noisy.grid.len()) as u64,
        max_magnitude: max,
        threshold: thr,
        reconstruction_snr_db: reconstruction_snr_db(clean, &rec),
    })
}

/// The comparison table. `ratio_*` share the quaternion coefficient count as
/// denominator; `ratio_a_per_component` divides Method A by its own count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityComparison {
    pub threshold_frac: f64,
    pub method_a: ThresholdOutcome,
    pub method_b: ThresholdOutcome,
    pub ratio_a: f64,
    pub ratio_a_per_component: f64,
    pub ratio_b: f64,
    /// 1 − ratio_b/ratio_a
    pub reduction: f64,
    pub snr_gain_db: f64,
}

pub fn compare_methods(noisy: &QField2D, clean: &QField2D, sys: &BoostletSystem, frac: f64) -> Result<SparsityComparison> {
    let b = qbt_threshold_study(noisy, clean, sys, frac)?;
    let a = scalar_threshold_study(noisy, clean, sys, frac)?;
    let denom = b.total as f64;
    let (ratio_a, ratio_b) = (a.count as f64 / denom, b.count as f64 / denom);
    Ok(SparsityComparison {
        threshold_frac: frac,
        ratio_a,
        ratio_a_per_component: a.own_ratio(),
        ratio_b,
        reduction: 1.0 - ratio_b / ratio_a,
        snr_gain_db: b.reconstruction_snr_db - a.reconstruction_snr_db,
        method_a: a,
        method_b: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boostlet::SystemConfig;
    use crate::qbt::{componentwise_scalar_bt, forward_qbt};
    use crate::signals::{make_gaussian_packet, PacketSpec};

    #[test]
    fn hand_counts() {
        let (c, t, r) = sparsity_ratio(&[1.0, 0.04, 0.06], 0.05).unwrap();
        assert_eq!((c, t), (2, 3));
        assert!((r - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(sparsity_ratio(&[0.3; 7], 0.05).unwrap().2, 1.0);
        assert!(matches!(sparsity_ratio(&[], 0.05), Err(QbtError::EmptyArray)));
        assert!(matches!(sparsity_ratio(&[1.0], 1.0), Err(QbtError::InvalidThreshold(_))));
        assert!(sparsity_ratio(&[1.0], 0.0).is_err());
    }

    fn setup() -> (QField2D, BoostletSystem) {
        let g = Grid::centered(32, 4.0).unwrap();
        let f = make_gaussian_packet(&PacketSpec { sigma: 0.7, ..PacketSpec::single_packet() }, g);
        let sys = BoostletSystem::admissible(SystemConfig::with_lattice(0.3, 3.0, 5, 2.0, 6)).unwrap();
        (f, sys)
    }

    #[test]
    fn streamed_scalar_cells_match_batch() {
        let (f, sys) = setup();
        let engine = ScalarBtEngine::new(&f, &sys).unwrap();
        let batch = componentwise_scalar_bt(&f, &sys).unwrap();
        for k in [0, 7, sys.n_cells() - 1] {
            let cell = engine.cell(k);
            let pairs = [&batch.f1.near[k], &batch.f2.near[k], &batch.f1.far[k], &batch.f2.far[k]];
            for (a, b) in cell.channels.iter().zip(pairs) {
                assert!(a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-14));
            }
        }
    }

    #[test]
    fn scalar_round_trip_matches_quaternion_round_trip() {
        let (f, sys) = setup();
        let a = ScalarBtEngine::new(&f, &sys).unwrap().reconstruct_with(|_| {});
        let b = QbtEngine::new(&f, &sys).unwrap().reconstruct_with(|_| {});
        assert!(a.rel_error(&b) < 1e-12);
    }

    #[test]
    fn studies_agree_with_direct_counts() {
        let (f, sys) = setup();
        let b = qbt_threshold_study(&f, &f, &sys, 0.05).unwrap();
        let coef = forward_qbt(&f, &sys).unwrap();
        let mags: Vec<f64> = coef.c1.iter().chain(&coef.c2).flat_map(|c| c.values.iter().map(|q| q.norm())).collect();
        let (count, total, _) = sparsity_ratio(&mags, 0.05).unwrap();
        assert_eq!((b.count as usize, b.total as usize), (count, total));
        let a = scalar_threshold_study(&f, &f, &sys, 0.05).unwrap();
        let bt = componentwise_scalar_bt(&f, &sys).unwrap();
        let mags: Vec<f64> = [&bt.f1, &bt.f2]
            .iter()
            .flat_map(|ch| ch.near.iter().chain(&ch.far))
            .flat_map(|v| v.iter().map(|z| z.norm()))
            .collect();
        let (count, total, _) = sparsity_ratio(&mags, 0.05).unwrap();
        assert_eq!((a.count as usize, a.total as usize), (count, total));
        assert_eq!(total, bt.count());
    }

    #[test]
    fn quaternion_window_rejected_for_method_a() {
        let (f, sys) = setup();
        let sys = sys.with_window(Quaternion::new(1.0, 0.0, 0.5, 0.0)).unwrap();
        assert!(matches!(ScalarBtEngine::new(&f, &sys), Err(QbtError::QuaternionWindow)));
    }
}
