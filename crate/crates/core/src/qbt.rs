//! Forward and inverse quaternion boostlet transform.
//!
//! Channel C1 pairs F with the near-cone atom Φ_{c,α,τ}, channel C2 with the
//! far-cone companion Φ*_{c,α,τ}. With a window p·φ (φ real, even in both
//! axes) the coefficients are
//!   C1 = (F ∗ φ_{c,α}) p̄,  C2 = (F ∗ φ*_{c,α}) p,
//! evaluated in the frequency domain as c·W_{c,α}(ω)·F̂(ω).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boostlet::{BoostletSystem, Cone, SpectralGeometry, SystemConfig};
use crate::error::{QbtError, Result};
use crate::fft::Fft2;
use crate::field::{Grid, QField2D};
use crate::qfourier::{qconvolve, QSpectrum2D, QftPlan};
use crate::quat::{cd_join, qconj, ComplexPair, Quaternion};

/// Identifies the system a coefficient set came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemTag {
    pub config: SystemConfig,
    pub window: [f64; 4],
    pub delta: f64,
}

impl SystemTag {
    fn of(sys: &BoostletSystem) -> Result<Self> {
        Ok(SystemTag { config: sys.config, window: sys.window.to_array(), delta: sys.delta()? })
    }
}

#[derive(Debug, Clone)]
pub struct QbtCoefficients {
    pub grid: Grid,
    pub scales: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Haar weight per cell, indexed like `c1`.
    pub haar_weights: Vec<f64>,
    /// Near-cone channel per cell, cell k = i·n_alpha + j.
    pub c1: Vec<QField2D>,
    /// Far-cone channel per cell.
    pub c2: Vec<QField2D>,
    pub tag: SystemTag,
}

impl QbtCoefficients {
    pub fn n_cells(&self) -> usize {
        self.c1.len()
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        i * self.alphas.len() + j
    }

    pub fn delta(&self) -> f64 {
        self.tag.delta
    }

    /// Every |C| in channel-major, then cell, then τ order.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.c1.iter().chain(&self.c2).flat_map(|f| f.values.iter().map(|q| q.norm())).collect()
    }

    pub fn map_values(&self, f: impl Fn(Quaternion) -> Quaternion + Sync) -> Self {
        let apply = |v: &Vec<QField2D>| v.iter().map(|x| x.map(&f)).collect();
        QbtCoefficients { c1: apply(&self.c1), c2: apply(&self.c2), ..self.clone() }
    }
}

/// Coefficients and multipliers of one lattice cell.
pub struct CellCoefficients {
    pub k: usize,
    pub scale_index: usize,
    pub alpha_index: usize,
    pub c: f64,
    pub alpha: f64,
    pub weight: f64,
    /// c·W on the lattice, near and far.
    pub near: Vec<f64>,
    pub far: Vec<f64>,
    pub c1: QField2D,
    pub c2: QField2D,
}

/// Shared state for sweeping the lattice over one signal.
pub struct QbtEngine<'a> {
    pub sys: &'a BoostletSystem,
    pub plan: QftPlan,
    pub geometry: SpectralGeometry,
    pub spectrum: QSpectrum2D,
    delta: f64,
}

const CHUNK: usize = 8;

impl<'a> QbtEngine<'a> {
    pub fn new(f: &QField2D, sys: &'a BoostletSystem) -> Result<Self> {
        let delta = sys.delta()?;
        let plan = QftPlan::new(f.grid);
        let spectrum = plan.forward(f);
        Ok(QbtEngine { sys, geometry: SpectralGeometry::new(f.grid), spectrum, plan, delta })
    }

    pub fn grid(&self) -> Grid {
        self.spectrum.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// c·W_{c,α} on the lattice for both cones.
    pub fn multipliers(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let (i, j) = self.sys.cell(k);
        let (c, a) = (self.sys.scales[i], self.sys.alphas[j]);
        let eval = |cone| {
            let mut w = self.sys.atom_spectrum(c, a, cone, &self.geometry).expect("lattice scales are positive");
            w.iter_mut().for_each(|x| *x *= c);
            w
        };
        (eval(Cone::NearField), eval(Cone::FarField))
    }

    fn channel(&self, mult: &[f64], right: Quaternion) -> QField2D {
        let values = self.spectrum.values.iter().zip(mult).map(|(&s, &m)| s * m).collect();
        let field = self.plan.inverse(&QSpectrum2D { grid: self.grid(), values });
        if right == Quaternion::ONE {
            field
        } else {
            field.right_mul(right)
        }
    }

    pub fn cell(&self, k: usize) -> CellCoefficients {
        let (i, j) = self.sys.cell(k);
        let (near, far) = self.multipliers(k);
        let p = self.sys.window;
        let c1 = self.channel(&near, qconj(p));
        let c2 = self.channel(&far, p);
        CellCoefficients {
            k,
            scale_index: i,
            alpha_index: j,
            c: self.sys.scales[i],
            alpha: self.sys.alphas[j],
            weight: self.sys.haar_weight(i),
            near,
            far,
            c1,
            c2,
        }
    }

    /// Both channels at an arbitrary (c, α) with the point atom.
    pub fn probe(&self, c: f64, alpha: f64) -> Result<(QField2D, QField2D)> {
        let eval = |cone| -> Result<Vec<f64>> {
            let mut w = self.sys.point_atom_spectrum(c, alpha, cone, &self.geometry)?;
            w.iter_mut().for_each(|x| *x *= c);
            Ok(w)
        };
        let p = self.sys.window;
        Ok((self.channel(&eval(Cone::NearField)?, qconj(p)), self.channel(&eval(Cone::FarField)?, p)))
    }

    /// Maps every cell in parallel and hands the results to `reduce` in
    /// lattice order, so reductions are run-to-run identical.
    pub fn fold_cells<T: Send>(&self, map: impl Fn(CellCoefficients) -> T + Sync, mut reduce: impl FnMut(T)) {
        let n = self.sys.n_cells();
        let mut start = 0;
        while start < n {
            let end = (start + CHUNK * rayon::current_num_threads()).min(n);
            let out: Vec<T> = (start..end).into_par_iter().map(|k| map(self.cell(k))).collect();
            out.into_iter().for_each(&mut reduce);
            start = end;
        }
    }

    /// Spectrum of one cell's synthesis term c·[QFT(C1·p)·W + QFT(C2·p̄)·W*], unweighted.
    pub fn synthesis_term(&self, near: &[f64], far: &[f64], c1: &QField2D, c2: &QField2D) -> Vec<Quaternion> {
        let p = self.sys.window;
        let s1 = if p == Quaternion::ONE { self.plan.forward(c1) } else { self.plan.forward(&c1.right_mul(p)) };
        let s2 = if p == Quaternion::ONE { self.plan.forward(c2) } else { self.plan.forward(&c2.right_mul(qconj(p))) };
        s1.values
            .iter()
            .zip(&s2.values)
            .zip(near.iter().zip(far))
            .map(|((&a, &b), (&wn, &wf))| a * wn + b * wf)
            .collect()
    }

    /// Σ w·(|C1|² + |C2|²)·Δs·Δt streamed over the lattice.
    pub fn energy(&self) -> f64 {
        let area = self.grid().cell_area();
        let mut total = 0.0;
        self.fold_cells(
            |cell| cell.weight * (sq_sum(&cell.c1) + sq_sum(&cell.c2)) * area,
            |e| total += e,
        );
        total
    }

    /// Inverse transform of coefficients transformed per cell by `edit`
    /// before synthesis; `edit` = identity gives the plain round trip.
    pub fn reconstruct_with(&self, edit: impl Fn(&mut CellCoefficients) + Sync) -> QField2D {
        let grid = self.grid();
        let mut acc = vec![Quaternion::ZERO; grid.len()];
        self.fold_cells(
            |mut cell| {
                edit(&mut cell);
                let mut term = self.synthesis_term(&cell.near, &cell.far, &cell.c1, &cell.c2);
                term.iter_mut().for_each(|v| *v *= cell.weight);
                term
            },
            |term| acc.iter_mut().zip(term).for_each(|(a, t)| *a += t),
        );
        acc.iter_mut().for_each(|v| *v *= 1.0 / self.delta);
        self.plan.inverse(&QSpectrum2D { grid, values: acc })
    }

    /// Σ_{cells} w·c²·W²·|p|² / Δ on the lattice: the transfer function of
    /// analysis followed by synthesis (ideally 1).
    pub fn calderon_sum(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.grid().len()];
        let n = self.sys.n_cells();
        let mut start = 0;
        while start < n {
            let end = (start + CHUNK * rayon::current_num_threads()).min(n);
            let parts: Vec<Vec<f64>> = (start..end)
                .into_par_iter()
                .map(|k| {
                    let (near, far) = self.multipliers(k);
                    let w = self.sys.haar_weight(self.sys.cell(k).0);
                    near.iter().zip(&far).map(|(a, b)| w * (a * a + b * b)).collect()
                })
                .collect();
            for p in parts {
                acc.iter_mut().zip(p).for_each(|(a, v)| *a += v);
            }
            start = end;
        }
        // Δ already carries the |p|² of the window
        let gain = self.sys.window.norm_sq() / self.delta;
        acc.iter_mut().for_each(|a| *a *= gain);
        acc
    }

    /// Fraction of Σ|F̂|² on bins inside the union of the lattice atom supports.
    pub fn coverage(&self) -> f64 {
        self.weighted_share(&self.calderon_sum(), |d| if d > 0.0 { 1.0 } else { 0.0 })
    }

    /// Σ|F̂|²·min(D, 1)/Σ|F̂|², with D the [`calderon_sum`](Self::calderon_sum):
    /// the share of the energy the lattice actually returns.
    pub fn captured_fraction(&self) -> f64 {
        self.weighted_share(&self.calderon_sum(), |d| d.min(1.0))
    }

    /// Both diagnostics from one lattice sweep: (coverage, captured fraction).
    pub fn coverage_report(&self) -> (f64, f64) {
        let d = self.calderon_sum();
        (self.weighted_share(&d, |v| if v > 0.0 { 1.0 } else { 0.0 }), self.weighted_share(&d, |v| v.min(1.0)))
    }

    fn weighted_share(&self, d: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        let total: f64 = self.spectrum.values.iter().map(|q| q.norm_sq()).sum();
        if total == 0.0 {
            return 0.0;
        }
        self.spectrum.values.iter().zip(d).map(|(q, &v)| q.norm_sq() * g(v)).sum::<f64>() / total
    }
}

fn sq_sum(f: &QField2D) -> f64 {
    f.values.iter().map(|q| q.norm_sq()).sum()
}

/// All coefficients on the system lattice.
pub fn forward_qbt(f: &QField2D, sys: &BoostletSystem) -> Result<QbtCoefficients> {
    let engine = QbtEngine::new(f, sys)?;
    let n = sys.n_cells();
    let mut c1 = Vec::with_capacity(n);
    let mut c2 = Vec::with_capacity(n);
    engine.fold_cells(
        |cell| (cell.c1, cell.c2),
        |(a, b)| {
            c1.push(a);
            c2.push(b);
        },
    );
    Ok(QbtCoefficients {
        grid: f.grid,
        scales: sys.scales.clone(),
        alphas: sys.alphas.clone(),
        haar_weights: (0..n).map(|k| sys.haar_weight(sys.cell(k).0)).collect(),
        c1,
        c2,
        tag: SystemTag::of(sys)?,
    })
}

/// F_R = (1/Δ)·Σ w·c·[Ĉ1·Φ̂ + Ĉ2·Φ̂*](M_{c,α}ᵀω), back in space.
pub fn inverse_qbt(coef: &QbtCoefficients, sys: &BoostletSystem) -> Result<QField2D> {
    if SystemTag::of(sys)? != coef.tag {
        return Err(QbtError::SystemMismatch);
    }
    let grid = coef.grid;
    let zero = QField2D::zeros(grid);
    let engine = QbtEngine::new(&zero, sys)?;
    let n = coef.n_cells();
    let parts: Vec<Vec<Quaternion>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let (near, far) = engine.multipliers(k);
            let mut t = engine.synthesis_term(&near, &far, &coef.c1[k], &coef.c2[k]);
            let w = coef.haar_weights[k];
            t.iter_mut().for_each(|v| *v *= w);
            t
        })
        .collect();
    let mut acc = vec![Quaternion::ZERO; grid.len()];
    for p in parts {
        acc.iter_mut().zip(p).for_each(|(a, v)| *a += v);
    }
    let inv = 1.0 / coef.delta();
    acc.iter_mut().for_each(|v| *v *= inv);
    Ok(engine.plan.inverse(&QSpectrum2D { grid, values: acc }))
}

/// Σ_{cells} w Σ_τ (|C1|² + |C2|²) Δs Δt
pub fn transform_energy(coef: &QbtCoefficients) -> f64 {
    let area = coef.grid.cell_area();
    (0..coef.n_cells())
        .map(|k| coef.haar_weights[k] * (sq_sum(&coef.c1[k]) + sq_sum(&coef.c2[k])) * area)
        .sum()
}

/// transform energy / (Δ·‖F‖²), streamed.
pub fn plancherel_ratio(f: &QField2D, sys: &BoostletSystem) -> Result<f64> {
    let norm = f.norm_sq();
    if norm == 0.0 {
        return Err(QbtError::ZeroSignal);
    }
    let engine = QbtEngine::new(f, sys)?;
    Ok(engine.energy() / (engine.delta() * norm))
}

/// Scalar boostlet coefficients of one complex component, per cell.
#[derive(Debug, Clone)]
pub struct ScalarChannels {
    pub near: Vec<Vec<Complex64>>,
    pub far: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone)]
pub struct ComponentwiseBt {
    pub grid: Grid,
    pub f1: ScalarChannels,
    pub f2: ScalarChannels,
}

impl ComponentwiseBt {
    pub fn count(&self) -> usize {
        [&self.f1, &self.f2].iter().map(|ch| ch.near.iter().chain(&ch.far).map(Vec::len).sum::<usize>()).sum()
    }

    /// Rebuilds quaternion channels C = B f1 + j·B f2 for one cell.
    pub fn joined(&self, k: usize) -> (QField2D, QField2D) {
        let join = |a: &[Complex64], b: &[Complex64]| QField2D {
            grid: self.grid,
            values: a.iter().zip(b).map(|(&z1, &z2)| cd_join(ComplexPair { z1, z2 })).collect(),
        };
        (join(&self.f1.near[k], &self.f2.near[k]), join(&self.f1.far[k], &self.f2.far[k]))
    }
}

/// Scalar (complex) boostlet transform applied to f1 and f2 separately,
/// using ordinary complex FFTs. Needs a window without j or k part.
pub fn componentwise_scalar_bt(f: &QField2D, sys: &BoostletSystem) -> Result<ComponentwiseBt> {
    if !sys.has_complex_window() {
        return Err(QbtError::QuaternionWindow);
    }
    let geometry = SpectralGeometry::new(f.grid);
    let fft = Fft2::new(f.grid.ns, f.grid.nt);
    let (f1, f2) = f.split();
    let spec = |z: &[Complex64]| {
        let mut v = z.to_vec();
        fft.forward(&mut v);
        v
    };
    let (s1, s2) = (spec(&f1), spec(&f2));
    let p = Complex64::new(sys.window.a, sys.window.b);
    let scale = 1.0 / f.grid.len() as f64;
    let apply = |s: &[Complex64], mult: &[f64], right: Complex64| {
        let mut v: Vec<Complex64> = s.iter().zip(mult).map(|(&x, &m)| x * m).collect();
        fft.inverse(&mut v);
        v.iter_mut().for_each(|x| *x *= scale * right);
        v
    };
    let n = sys.n_cells();
    let cells: Vec<_> = (0..n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = sys.cell(k);
            let (c, a) = (sys.scales[i], sys.alphas[j]);
            let mult = |cone| {
                let mut w = sys.atom_spectrum(c, a, cone, &geometry).expect("positive scale");
                w.iter_mut().for_each(|x| *x *= c);
                w
            };
            let (wn, wf) = (mult(Cone::NearField), mult(Cone::FarField));
            (
                apply(&s1, &wn, p.conj()),
                apply(&s2, &wn, p.conj()),
                apply(&s1, &wf, p),
                apply(&s2, &wf, p),
            )
        })
        .collect();
    let mut out = ComponentwiseBt {
        grid: f.grid,
        f1: ScalarChannels { near: Vec::with_capacity(n), far: Vec::with_capacity(n) },
        f2: ScalarChannels { near: Vec::with_capacity(n), far: Vec::with_capacity(n) },
    };
    for (a, b, c, d) in cells {
        out.f1.near.push(a);
        out.f2.near.push(b);
        out.f1.far.push(c);
        out.f2.far.push(d);
    }
    Ok(out)
}

/// Spatial atoms Φ_{c,α,0} = p·φ and Φ*_{c,α,0} = p̄·φ* sampled at index
/// displacements (index k ↔ displacement k·h, wrapped).
pub fn spatial_atoms(sys: &BoostletSystem, grid: Grid, k: usize) -> Result<(QField2D, QField2D)> {
    let zero_origin = Grid::new(grid.ns, grid.nt, 0.0, 0.0, grid.ds, grid.dt)?;
    let geometry = SpectralGeometry::new(grid);
    let (i, j) = sys.cell(k);
    let (c, a) = (sys.scales[i], sys.alphas[j]);
    let plan = QftPlan::new(zero_origin);
    let atom = |cone, unit: Quaternion| -> Result<QField2D> {
        let w = sys.atom_spectrum(c, a, cone, &geometry)?;
        let values = w.iter().map(|&x| Quaternion::real(c * x)).collect();
        let phi = plan.inverse(&QSpectrum2D { grid: zero_origin, values });
        Ok(QField2D { grid, values: phi.values.iter().map(|&v| unit * v).collect() })
    };
    Ok((atom(Cone::NearField, sys.window)?, atom(Cone::FarField, qconj(sys.window))?))
}

/// Direct inner products ⟨F, Φ_{c,α,τ}⟩ and ⟨F, Φ*_{c,α,τ}⟩ for every τ on
/// the grid. O(N⁴) per cell; small grids only.
pub fn direct_qbt(f: &QField2D, sys: &BoostletSystem) -> Result<QbtCoefficients> {
    let grid = f.grid;
    let (ns, nt) = (grid.ns, grid.nt);
    let area = grid.cell_area();
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for k in 0..sys.n_cells() {
        let (phi, phi_star) = spatial_atoms(sys, grid, k)?;
        let inner = |atom: &QField2D| {
            let mut out = QField2D::zeros(grid);
            for tm in 0..ns {
                for tn in 0..nt {
                    let mut acc = Quaternion::ZERO;
                    for m in 0..ns {
                        for n in 0..nt {
                            let d = atom.at((m + ns - tm) % ns, (n + nt - tn) % nt);
                            acc += f.at(m, n) * d.conj();
                        }
                    }
                    out.values[grid.index(tm, tn)] = acc * area;
                }
            }
            out
        };
        c1.push(inner(&phi));
        c2.push(inner(&phi_star));
    }
    let n = sys.n_cells();
    Ok(QbtCoefficients {
        grid,
        scales: sys.scales.clone(),
        alphas: sys.alphas.clone(),
        haar_weights: (0..n).map(|k| sys.haar_weight(sys.cell(k).0)).collect(),
        c1,
        c2,
        tag: SystemTag::of(sys)?,
    })
}

/// Coefficients through the four-term convolution:
/// C1 = F ⊛ G1 with G1 = (φ̌̄1, φ2), C2 = F ⊛ G2 with G2 = (φ̌1, φ̌2),
/// where (φ1, φ2) are the split parts of the near and far atoms.
pub fn convolution_qbt(f: &QField2D, sys: &BoostletSystem) -> Result<QbtCoefficients> {
    let grid = f.grid;
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    let rev = |z: &[Complex64], conj: bool| -> Vec<Complex64> {
        let (ns, nt) = (grid.ns, grid.nt);
        let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
        for m in 0..ns {
            for n in 0..nt {
                let v = z[((ns - m) % ns) * nt + (nt - n) % nt];
                out[m * nt + n] = if conj { v.conj() } else { v };
            }
        }
        out
    };
    for k in 0..sys.n_cells() {
        let (phi, phi_star) = spatial_atoms(sys, grid, k)?;
        let (p1, p2) = phi.split();
        let g1 = QField2D::from_complex_pair(grid, &rev(&p1, true), &p2)?;
        c1.push(qconvolve(f, &g1)?);
        let (q1, q2) = phi_star.split();
        let g2 = QField2D::from_complex_pair(grid, &rev(&q1, false), &rev(&q2, false))?;
        c2.push(qconvolve(f, &g2)?);
    }
    let n = sys.n_cells();
    Ok(QbtCoefficients {
        grid,
        scales: sys.scales.clone(),
        alphas: sys.alphas.clone(),
        haar_weights: (0..n).map(|k| sys.haar_weight(sys.cell(k).0)).collect(),
        c1,
        c2,
        tag: SystemTag::of(sys)?,
    })
}

/// Largest relative difference between matching channels of two sets.
pub fn max_rel_diff(a: &QbtCoefficients, b: &QbtCoefficients) -> f64 {
    let num: f64 = a
        .c1
        .iter()
        .chain(&a.c2)
        .zip(b.c1.iter().chain(&b.c2))
        .map(|(x, y)| x.values.iter().zip(&y.values).map(|(&u, &v)| (u - v).norm_sq()).sum::<f64>())
        .sum();
    let den: f64 = b.c1.iter().chain(&b.c2).map(sq_sum).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
