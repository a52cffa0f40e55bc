//! Two-sided quaternion Fourier transform
//! F̂(ω) = Σ e^{−2πiω1 s} F(s, t) e^{−2πjω2 t} Δs Δt
//! and the matching convolutions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QbtError, Result};
use crate::fft::{circular_convolve, Fft2};
use crate::field::{Grid, QField2D};
use crate::quat::{cd_join, cd_split, ComplexPair, Quaternion};

/// Spectrum on the fast-transform lattice of `grid` (bin 0 is ω = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct QSpectrum2D {
    /// Geometry of the spatial grid the spectrum belongs to.
    pub grid: Grid,
    pub values: Vec<Quaternion>,
}

impl QSpectrum2D {
    pub fn zeros(grid: Grid) -> Self {
        QSpectrum2D { grid, values: vec![Quaternion::ZERO; grid.len()] }
    }

    #[inline]
    pub fn at(&self, p: usize, q: usize) -> Quaternion {
        self.values[self.grid.index(p, q)]
    }

    #[inline]
    pub fn freq(&self, p: usize, q: usize) -> (f64, f64) {
        (self.grid.w1(p), self.grid.w2(q))
    }

    pub fn step(&self) -> (f64, f64) {
        self.grid.freq_step()
    }

    /// Σ|F̂|² Δω1 Δω2
    pub fn energy(&self) -> f64 {
        let (a, b) = self.step();
        self.values.iter().map(|q| q.norm_sq()).sum::<f64>() * a * b
    }

    /// Bin with the largest |F̂|; ties resolve to the lowest index.
    pub fn peak_bin(&self) -> (usize, usize) {
        let mut best = (0, 0.0);
        for (i, q) in self.values.iter().enumerate() {
            let v = q.norm_sq();
            if v > best.1 {
                best = (i, v);
            }
        }
        (best.0 / self.grid.nt, best.0 % self.grid.nt)
    }

    /// Bin nearest to the frequency (w1, w2).
    pub fn nearest_bin(&self, w1: f64, w2: f64) -> (usize, usize) {
        let (d1, d2) = self.step();
        let wrap = |x: f64, n: usize| ((x.round() as i64).rem_euclid(n as i64)) as usize;
        (wrap(w1 / d1, self.grid.ns), wrap(w2 / d2, self.grid.nt))
    }

    pub fn rel_error(&self, reference: &QSpectrum2D) -> f64 {
        let num: f64 = self.values.iter().zip(&reference.values).map(|(&x, &y)| (x - y).norm_sq()).sum();
        let den: f64 = reference.values.iter().map(|q| q.norm_sq()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

/// Products u, u·j, i·u, i·u·j for u = 1, i, j, k as (component, sign).
/// Rows follow u; columns follow the cos-cos, cos-sin, sin-cos, sin-sin terms.
const RECOMBINATION: [[(usize, f64); 4]; 4] = [
    [(0, 1.0), (2, 1.0), (1, 1.0), (3, 1.0)],
    [(1, 1.0), (3, 1.0), (0, -1.0), (2, -1.0)],
    [(2, 1.0), (0, -1.0), (3, 1.0), (1, -1.0)],
    [(3, 1.0), (1, -1.0), (2, -1.0), (0, 1.0)],
];

/// Kernel signs of the four trigonometric terms.
const FORWARD_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];
const INVERSE_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, 1.0];

/// Reusable transform state for one grid geometry.
#[derive(Clone)]
pub struct QftPlan {
    grid: Grid,
    fft: Fft2,
    /// e^{−2πiω1 s0} per row bin
    left: Vec<Quaternion>,
    /// e^{−2πjω2 t0} per column bin
    right: Vec<Quaternion>,
}

impl QftPlan {
    pub fn new(grid: Grid) -> Self {
        let left = (0..grid.ns).map(|p| Quaternion::exp_i(-2.0 * PI * grid.w1(p) * grid.s0)).collect();
        let right = (0..grid.nt).map(|q| Quaternion::exp_j(-2.0 * PI * grid.w2(q) * grid.t0)).collect();
        QftPlan { grid, fft: Fft2::new(grid.ns, grid.nt), left, right }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    pub fn forward(&self, f: &QField2D) -> QSpectrum2D {
        assert!(self.grid.same_geometry(&f.grid), "plan built for another grid");
        let mut out = self.two_sided(&f.values, &FORWARD_SIGNS);
        let area = self.grid.cell_area();
        let nt = self.grid.nt;
        for (idx, v) in out.iter_mut().enumerate() {
            *v = self.left[idx / nt] * *v * self.right[idx % nt] * area;
        }
        QSpectrum2D { grid: self.grid, values: out }
    }

    pub fn inverse(&self, spec: &QSpectrum2D) -> QField2D {
        assert!(self.grid.same_geometry(&spec.grid), "plan built for another grid");
        let nt = self.grid.nt;
        let shifted: Vec<Quaternion> = spec
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| self.left[idx / nt].conj() * v * self.right[idx % nt].conj())
            .collect();
        let mut out = self.two_sided(&shifted, &INVERSE_SIGNS);
        let (d1, d2) = self.grid.freq_step();
        out.iter_mut().for_each(|v| *v *= d1 * d2);
        QField2D { grid: self.grid, values: out }
    }

    /// Σ e^{∓iA} x e^{∓jB} over the index lattice, A = 2πpm/ns, B = 2πqn/nt,
    /// assembled from one complex FFT per real component.
    fn two_sided(&self, vals: &[Quaternion], signs: &[f64; 4]) -> Vec<Quaternion> {
        let (ns, nt) = (self.grid.ns, self.grid.nt);
        let mut out = vec![[0.0f64; 4]; ns * nt];
        let mut buf = vec![Complex64::new(0.0, 0.0); ns * nt];
        for comp in 0..4 {
            let mut any = false;
            for (b, q) in buf.iter_mut().zip(vals) {
                let x = q.to_array()[comp];
                any |= x != 0.0;
                *b = Complex64::new(x, 0.0);
            }
            if !any {
                continue;
            }
            self.fft.forward(&mut buf);
            let row = &RECOMBINATION[comp];
            for p in 0..ns {
                for q in 0..nt {
                    let x = buf[p * nt + q];
                    let xm = buf[p * nt + (nt - q) % nt];
                    let terms = [
                        0.5 * (x.re + xm.re),
                        -0.5 * (x.im - xm.im),
                        -0.5 * (x.im + xm.im),
                        0.5 * (xm.re - x.re),
                    ];
                    let o = &mut out[p * nt + q];
                    for t in 0..4 {
                        let (target, sign) = row[t];
                        o[target] += sign * signs[t] * terms[t];
                    }
                }
            }
        }
        out.into_iter().map(Quaternion::from_array).collect()
    }
}

pub fn qft_forward(f: &QField2D) -> QSpectrum2D {
    QftPlan::new(f.grid).forward(f)
}

pub fn qft_inverse(s: &QSpectrum2D) -> QField2D {
    QftPlan::new(s.grid).inverse(s)
}

pub const BRUTE_FORCE_LIMIT: usize = 32;

/// Direct double sum of the transform definition, O(N⁴).
pub fn brute_force_qft(f: &QField2D) -> Result<QSpectrum2D> {
    let g = f.grid;
    if g.ns > BRUTE_FORCE_LIMIT || g.nt > BRUTE_FORCE_LIMIT {
        return Err(QbtError::GridTooLarge { ns: g.ns, nt: g.nt, limit: BRUTE_FORCE_LIMIT });
    }
    let mut out = QSpectrum2D::zeros(g);
    for p in 0..g.ns {
        let w1 = g.w1(p);
        for q in 0..g.nt {
            let w2 = g.w2(q);
            let mut acc = Quaternion::ZERO;
            for m in 0..g.ns {
                let left = Quaternion::exp_i(-2.0 * PI * w1 * g.s(m));
                for n in 0..g.nt {
                    let right = Quaternion::exp_j(-2.0 * PI * w2 * g.t(n));
                    acc += left * f.at(m, n) * right;
                }
            }
            out.values[g.index(p, q)] = acc * g.cell_area();
        }
    }
    Ok(out)
}

fn reversed_conj(z: &[Complex64], ns: usize, nt: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
    for m in 0..ns {
        for n in 0..nt {
            out[m * nt + n] = z[((ns - m) % ns) * nt + (nt - n) % nt].conj();
        }
    }
    out
}

/// Four-term Cayley–Dickson convolution
/// F⊛G = [f1∗g1 − (f̄2)ˇ∗g2] + j[(f̄1)ˇ∗g2 + f2∗g1],
/// with ∗ the circular convolution over index displacement weighted by Δs Δt.
pub fn qconvolve(f: &QField2D, g: &QField2D) -> Result<QField2D> {
    f.grid.check_same(&g.grid)?;
    let (ns, nt) = (f.grid.ns, f.grid.nt);
    let fft = Fft2::new(ns, nt);
    let (f1, f2) = f.split();
    let (g1, g2) = g.split();
    let area = f.grid.cell_area();
    let a = circular_convolve(&fft, &f1, &g1);
    let b = circular_convolve(&fft, &reversed_conj(&f2, ns, nt), &g2);
    let c = circular_convolve(&fft, &reversed_conj(&f1, ns, nt), &g2);
    let d = circular_convolve(&fft, &f2, &g1);
    let values = (0..f.grid.len())
        .map(|i| cd_join(ComplexPair { z1: (a[i] - b[i]) * area, z2: (c[i] + d[i]) * area }))
        .collect();
    Ok(QField2D { grid: f.grid, values })
}

/// F = F₊ + F₋ with F± = (F ± iFj)/2, so that iF±j = ±F±.
#[inline]
fn pm_split(q: Quaternion) -> (Quaternion, Quaternion) {
    let t = Quaternion::I * q * Quaternion::J;
    ((q + t) * 0.5, (q - t) * 0.5)
}

/// q = x + i·y with x, y in span{1, j}.
#[inline]
fn cj_split(q: Quaternion) -> (Quaternion, Quaternion) {
    (Quaternion::new(q.a, 0.0, q.c, 0.0), Quaternion::new(q.b, 0.0, q.d, 0.0))
}

/// Space-domain convolution whose two-sided transform is the pointwise
/// spectral product F̂·Ĝ on the grid lattice. Direct O(N⁴) summation.
///
/// With F± the ± parts of F and G± = x± + i·y±, the product F̂·Ĝ
/// decomposes into eight one-sided transforms whose spatial arguments are
/// sums or differences of the sample coordinates (mod the grid period).
/// Needs a grid origin that is a whole number of steps.
pub fn spectral_product_convolve(f: &QField2D, g: &QField2D) -> Result<QField2D> {
    f.grid.check_same(&g.grid)?;
    let grid = f.grid;
    let (os, ot) = grid
        .integer_origin()
        .ok_or_else(|| QbtError::InvalidGrid("origin is not a whole number of steps".into()))?;
    let (ns, nt) = (grid.ns as i64, grid.nt as i64);

    let fs: Vec<(Quaternion, Quaternion)> = f.values.iter().map(|&q| pm_split(q)).collect();
    // (x₊, i·y₊, x₋, i·y₋) per sample of G
    let gs: Vec<[Quaternion; 4]> = g
        .values
        .iter()
        .map(|&q| {
            let (gp, gm) = pm_split(q);
            let (xp, yp) = cj_split(gp);
            let (xm, ym) = cj_split(gm);
            [xp, Quaternion::I * yp, xm, Quaternion::I * ym]
        })
        .collect();

    #[derive(Clone, Copy)]
    enum Comb {
        Sum,
        Diff,
        RDiff,
    }
    let place = |c: Comb, a: i64, b: i64, o: i64, n: i64| -> usize {
        let k = match c {
            Comb::Sum => a + b + o,
            Comb::Diff => a - b - o,
            Comb::RDiff => b - a - o,
        };
        k.rem_euclid(n) as usize
    };
    use Comb::*;
    // (F part: 0 = plus, 1 = minus; G term; s rule; t rule)
    const TERMS: [(usize, usize, u8, u8); 8] = [
        (0, 0, 0, 0),
        (0, 1, 1, 2),
        (0, 2, 1, 0),
        (0, 3, 0, 2),
        (1, 0, 1, 0),
        (1, 1, 0, 2),
        (1, 2, 0, 0),
        (1, 3, 1, 2),
    ];
    let comb = |r: u8| match r {
        0 => Sum,
        1 => Diff,
        _ => RDiff,
    };

    let mut out = vec![Quaternion::ZERO; grid.len()];
    for m in 0..ns {
        for n in 0..nt {
            let (fp, fm) = fs[(m * nt + n) as usize];
            let fparts = [fp, fm];
            for m2 in 0..ns {
                for n2 in 0..nt {
                    let gparts = &gs[(m2 * nt + n2) as usize];
                    for &(fi, gi, sr, tr) in TERMS.iter() {
                        let ks = place(comb(sr), m, m2, os, ns);
                        let kt = place(comb(tr), n, n2, ot, nt);
                        out[ks * nt as usize + kt] += fparts[fi] * gparts[gi];
                    }
                }
            }
        }
    }
    let area = grid.cell_area();
    out.iter_mut().for_each(|v| *v *= area);
    Ok(QField2D { grid, values: out })
}

/// Pointwise product of two spectra, F̂·Ĝ.
pub fn spectral_product(a: &QSpectrum2D, b: &QSpectrum2D) -> Result<QSpectrum2D> {
    a.grid.check_same(&b.grid)?;
    let values = a.values.iter().zip(&b.values).map(|(&x, &y)| x * y).collect();
    Ok(QSpectrum2D { grid: a.grid, values })
}

/// Two-sided transform with the kernels swapped (j on the left, i on the right).
/// Only used to show that kernel placement matters.
pub fn swapped_kernel_qft(f: &QField2D) -> Result<QSpectrum2D> {
    let g = f.grid;
    if g.ns > BRUTE_FORCE_LIMIT || g.nt > BRUTE_FORCE_LIMIT {
        return Err(QbtError::GridTooLarge { ns: g.ns, nt: g.nt, limit: BRUTE_FORCE_LIMIT });
    }
    let mut out = QSpectrum2D::zeros(g);
    for p in 0..g.ns {
        for q in 0..g.nt {
            let mut acc = Quaternion::ZERO;
            for m in 0..g.ns {
                for n in 0..g.nt {
                    acc += Quaternion::exp_j(-2.0 * PI * g.w2(q) * g.t(n))
                        * f.at(m, n)
                        * Quaternion::exp_i(-2.0 * PI * g.w1(p) * g.s(m));
                }
            }
            out.values[g.index(p, q)] = acc * g.cell_area();
        }
    }
    Ok(out)
}

/// Split helper re-exported for callers that need f1, f2 of a spectrum.
pub fn split_spectrum(s: &QSpectrum2D) -> (Vec<Complex64>, Vec<Complex64>) {
    s.values
        .iter()
        .map(|&q| {
            let p = cd_split(q);
            (p.z1, p.z2)
        })
        .unzip()
}
