//! Quaternion-valued fields on uniform 2-D space-time grids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QbtError, Result};
use crate::quat::{cd_split, Quaternion};

/// Uniform grid: sample (m, n) sits at (s0 + m·ds, t0 + n·dt).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub ns: usize,
    pub nt: usize,
    pub s0: f64,
    pub t0: f64,
    pub ds: f64,
    pub dt: f64,
}

impl Grid {
    pub fn new(ns: usize, nt: usize, s0: f64, t0: f64, ds: f64, dt: f64) -> Result<Self> {
        let g = Grid { ns, nt, s0, t0, ds, dt };
        g.validate()?;
        Ok(g)
    }

    /// n×n samples covering [−half_width, half_width) on both axes.
    pub fn centered(n: usize, half_width: f64) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        Grid::new(n, n, -half_width, -half_width, h, h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns < 2 || self.nt < 2 {
            return Err(QbtError::InvalidGrid(format!("shape {}x{} is below 2x2", self.ns, self.nt)));
        }
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.ds) || !ok(self.dt) {
            return Err(QbtError::InvalidGrid(format!("steps ({}, {}) must be finite and positive", self.ds, self.dt)));
        }
        if !self.s0.is_finite() || !self.t0.is_finite() {
            return Err(QbtError::InvalidGrid("origin is not finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ns * self.nt
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.ds * self.dt
    }

    #[inline]
    pub fn s(&self, m: usize) -> f64 {
        self.s0 + m as f64 * self.ds
    }

    #[inline]
    pub fn t(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    #[inline]
    pub fn index(&self, m: usize, n: usize) -> usize {
        m * self.nt + n
    }

    /// Same shape, origin and step, compared exactly.
    pub fn same_geometry(&self, o: &Grid) -> bool {
        self == o
    }

    pub fn check_same(&self, o: &Grid) -> Result<()> {
        if self.same_geometry(o) {
            Ok(())
        } else {
            Err(QbtError::ShapeMismatch(format!("{self:?} vs {o:?}")))
        }
    }

    /// Frequency of fast-transform bin p along an axis of n samples with step h.
    #[inline]
    pub fn bin_frequency(p: usize, n: usize, h: f64) -> f64 {
        let signed = if p <= (n - 1) / 2 { p as f64 } else { -((n - p) as f64) };
        signed / (n as f64 * h)
    }

    #[inline]
    pub fn w1(&self, p: usize) -> f64 {
        Grid::bin_frequency(p, self.ns, self.ds)
    }

    #[inline]
    pub fn w2(&self, q: usize) -> f64 {
        Grid::bin_frequency(q, self.nt, self.dt)
    }

    /// (Δω1, Δω2)
    pub fn freq_step(&self) -> (f64, f64) {
        (1.0 / (self.ns as f64 * self.ds), 1.0 / (self.nt as f64 * self.dt))
    }

    /// Origin offset in whole samples, when the origin lies on the lattice hΖ.
    pub fn integer_origin(&self) -> Option<(i64, i64)> {
        let snap = |x0: f64, h: f64| {
            let r = (x0 / h).round();
            ((x0 / h - r).abs() < 1e-9).then_some(r as i64)
        };
        Some((snap(self.s0, self.ds)?, snap(self.t0, self.dt)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QField2D {
    pub grid: Grid,
    pub values: Vec<Quaternion>,
}

impl QField2D {
    pub fn zeros(grid: Grid) -> Self {
        QField2D { values: vec![Quaternion::ZERO; grid.len()], grid }
    }

    pub fn from_values(grid: Grid, values: Vec<Quaternion>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(QbtError::ShapeMismatch(format!("{} values for a {}x{} grid", values.len(), grid.ns, grid.nt)));
        }
        Ok(QField2D { grid, values })
    }

    /// Samples f(s, t) at every grid point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> Quaternion) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for m in 0..grid.ns {
            let s = grid.s(m);
            for n in 0..grid.nt {
                values.push(f(s, grid.t(n)));
            }
        }
        QField2D { grid, values }
    }

    /// Builds F = f1 + j·f2 from complex parts.
    pub fn from_complex_pair(grid: Grid, f1: &[Complex64], f2: &[Complex64]) -> Result<Self> {
        if f1.len() != grid.len() || f2.len() != grid.len() {
            return Err(QbtError::ShapeMismatch("complex parts do not match the grid".into()));
        }
        let values = f1
            .iter()
            .zip(f2)
            .map(|(&z1, &z2)| crate::quat::cd_join(crate::quat::ComplexPair { z1, z2 }))
            .collect();
        Ok(QField2D { grid, values })
    }

    /// Complex parts (f1, f2) of the split F = f1 + j·f2.
    pub fn split(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        self.values
            .iter()
            .map(|&q| {
                let p = cd_split(q);
                (p.z1, p.z2)
            })
            .unzip()
    }

    #[inline]
    pub fn at(&self, m: usize, n: usize) -> Quaternion {
        self.values[self.grid.index(m, n)]
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        QField2D { grid: self.grid, values: self.values.iter().map(|&q| f(q)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q * s)
    }

    /// p·F pointwise.
    pub fn left_mul(&self, p: Quaternion) -> Self {
        self.map(|q| p * q)
    }

    /// F·p pointwise.
    pub fn right_mul(&self, p: Quaternion) -> Self {
        self.map(|q| q * p)
    }

    pub fn add(&self, o: &QField2D) -> Result<Self> {
        self.grid.check_same(&o.grid)?;
        let values = self.values.iter().zip(&o.values).map(|(&x, &y)| x + y).collect();
        Ok(QField2D { grid: self.grid, values })
    }

    pub fn sub(&self, o: &QField2D) -> Result<Self> {
        self.grid.check_same(&o.grid)?;
        let values = self.values.iter().zip(&o.values).map(|(&x, &y)| x - y).collect();
        Ok(QField2D { grid: self.grid, values })
    }

    /// (T_k F)[m, n] = F[m − km, n − kn] on the periodic grid.
    pub fn circular_shift(&self, km: i64, kn: i64) -> Self {
        let (ns, nt) = (self.grid.ns as i64, self.grid.nt as i64);
        let mut out = QField2D::zeros(self.grid);
        for m in 0..ns {
            let src_m = (m - km).rem_euclid(ns) as usize;
            for n in 0..nt {
                let src_n = (n - kn).rem_euclid(nt) as usize;
                out.values[self.grid.index(m as usize, n as usize)] = self.at(src_m, src_n);
            }
        }
        out
    }

    /// Index reversal modulo the grid: F̌[m, n] = F[−m, −n].
    pub fn reversed(&self) -> Self {
        let (ns, nt) = (self.grid.ns, self.grid.nt);
        let mut out = QField2D::zeros(self.grid);
        for m in 0..ns {
            for n in 0..nt {
                out.values[self.grid.index(m, n)] = self.at((ns - m) % ns, (nt - n) % nt);
            }
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        field_norm_sq(self)
    }

    /// Plain Euclidean norm of the sample vector, no cell weight.
    pub fn l2(&self) -> f64 {
        self.values.iter().map(|q| q.norm_sq()).sum::<f64>().sqrt()
    }

    /// ‖self − reference‖ / ‖reference‖ over samples.
    pub fn rel_error(&self, reference: &QField2D) -> f64 {
        let num: f64 = self.values.iter().zip(&reference.values).map(|(&x, &y)| (x - y).norm_sq()).sum();
        let den: f64 = reference.values.iter().map(|q| q.norm_sq()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }
}

/// ⟨F, G⟩ = Σ [(f1ḡ1 + f̄2g2) + j(f2ḡ1 − f̄1g2)]·Δs·Δt
pub fn field_inner(f: &QField2D, g: &QField2D) -> Result<Quaternion> {
    f.grid.check_same(&g.grid)?;
    let mut acc = Quaternion::ZERO;
    for (&x, &y) in f.values.iter().zip(&g.values) {
        let (p, q) = (cd_split(x), cd_split(y));
        let head = p.z1 * q.z1.conj() + p.z2.conj() * q.z2;
        let tail = p.z2 * q.z1.conj() - p.z1.conj() * q.z2;
        acc += Quaternion::from_complex_i(head) + Quaternion::J * Quaternion::from_complex_i(tail);
    }
    Ok(acc * f.grid.cell_area())
}

/// Σ (|f1|² + |f2|²)·Δs·Δt
pub fn field_norm_sq(f: &QField2D) -> f64 {
    f.values.iter().map(|q| q.norm_sq()).sum::<f64>() * f.grid.cell_area()
}
