//! Weighted energies and the Heisenberg, power-weighted, logarithmic and
//! Pitt inequalities between a signal's spectrum and its boostlet
//! coefficients.
//!
//! Singular weights (ln, negative powers) skip the exact zero sample.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, gamma};

use crate::boostlet::BoostletSystem;
use crate::error::{QbtError, Result};
use crate::field::{field_norm_sq, Grid, QField2D};
use crate::qbt::{QbtCoefficients, QbtEngine};
use crate::qfourier::QSpectrum2D;

/// Radial weight applied to |τ| or |ω|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    /// r^e
    Power(f64),
    /// ln r
    Log,
}

impl Weight {
    fn singular(self) -> bool {
        match self {
            Weight::Power(e) => e < 0.0,
            Weight::Log => true,
        }
    }

    /// None for the skipped zero sample.
    #[inline]
    pub fn eval(self, r: f64) -> Option<f64> {
        if r == 0.0 && self.singular() {
            return None;
        }
        Some(match self {
            Weight::Power(e) if e == 0.0 => 1.0,
            Weight::Power(e) => r.powf(e),
            Weight::Log => r.ln(),
        })
    }

    fn check_spectral(self) -> Result<()> {
        if let Weight::Power(e) = self {
            if e <= -2.0 || !e.is_finite() {
                return Err(QbtError::LambdaOutOfRange(-e));
            }
        }
        Ok(())
    }
}

fn tau_weights(grid: &Grid, w: Weight) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for m in 0..grid.ns {
        for n in 0..grid.nt {
            out.push(w.eval(grid.s(m).hypot(grid.t(n))).unwrap_or(0.0));
        }
    }
    out
}

/// Σ_{c,α} w Σ_τ weight(|τ|)(|C1|² + |C2|²)ΔsΔt
pub fn weighted_tau_energy(coef: &QbtCoefficients, weight: Weight) -> f64 {
    let tw = tau_weights(&coef.grid, weight);
    let area = coef.grid.cell_area();
    let mut total = 0.0;
    for k in 0..coef.n_cells() {
        let s: f64 = coef.c1[k]
            .values
            .iter()
            .zip(&coef.c2[k].values)
            .zip(&tw)
            .map(|((a, b), w)| w * (a.norm_sq() + b.norm_sq()))
            .sum();
        total += coef.haar_weights[k] * s * area;
    }
    total
}

/// Several τ-weighted energies from one sweep of the lattice, without
/// holding the coefficients. The first entry is the plain energy.
pub fn streamed_tau_energies(engine: &QbtEngine, weights: &[Weight]) -> Vec<f64> {
    let grid = engine.grid();
    let tables: Vec<Vec<f64>> = weights.iter().map(|&w| tau_weights(&grid, w)).collect();
    let area = grid.cell_area();
    let mut totals = vec![0.0; weights.len() + 1];
    engine.fold_cells(
        |cell| {
            let e: Vec<f64> = cell.c1.values.iter().zip(&cell.c2.values).map(|(a, b)| a.norm_sq() + b.norm_sq()).collect();
            let mut out = Vec::with_capacity(tables.len() + 1);
            out.push(cell.weight * e.iter().sum::<f64>() * area);
            for t in &tables {
                out.push(cell.weight * e.iter().zip(t).map(|(x, w)| x * w).sum::<f64>() * area);
            }
            out
        },
        |v| totals.iter_mut().zip(v).for_each(|(t, x)| *t += x),
    );
    totals
}

/// Σ_ω weight(|ω|)‖F̂(ω)‖²Δω1Δω2
pub fn weighted_omega_energy(s: &QSpectrum2D, weight: Weight) -> Result<f64> {
    weight.check_spectral()?;
    let (d1, d2) = s.step();
    let mut total = 0.0;
    for p in 0..s.grid.ns {
        for q in 0..s.grid.nt {
            let (w1, w2) = s.freq(p, q);
            if let Some(w) = weight.eval(w1.hypot(w2)) {
                total += w * s.at(p, q).norm_sq();
            }
        }
    }
    Ok(total * d1 * d2)
}

/// C_λ = π^λ [Γ((2 − λ)/4)/Γ((2 + λ)/4)]²
pub fn pitt_constant(lambda: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&lambda) {
        return Err(QbtError::LambdaOutOfRange(lambda));
    }
    let r = gamma((2.0 - lambda) / 4.0) / gamma((2.0 + lambda) / 4.0);
    Ok(std::f64::consts::PI.powf(lambda) * r * r)
}

/// ψ(1/2) − ln π
pub fn log_constant() -> f64 {
    digamma(0.5) - std::f64::consts::PI.ln()
}

/// (1/4)^{mn/(m+n)}, given for m, n ≥ 1 only.
pub fn power_constant(m: f64, n: f64) -> Result<f64> {
    if !(m >= 1.0 && n >= 1.0) || !m.is_finite() || !n.is_finite() {
        return Err(QbtError::ConstantUnavailable { m, n });
    }
    Ok(0.25f64.powf(m * n / (m + n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityKind {
    Heisenberg,
    Power,
    Logarithmic,
    Pitt,
}

/// One verified inequality; `ratio` ≤ 1 means it holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub m: Option<f64>,
    pub n: Option<f64>,
    pub lambda: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub ratio: f64,
    pub pass: bool,
    pub margin: f64,
    /// Spectral energy share inside the lattice supports.
    pub coverage: f64,
}

pub const PASS_TOLERANCE: f64 = 1e-9;

impl InequalityReport {
    fn new(kind: InequalityKind, lhs: f64, rhs: f64, constant: f64, ratio: f64, coverage: f64) -> Self {
        InequalityReport {
            kind,
            m: None,
            n: None,
            lambda: None,
            lhs,
            rhs,
            constant,
            ratio,
            pass: ratio <= 1.0 + PASS_TOLERANCE,
            margin: 1.0 - ratio,
            coverage,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Shared quantities for the checks on one signal.
pub struct UncertaintyInputs<'a> {
    pub engine: QbtEngine<'a>,
    pub norm_sq: f64,
    pub coverage: f64,
}

impl<'a> UncertaintyInputs<'a> {
    pub fn new(f: &QField2D, sys: &'a BoostletSystem) -> Result<Self> {
        let norm_sq = field_norm_sq(f);
        if norm_sq == 0.0 {
            return Err(QbtError::ZeroSignal);
        }
        let engine = QbtEngine::new(f, sys)?;
        let coverage = engine.coverage();
        Ok(UncertaintyInputs { engine, norm_sq, coverage })
    }

    fn delta(&self) -> f64 {
        self.engine.delta()
    }

    pub fn power(&self, m: f64, n: f64) -> Result<InequalityReport> {
        let constant = power_constant(m, n)?;
        let tau = streamed_tau_energies(&self.engine, &[Weight::Power(2.0 * m)])[1];
        let omega = weighted_omega_energy(&self.engine.spectrum, Weight::Power(2.0 * n))?;
        Ok(power_report(constant, self.delta(), self.norm_sq, tau, omega, m, n, self.coverage))
    }

    pub fn heisenberg(&self) -> Result<InequalityReport> {
        let mut r = self.power(1.0, 1.0)?;
        r.kind = InequalityKind::Heisenberg;
        Ok(r)
    }

    pub fn logarithmic(&self) -> Result<InequalityReport> {
        let tau = streamed_tau_energies(&self.engine, &[Weight::Log])[1];
        let omega = weighted_omega_energy(&self.engine.spectrum, Weight::Log)?;
        Ok(log_report(self.delta(), self.norm_sq, tau, omega, self.coverage))
    }

    pub fn pitt(&self, lambda: f64) -> Result<InequalityReport> {
        let constant = pitt_constant(lambda)?;
        let omega = weighted_omega_energy(&self.engine.spectrum, Weight::Power(-lambda))?;
        let tau = streamed_tau_energies(&self.engine, &[Weight::Power(lambda)])[1];
        Ok(pitt_report(constant, self.delta(), omega, tau, lambda, self.coverage))
    }

    /// Pitt at λ, logarithmic and Heisenberg from a single lattice sweep.
    pub fn standard_suite(&self, lambda: f64) -> Result<Vec<InequalityReport>> {
        let pc = pitt_constant(lambda)?;
        let t = streamed_tau_energies(&self.engine, &[Weight::Power(lambda), Weight::Log, Weight::Power(2.0)]);
        let s = &self.engine.spectrum;
        let d = self.delta();
        let pitt = pitt_report(pc, d, weighted_omega_energy(s, Weight::Power(-lambda))?, t[1], lambda, self.coverage);
        let log = log_report(d, self.norm_sq, t[2], weighted_omega_energy(s, Weight::Log)?, self.coverage);
        let mut heis = power_report(
            power_constant(1.0, 1.0)?,
            d,
            self.norm_sq,
            t[3],
            weighted_omega_energy(s, Weight::Power(2.0))?,
            1.0,
            1.0,
            self.coverage,
        );
        heis.kind = InequalityKind::Heisenberg;
        Ok(vec![pitt, log, heis])
    }

    /// Logarithmic, then power for each (m, n), from a single lattice sweep.
    pub fn log_and_powers(&self, orders: &[(f64, f64)]) -> Result<Vec<InequalityReport>> {
        let constants = orders.iter().map(|&(m, n)| power_constant(m, n)).collect::<Result<Vec<_>>>()?;
        let mut weights = vec![Weight::Log];
        weights.extend(orders.iter().map(|&(m, _)| Weight::Power(2.0 * m)));
        let t = streamed_tau_energies(&self.engine, &weights);
        let s = &self.engine.spectrum;
        let d = self.delta();
        let mut out = vec![log_report(d, self.norm_sq, t[1], weighted_omega_energy(s, Weight::Log)?, self.coverage)];
        for (k, (&(m, n), &c)) in orders.iter().zip(&constants).enumerate() {
            let omega = weighted_omega_energy(s, Weight::Power(2.0 * n))?;
            out.push(power_report(c, d, self.norm_sq, t[k + 2], omega, m, n, self.coverage));
        }
        Ok(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn power_report(constant: f64, delta: f64, norm_sq: f64, tau: f64, omega: f64, m: f64, n: f64, coverage: f64) -> InequalityReport {
    let lhs = constant * delta.powf(n / (m + n)) * norm_sq;
    let rhs = tau.powf(n / (m + n)) * omega.powf(m / (m + n));
    let mut r = InequalityReport::new(InequalityKind::Power, lhs, rhs, constant, lhs / rhs, coverage);
    r.m = Some(m);
    r.n = Some(n);
    r
}

fn log_report(delta: f64, norm_sq: f64, tau: f64, omega: f64, coverage: f64) -> InequalityReport {
    let constant = log_constant();
    let lhs = constant * delta * norm_sq;
    let rhs = tau + delta * omega;
    // both sides may be negative: 1 − (rhs − lhs)/(|lhs| + |rhs|)
    let ratio = 1.0 - (rhs - lhs) / (lhs.abs() + rhs.abs());
    InequalityReport::new(InequalityKind::Logarithmic, lhs, rhs, constant, ratio, coverage)
}

fn pitt_report(constant: f64, delta: f64, omega: f64, tau: f64, lambda: f64, coverage: f64) -> InequalityReport {
    let lhs = delta * omega;
    let rhs = constant * tau;
    let mut r = InequalityReport::new(InequalityKind::Pitt, lhs, rhs, constant, lhs / rhs, coverage);
    r.lambda = Some(lambda);
    r
}

/// C_{m,n}Δ^{n/(m+n)}‖F‖² ≤ (∫|τ|^{2m}‖QB F‖²)^{n/(m+n)}(∫|ω|^{2n}‖F̂‖²)^{m/(m+n)}
pub fn check_power_uncertainty(f: &QField2D, sys: &BoostletSystem, m: f64, n: f64) -> Result<InequalityReport> {
    power_constant(m, n)?;
    UncertaintyInputs::new(f, sys)?.power(m, n)
}

/// The m = n = 1 case, constant √Δ/2 after the Δ factor.
pub fn check_heisenberg(f: &QField2D, sys: &BoostletSystem) -> Result<InequalityReport> {
    UncertaintyInputs::new(f, sys)?.heisenberg()
}

/// [ψ(1/2) − ln π]Δ‖F‖² ≤ ∫ln|τ|‖QB F‖² + Δ∫ln|ω|‖F̂‖²
pub fn check_logarithmic(f: &QField2D, sys: &BoostletSystem) -> Result<InequalityReport> {
    UncertaintyInputs::new(f, sys)?.logarithmic()
}

/// Δ∫|ω|^{−λ}‖F̂‖² ≤ C_λ∫|τ|^λ‖QB F‖²
pub fn check_pitt(f: &QField2D, sys: &BoostletSystem, lambda: f64) -> Result<InequalityReport> {
    pitt_constant(lambda)?;
    UncertaintyInputs::new(f, sys)?.pitt(lambda)
}
