use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qbt_core::config::load_system_config;
use qbt_core::experiments::{run_experiment, ExperimentConfig, ExperimentId, ExperimentReport};
use qbt_core::io::{export_coefficients, load_qf4, save_qf4, write_pgm};
use qbt_core::uncertainty::UncertaintyInputs;
use qbt_core::{forward_qbt, make_gaussian_packet, BoostletSystem, Grid, PacketSpec, QField2D, QbtEngine, SystemConfig};

#[derive(Parser)]
#[command(name = "qbt", version, about = "Quaternion boostlet transform tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Forward transform of a stored field; writes coefficients and a summary.
    Analyze {
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Skip the per-cell coefficient files.
        #[arg(long)]
        summary_only: bool,
    },
    /// Checks one identity or inequality; exit status 0 iff it holds.
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        /// Field to check; the single test packet when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long = "nu", default_value_t = 1.0)]
        nu: f64,
        /// Allowed |ratio − 1| for plancherel.
        #[arg(long, default_value_t = 0.03)]
        tol: f64,
    },
    /// Threshold study of the two-packet signal, quaternion vs componentwise.
    Sparsity {
        #[arg(long, default_value_t = 10.0)]
        snr: f64,
        #[arg(long, default_value_t = 5)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Adds an empty row for a third method.
        #[arg(long)]
        method_c: bool,
    },
    /// Reconstruction error over growing lattices.
    InvertSweep {
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a worked example (5.1 to 5.4).
    Example {
        id: ExperimentId,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the test packet as a QF4 file.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        half_width: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Plancherel,
    Heisenberg,
    Log,
    Pitt,
    Power,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn system_config(path: Option<&Path>) -> Result<SystemConfig> {
    match path {
        Some(p) => load_system_config(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(SystemConfig::default()),
    }
}

fn packet(n: usize) -> Result<QField2D> {
    Ok(make_gaussian_packet(&PacketSpec::single_packet(), Grid::centered(n, 4.0)?))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Analyze { input, config, out, summary_only } => analyze(&input, config.as_deref(), &out, summary_only),
        Cmd::Verify { kind, input, config, n, lambda, m, nu, tol } => {
            let f = match input {
                Some(p) => load_qf4(&p).with_context(|| format!("reading {}", p.display()))?,
                None => packet(n)?,
            };
            let sys = BoostletSystem::admissible(system_config(config.as_deref())?)?;
            let inputs = UncertaintyInputs::new(&f, &sys)?;
            let report = match kind {
                VerifyKind::Plancherel => {
                    let ratio = inputs.engine.energy() / (inputs.engine.delta() * inputs.norm_sq);
                    let pass = (ratio - 1.0).abs() <= tol;
                    print_json(&json!({
                        "kind": "Plancherel",
                        "ratio": ratio,
                        "tolerance": tol,
                        "coverage": inputs.coverage,
                        "captured": inputs.engine.captured_fraction(),
                        "pass": pass,
                    }))?;
                    return Ok(pass);
                }
                VerifyKind::Heisenberg => inputs.heisenberg()?,
                VerifyKind::Log => inputs.logarithmic()?,
                VerifyKind::Pitt => inputs.pitt(lambda)?,
                VerifyKind::Power => inputs.power(m, nu)?,
            };
            println!("{}", report.to_json());
            Ok(report.pass)
        }
        Cmd::Sparsity { snr, seed, threshold, n, config, out, method_c } => {
            let cfg = ExperimentConfig {
                n,
                snr_db: snr,
                seed,
                threshold,
                method_c,
                system: system_config(config.as_deref())?,
                out_dir: out,
                ..ExperimentConfig::for_experiment(ExperimentId::Ex52)
            };
            finish(run_experiment(ExperimentId::Ex52, &cfg)?)
        }
        Cmd::InvertSweep { n, out } => {
            let cfg = ExperimentConfig { n, out_dir: out, ..ExperimentConfig::for_experiment(ExperimentId::Ex54) };
            finish(run_experiment(ExperimentId::Ex54, &cfg)?)
        }
        Cmd::Example { id, n, config, out } => {
            let base = ExperimentConfig::for_experiment(id);
            let cfg = ExperimentConfig {
                n: n.unwrap_or(base.n),
                system: system_config(config.as_deref())?,
                out_dir: out,
                ..base
            };
            finish(run_experiment(id, &cfg)?)
        }
        Cmd::Generate { out, n, half_width } => {
            let f = make_gaussian_packet(&PacketSpec::single_packet(), Grid::centered(n, half_width)?);
            save_qf4(&f, &out)?;
            Ok(true)
        }
    }
}

fn finish(report: ExperimentReport) -> Result<bool> {
    print_json(&serde_json::to_value(&report)?)?;
    for c in &report.checks {
        eprintln!("{} {}: {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.expected);
    }
    Ok(report.all_pass())
}

fn analyze(input: &Path, config: Option<&Path>, out: &Path, summary_only: bool) -> Result<bool> {
    let f = load_qf4(input).with_context(|| format!("reading {}", input.display()))?;
    let sys = BoostletSystem::admissible(system_config(config)?)?;
    fs::create_dir_all(out)?;
    let engine = QbtEngine::new(&f, &sys)?;
    let (coverage, captured) = engine.coverage_report();
    let ratio = engine.energy() / (engine.delta() * f.norm_sq());

    // per-cell peak magnitude, scales down the rows
    let (ns, na) = (sys.scales.len(), sys.alphas.len());
    let mut peaks = vec![0.0; ns * na];
    engine.fold_cells(|cell| (cell.k, cell.c1.max_abs().max(cell.c2.max_abs())), |(k, v)| peaks[k] = v);
    write_pgm(out.join("cell_peaks.pgm"), ns, na, &peaks)?;

    let mut files = vec![out.join("cell_peaks.pgm")];
    if !summary_only {
        let coef = forward_qbt(&f, &sys)?;
        files.push(export_coefficients(&coef, out.join("coefficients"), Some(coverage))?);
    }
    let summary = json!({
        "input": input,
        "grid": f.grid,
        "system": sys.config,
        "delta": engine.delta(),
        "plancherel_ratio": ratio,
        "coverage": coverage,
        "captured": captured,
        "cells": sys.n_cells(),
        "files": files,
    });
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    print_json(&summary)?;
    Ok(true)
}
