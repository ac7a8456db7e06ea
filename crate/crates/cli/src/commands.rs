//! simulate, sweep and constants.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args};
use serde::Serialize;
use tripod_core::analysis::{self, adiabatic_fidelity, AnalysisError, Engine, SweepAxis};
use tripod_core::dk::adiabatic_constants_with_tol;
use tripod_core::effective::{integrate_suv, EffectiveMode};
use tripod_core::liouville::{integrate, Basis};
use tripod_core::pulses::{DephasingMatrix, Ordering, PulseConfig};
use tripod_core::tripod::{geometric_phase, target_state};
use tripod_core::Mat4;

use crate::output::{cell, manifest_path, num, write_output, Csv, Manifest};
use crate::settings::{
    parse_list, parse_range, resolve_basis, resolve_model, resolve_run, ConfigFile, ModelArgs,
    RunArgs, RunSettings,
};
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Propagation basis of the master equation: bare or adiabatic
    #[arg(long)]
    pub basis: Option<String>,
    /// Output CSV; `-` writes to stdout without a manifest
    #[arg(long, default_value = "simulate.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("grid").required(true).args(["values", "range"])))]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// gamma or tau
    #[arg(long)]
    pub axis: String,
    /// Comma-separated axis values
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    /// start:stop:count, both ends included
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    model: &'a PulseConfig,
    run: &'a RunSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<Basis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axis: Option<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<&'a [f64]>,
}

pub fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

/// Writes the CSV, or prints it when `out` is `-`, then the sidecar manifest.
fn emit(
    out: &Path,
    csv: &Csv,
    engine: Engine,
    config: impl Serialize,
    start: Instant,
) -> Result<(), CliError> {
    if out.as_os_str() == "-" {
        return std::io::stdout()
            .write_all(csv.as_str().as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")));
    }
    let file = write_output(out, csv.as_str())?;
    Manifest::new(
        &command_line(),
        engine.name(),
        config,
        start.elapsed(),
        vec![file],
    )
    .write(&manifest_path(out))
}

fn diag(m: &Mat4) -> [f64; 4] {
    [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re]
}

pub fn simulate(args: &SimulateArgs, file: &ConfigFile) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = resolve_model(&args.model, file)?;
    let run = resolve_run(&args.run, file)?;
    let basis = resolve_basis(args.basis.clone(), file)?;
    let header = [
        "t",
        "rho11",
        "rho22",
        "rho33",
        "rho44",
        "rho_a11",
        "rho_a22",
        "rho_a33",
        "rho_a44",
        "re_rho_a12",
        "im_rho_a12",
        "F2",
    ];
    let comment = format!(
        "config: {} engine={} basis={} samples={}",
        cfg.canonical(),
        run.engine.name(),
        basis_name(basis),
        run.samples
    );
    let mut csv = Csv::new(&comment, &header);
    let mut push = |t: f64, rho: &Mat4, rho_a: &Mat4, f2: f64| {
        let mut row = vec![t];
        row.extend(diag(rho));
        row.extend(diag(rho_a));
        row.extend([rho_a[(0, 1)].re, rho_a[(0, 1)].im, f2]);
        csv.numbers(&row);
    };
    match run.engine {
        Engine::Master => {
            let tr =
                integrate(&cfg, basis, run.samples).map_err(|e| CliError::Engine(e.to_string()))?;
            for k in 0..tr.len() {
                push(tr.times[k], &tr.rho[k], &tr.rho_a[k], tr.fidelity[k]);
            }
        }
        Engine::Effective => {
            let tr = integrate_suv(&cfg, EffectiveMode::Full, run.samples)
                .map_err(|e| CliError::Engine(e.to_string()))?;
            let target = target_state(&cfg);
            for (&t, b) in tr.times.iter().zip(&tr.states) {
                let rho_a = b.to_adiabatic();
                push(
                    t,
                    &b.to_bare(t, &cfg),
                    &rho_a,
                    adiabatic_fidelity(&rho_a, t, &cfg, &target),
                );
            }
        }
        Engine::Analytic => {
            return Err(CliError::Usage(
                "simulate supports the master and effective engines; use sweep for analytic".into(),
            ))
        }
    }
    let config = RunConfig {
        model: &cfg,
        run: &run,
        basis: Some(basis),
        axis: None,
        values: None,
    };
    emit(&args.out, &csv, run.engine, config, start)
}

fn basis_name(b: Basis) -> &'static str {
    match b {
        Basis::Bare => "bare",
        Basis::Adiabatic => "adiabatic",
    }
}

pub fn sweep(args: &SweepArgs, file: &ConfigFile) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = resolve_model(&args.model, file)?;
    let run = resolve_run(&args.run, file)?;
    let axis: SweepAxis = args.axis.parse().map_err(CliError::Usage)?;
    let values = match (&args.values, &args.range) {
        (Some(v), _) => parse_list(v)?,
        (None, Some(r)) => parse_range(r)?,
        (None, None) => unreachable!("clap requires one of --values and --range"),
    };
    let result =
        analysis::sweep(&cfg, axis, &values, run.engine, &run.options()).map_err(|e| match e {
            AnalysisError::AnalyticNeedsOverlap => {
                CliError::Usage("analytic engine requires overlap ordering".into())
            }
            AnalysisError::BadAxis => {
                CliError::Usage("axis values must be strictly increasing".into())
            }
            other => CliError::Engine(other.to_string()),
        })?;

    let comment = format!(
        "config: {} engine={} axis={} samples={} t_max={}",
        cfg.canonical(),
        run.engine.name(),
        axis.name(),
        run.samples,
        num(run.t_max)
    );
    let mut csv = Csv::new(
        &comment,
        &[
            axis.name(),
            "F2_final",
            "F2_tmax",
            "T_tr",
            "theta_g",
            "error",
        ],
    );
    for row in &result.rows {
        if let Some(w) = &row.warning {
            eprintln!("warning: {}={}: {w}", axis.name(), row.value);
        }
        if let Some(e) = &row.error {
            eprintln!("warning: {}={} failed: {e}", axis.name(), row.value);
        }
        let mut cells: Vec<String> = [
            row.value,
            row.f2_final,
            row.f2_tmax,
            row.t_tr.unwrap_or(f64::NAN),
            row.thetag,
        ]
        .iter()
        .map(|&x| num(x))
        .collect();
        cells.push(row.error.as_deref().map(cell).unwrap_or_default());
        csv.row(&cells);
    }
    if !result.rows.iter().any(|r| r.is_ok()) {
        return Err(CliError::Engine("every sweep point failed".into()));
    }
    let config = RunConfig {
        model: &cfg,
        run: &run,
        basis: None,
        axis: Some(axis),
        values: Some(&values),
    };
    emit(&args.out, &csv, run.engine, config, start)
}

const REFERENCE_CS: f64 = 2.42;
const REFERENCE_CU: f64 = 0.68;

pub fn constants() -> Result<(), CliError> {
    let (cs, cu) = adiabatic_constants_with_tol(1e-12);
    let (cs_fine, cu_fine) = adiabatic_constants_with_tol(1e-13);
    println!("c_s = {cs:.9}  (tol 1e-13: {cs_fine:.9}, reference {REFERENCE_CS})");
    println!("c_u = {cu:.9}  (tol 1e-13: {cu_fine:.9}, reference {REFERENCE_CU})");
    println!("geometric phase theta_g, omega0 = 200, gamma = 0:");
    for o in Ordering::ALL {
        for tau in [1.0, 1.5, 2.0] {
            let cfg = PulseConfig::new(o, 200.0, tau, DephasingMatrix::zero())
                .map_err(|e| CliError::Engine(e.to_string()))?;
            println!(
                "  {:<10} tau = {tau:.1}  theta_g = {:.9}",
                o.name(),
                geometric_phase(&cfg)
            );
        }
    }
    let mut bad = Vec::new();
    if (cs - REFERENCE_CS).abs() > 0.01 {
        bad.push(format!("c_s = {cs:.6} is not within 0.01 of {REFERENCE_CS}"));
    }
    if (cu - REFERENCE_CU).abs() > 0.01 {
        bad.push(format!("c_u = {cu:.6} is not within 0.01 of {REFERENCE_CU}"));
    }
    if (cs - cs_fine).abs() > 1e-3 || (cu - cu_fine).abs() > 1e-3 {
        bad.push("quadrature has not converged at tolerance 1e-12".into());
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(bad.join("; ")))
    }
}
