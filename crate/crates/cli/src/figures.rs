//! Datasets behind the figures, with the captions' parameters.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use tripod_core::analysis::{self, Engine, SweepAxis, SweepOptions, SweepResult};
use tripod_core::dk::{analytic_dark_observables, analytic_fidelity, weak_dephasing_fidelity};
use tripod_core::effective::DarkBlochVector;
use tripod_core::liouville::{integrate, integrate_at, Basis};
use tripod_core::pulses::{DephasingMatrix, Ordering, PulseConfig};

use crate::commands::command_line;
use crate::output::{cell, num, write_output, Csv, Manifest, OutputFile};
use crate::settings::{parse_list, ConfigFile};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6,
    Fig7,
    Fig8,
    Fig9a,
    Fig9b,
    All,
}

impl Figure {
    const EACH: [Figure; 9] = [
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5a,
        Figure::Fig5b,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9a,
        Figure::Fig9b,
    ];

    fn name(self) -> String {
        format!("{self:?}").to_ascii_lowercase()
    }
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    #[arg(value_enum)]
    pub name: Figure,
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
    /// Peak Rabi frequencies of the delay scans (fig5a, fig5b)
    #[arg(long)]
    pub omega0_list: Option<String>,
}

/// Dephasing grid of the population and fidelity scans.
const GAMMAS: [f64; 21] = [
    0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 3.0, 5.0, 10.0,
    15.0, 20.0,
];

fn config(o: Ordering, omega0: f64, tau: f64, gamma: f64) -> Result<PulseConfig, CliError> {
    let g = DephasingMatrix::uniform(gamma).map_err(|e| CliError::Usage(e.to_string()))?;
    PulseConfig::new(o, omega0, tau, g).map_err(|e| CliError::Usage(e.to_string()))
}

fn engine_err(e: impl ToString) -> CliError {
    CliError::Engine(e.to_string())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// One sweep; a point that fails aborts the figure.
fn scan(
    cfg: &PulseConfig,
    axis: SweepAxis,
    values: &[f64],
    engine: Engine,
) -> Result<SweepResult, CliError> {
    let r =
        analysis::sweep(cfg, axis, values, engine, &SweepOptions::default()).map_err(engine_err)?;
    if let Some(row) = r.rows.iter().find(|r| !r.is_ok()) {
        return Err(CliError::Engine(format!(
            "{} = {}: {}",
            axis.name(),
            row.value,
            row.error.as_deref().unwrap_or("")
        )));
    }
    Ok(r)
}

fn label(prefix: &str, x: f64) -> String {
    format!("{prefix}{x}")
}

/// Written files of one figure.
struct Dataset {
    files: Vec<(String, Csv)>,
    engine: &'static str,
}

#[derive(Serialize)]
struct FigureConfig {
    figure: String,
    omega0_list: Vec<f64>,
}

pub fn run(args: &FiguresArgs, file: &ConfigFile) -> Result<(), CliError> {
    let omega0_list = match args.omega0_list.as_deref().or(file.raw("omega0_list")) {
        Some(text) => parse_list(text)?,
        None => vec![20.0, 50.0, 100.0, 200.0],
    };
    if omega0_list.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
        return Err(CliError::Usage(
            "--omega0-list entries must be positive".into(),
        ));
    }
    let figures: Vec<Figure> = match args.name {
        Figure::All => Figure::EACH.to_vec(),
        f => vec![f],
    };
    for fig in figures {
        let start = Instant::now();
        let data = match fig {
            Figure::Fig3 => fig3()?,
            Figure::Fig4 => fig4()?,
            Figure::Fig5a => fig5(&omega0_list, 0.0, false)?,
            Figure::Fig5b => fig5(&omega0_list, 1.0, true)?,
            Figure::Fig6 => fidelity_vs_gamma(Ordering::StokesControlPump, &[1.0, 1.5, 2.0])?,
            Figure::Fig7 => transition_vs_delay(Ordering::StokesControlPump)?,
            Figure::Fig8 => fidelity_vs_gamma(Ordering::Fractional, &[0.5, 1.0, 1.5])?,
            Figure::Fig9a => fig9a()?,
            Figure::Fig9b => transition_vs_delay(Ordering::Fractional)?,
            Figure::All => unreachable!(),
        };
        let outputs = data
            .files
            .iter()
            .map(|(name, csv)| write_output(&args.out_dir.join(name), csv.as_str()))
            .collect::<Result<Vec<OutputFile>, _>>()?;
        for o in &outputs {
            eprintln!("wrote {}", o.path);
        }
        let config = FigureConfig {
            figure: fig.name(),
            omega0_list: omega0_list.clone(),
        };
        Manifest::new(
            &command_line(),
            data.engine,
            config,
            start.elapsed(),
            outputs,
        )
        .write(&manifest_for(&args.out_dir, fig))?;
    }
    Ok(())
}

fn manifest_for(dir: &Path, fig: Figure) -> PathBuf {
    dir.join(format!("{}.manifest.json", fig.name()))
}

fn comment(cfg: &PulseConfig, extra: &str) -> String {
    format!("config: {} {extra}", cfg.canonical())
}

/// Final bare populations, master equation against the closed form.
fn fig3() -> Result<Dataset, CliError> {
    let base = config(Ordering::Overlap, 50.0, 1.5, 0.0)?;
    let gammas = &GAMMAS[..16];
    let header = ["gamma", "rho11", "rho22", "rho33", "rho44"];
    let rows: Vec<([f64; 4], [f64; 4])> = gammas
        .par_iter()
        .map(|&g| {
            let cfg = config(Ordering::Overlap, 50.0, 1.5, g)?;
            let tr =
                integrate_at(&cfg, Basis::Bare, &[cfg.t_start, cfg.t_end]).map_err(engine_err)?;
            let numeric = tr.rho.last().unwrap();
            let (p, c) = analytic_dark_observables(&cfg, cfg.t_end).map_err(engine_err)?;
            let analytic = DarkBlochVector {
                s: 0.5 - 2.0 * p,
                u: 2f64.sqrt() * c,
                v: 0.0,
            }
            .to_bare(cfg.t_end, &cfg);
            let d = |m: &tripod_core::Mat4| std::array::from_fn(|k| m[(k, k)].re);
            Ok((d(numeric), d(&analytic)))
        })
        .collect::<Result<_, CliError>>()?;
    let mut numeric = Csv::new(&comment(&base, "axis=gamma engine=master t=t_end"), &header);
    let mut analytic = Csv::new(
        &comment(&base, "axis=gamma engine=analytic t=t_end"),
        &header,
    );
    for (&g, (n, a)) in gammas.iter().zip(&rows) {
        numeric.numbers(&[g, n[0], n[1], n[2], n[3]]);
        analytic.numbers(&[g, a[0], a[1], a[2], a[3]]);
    }
    Ok(Dataset {
        files: vec![
            ("fig3_numeric.csv".into(), numeric),
            ("fig3_analytic.csv".into(), analytic),
        ],
        engine: "master+analytic",
    })
}

/// Fidelity at t = 5T: numeric, closed form and its weak-dephasing expansion.
fn fig4() -> Result<Dataset, CliError> {
    let t_eval = SweepOptions::default().t_max_eval;
    let base = config(Ordering::Overlap, 50.0, 1.5, 0.0)?;
    let gammas = &GAMMAS[..16];
    let master = scan(&base, SweepAxis::Gamma, gammas, Engine::Master)?;
    let mut csv = Csv::new(
        &comment(&base, &format!("axis=gamma t_max={}", num(t_eval))),
        &["gamma", "F2_numeric", "F2_analytic", "F2_weak_dephasing"],
    );
    for row in &master.rows {
        let cfg = config(Ordering::Overlap, 50.0, 1.5, row.value)?;
        let exact = analytic_fidelity(&cfg, t_eval).map_err(engine_err)?;
        let weak = weak_dephasing_fidelity(&cfg, t_eval).map_err(engine_err)?;
        csv.numbers(&[row.value, row.f2_tmax, exact, weak]);
    }
    Ok(Dataset {
        files: vec![("fig4.csv".into(), csv)],
        engine: "master+analytic",
    })
}

/// Final fidelity against delay, one column per peak Rabi frequency.
fn fig5(omega0_list: &[f64], gamma: f64, with_analytic: bool) -> Result<Dataset, CliError> {
    let taus = linspace(0.5, 2.0, 16);
    let mut header = vec!["tau".to_string()];
    let mut columns = Vec::new();
    let mut first = None;
    for &w in omega0_list {
        let cfg = config(Ordering::Overlap, w, 1.5, gamma)?;
        first.get_or_insert(cfg);
        header.push(label("F2_omega0_", w));
        columns.push(scan(&cfg, SweepAxis::Tau, &taus, Engine::Master)?.f2_final());
        if with_analytic {
            header.push(label("F2_analytic_omega0_", w));
            columns.push(scan(&cfg, SweepAxis::Tau, &taus, Engine::Analytic)?.f2_final());
        }
    }
    let base = first.ok_or_else(|| CliError::Usage("--omega0-list is empty".into()))?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&comment(&base, "axis=tau omega0=per-column"), &header);
    for (k, &tau) in taus.iter().enumerate() {
        let mut row = vec![tau];
        row.extend(columns.iter().map(|c| c[k]));
        csv.numbers(&row);
    }
    let name = if with_analytic {
        "fig5b.csv"
    } else {
        "fig5a.csv"
    };
    Ok(Dataset {
        files: vec![(name.into(), csv)],
        engine: if with_analytic {
            "master+analytic"
        } else {
            "master"
        },
    })
}

/// Final fidelity against dephasing at Omega0 = 200, one column per delay.
fn fidelity_vs_gamma(o: Ordering, taus: &[f64]) -> Result<Dataset, CliError> {
    let mut header = vec!["gamma".to_string()];
    let mut columns = Vec::new();
    for &tau in taus {
        let cfg = config(o, 200.0, tau, 0.0)?;
        header.push(label("F2_tau_", tau));
        columns.push(scan(&cfg, SweepAxis::Gamma, &GAMMAS, Engine::Master)?.f2_final());
    }
    let base = config(o, 200.0, taus[0], 0.0)?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&comment(&base, "axis=gamma tau=per-column"), &header);
    for (k, &g) in GAMMAS.iter().enumerate() {
        let mut row = vec![g];
        row.extend(columns.iter().map(|c| c[k]));
        csv.numbers(&row);
    }
    let name = if o == Ordering::Fractional {
        "fig8.csv"
    } else {
        "fig6.csv"
    };
    Ok(Dataset {
        files: vec![(name.into(), csv)],
        engine: "master",
    })
}

/// Coherent transition time against delay. Points without a clean
/// crossing keep their row with `nan` and the reason.
fn transition_vs_delay(o: Ordering) -> Result<Dataset, CliError> {
    let base = config(o, 200.0, 1.5, 0.0)?;
    let taus = linspace(0.5, 2.0, 16);
    let r = scan(&base, SweepAxis::Tau, &taus, Engine::Master)?;
    let mut csv = Csv::new(&comment(&base, "axis=tau"), &["tau", "T_tr", "error"]);
    for row in &r.rows {
        csv.row(&[
            num(row.value),
            num(row.t_tr.unwrap_or(f64::NAN)),
            row.warning.as_deref().map(cell).unwrap_or_default(),
        ]);
    }
    let name = if o == Ordering::Fractional {
        "fig9b.csv"
    } else {
        "fig7.csv"
    };
    Ok(Dataset {
        files: vec![(name.into(), csv)],
        engine: "master",
    })
}

/// Coherent fidelity histories of the fractional ordering, long format.
fn fig9a() -> Result<Dataset, CliError> {
    let taus = [0.5, 1.0, 1.5];
    let base = config(Ordering::Fractional, 200.0, taus[0], 0.0)?;
    let runs = taus
        .par_iter()
        .map(|&tau| {
            let cfg = config(Ordering::Fractional, 200.0, tau, 0.0)?;
            integrate(&cfg, Basis::Bare, 401).map_err(engine_err)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut csv = Csv::new(&comment(&base, "tau=per-row"), &["tau", "t", "F2"]);
    for (&tau, tr) in taus.iter().zip(&runs) {
        for (&t, &f) in tr.times.iter().zip(&tr.fidelity) {
            csv.numbers(&[tau, t, f]);
        }
    }
    Ok(Dataset {
        files: vec![("fig9a.csv".into(), csv)],
        engine: "master",
    })
}
