//! Resolution of run settings: flags override config-file keys, which
//! override built-in defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use clap::Args;
use serde::Serialize;
use tripod_core::analysis::{Engine, SweepOptions};
use tripod_core::liouville::Basis;
use tripod_core::pulses::{DephasingMatrix, Ordering, PulseConfig};

use crate::CliError;

/// Physical parameters shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// overlap, scp, csp or fractional
    #[arg(long)]
    pub ordering: Option<String>,
    /// Peak Rabi frequency in units of 1/T
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// Pulse delay in units of T
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Pulse width T
    #[arg(long, allow_hyphen_values = true)]
    pub width: Option<f64>,
    /// Uniform dephasing rate, or a file holding the 4x4 rate matrix
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    /// Transition-time threshold
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
}

/// Numerical options shared by simulate and sweep.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// master, effective or analytic
    #[arg(long)]
    pub engine: Option<String>,
    /// Number of output samples across the window
    #[arg(long)]
    pub samples: Option<usize>,
    /// Time of the finite-time fidelity F2_tmax
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
}

/// Flat `key = value` file; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

const KEYS: [&str; 13] = [
    "ordering",
    "omega0",
    "tau",
    "width",
    "gamma",
    "t_start",
    "t_end",
    "epsilon",
    "engine",
    "samples",
    "t_max",
    "basis",
    "omega0_list",
];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key = value", n + 1))
            })?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key '{k}'",
                    n + 1
                )));
            }
            entries.insert(k, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse '{v}'"))),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    file: &ConfigFile,
    key: &str,
) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

/// `gamma` is a number or a path to a matrix file.
pub fn parse_gamma(value: &str) -> Result<DephasingMatrix, CliError> {
    if let Ok(g) = value.trim().parse::<f64>() {
        return DephasingMatrix::uniform(g).map_err(|e| CliError::Usage(e.to_string()));
    }
    let text = fs::read_to_string(value).map_err(|e| {
        CliError::Usage(format!(
            "gamma '{value}' is neither a number nor a readable file: {e}"
        ))
    })?;
    DephasingMatrix::parse(&text).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_engine(value: &str) -> Result<Engine, CliError> {
    value.parse().map_err(CliError::Usage)
}

/// Builds the pulse config from flags, file and defaults.
pub fn resolve_model(args: &ModelArgs, file: &ConfigFile) -> Result<PulseConfig, CliError> {
    let usage = |e: tripod_core::pulses::ConfigError| CliError::Usage(e.to_string());
    let ordering: Ordering = match pick(args.ordering.clone(), file, "ordering")? {
        Some(s) => s.parse::<Ordering>().map_err(usage)?,
        None => Ordering::Overlap,
    };
    let omega0 = pick(args.omega0, file, "omega0")?.unwrap_or(50.0);
    let tau = pick(args.tau, file, "tau")?.unwrap_or(1.5);
    let gamma = match pick(args.gamma.clone(), file, "gamma")? {
        Some(s) => parse_gamma(&s)?,
        None => DephasingMatrix::zero(),
    };
    let mut cfg = PulseConfig::new(ordering, omega0, tau, gamma).map_err(usage)?;
    if let Some(w) = pick(args.width, file, "width")? {
        cfg = cfg.with_width(w).map_err(usage)?;
    }
    let t_start = pick(args.t_start, file, "t_start")?;
    let t_end = pick(args.t_end, file, "t_end")?;
    if t_start.is_some() || t_end.is_some() {
        cfg = cfg
            .with_window(t_start.unwrap_or(cfg.t_start), t_end.unwrap_or(cfg.t_end))
            .map_err(usage)?;
    }
    if let Some(e) = pick(args.epsilon, file, "epsilon")? {
        cfg = cfg.with_epsilon(e).map_err(usage)?;
    }
    Ok(cfg)
}

/// Engine and sampling for one run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunSettings {
    pub engine: Engine,
    pub samples: usize,
    pub t_max: f64,
}

impl RunSettings {
    pub fn options(&self) -> SweepOptions {
        SweepOptions {
            samples: self.samples,
            t_max_eval: self.t_max,
        }
    }
}

pub fn resolve_run(args: &RunArgs, file: &ConfigFile) -> Result<RunSettings, CliError> {
    let engine = match pick(args.engine.clone(), file, "engine")? {
        Some(s) => parse_engine(&s)?,
        None => Engine::Master,
    };
    let samples = pick(args.samples, file, "samples")?.unwrap_or(2000);
    if samples < 2 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 2, got {samples}"
        )));
    }
    let t_max = pick(args.t_max, file, "t_max")?.unwrap_or(5.0);
    Ok(RunSettings {
        engine,
        samples,
        t_max,
    })
}

pub fn resolve_basis(flag: Option<String>, file: &ConfigFile) -> Result<Basis, CliError> {
    match pick(flag, file, "basis")? {
        None => Ok(Basis::Bare),
        Some(s) => match s.to_ascii_lowercase().as_str() {
            "bare" => Ok(Basis::Bare),
            "adiabatic" => Ok(Basis::Adiabatic),
            _ => Err(CliError::Usage(format!(
                "unknown basis '{s}' (expected bare or adiabatic)"
            ))),
        },
    }
}

/// Comma-separated list of numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number '{s}' in list")))
        })
        .collect()
}

/// `a:b:n`, n evenly spaced points including both ends.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad range '{text}' (expected start:stop:count)"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..n)
            .map(|k| {
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = ConfigFile::parse("omega0 = 80\ntau=2 # delay\nordering = scp\n").unwrap();
        let args = ModelArgs {
            tau: Some(1.0),
            ..Default::default()
        };
        let cfg = resolve_model(&args, &file).unwrap();
        assert_eq!(cfg.omega0, 80.0);
        assert_eq!(cfg.tau, 1.0);
        assert_eq!(cfg.ordering, Ordering::StokesControlPump);
        assert_eq!((cfg.t_start, cfg.t_end), (-7.0, 7.0));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(ConfigFile::parse("omega = 3").is_err());
        assert!(ConfigFile::parse("omega0 3").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:2:5").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(parse_range("1:1:1").unwrap(), vec![1.0]);
        assert!(parse_range("0:1").is_err());
        assert_eq!(parse_list("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
    }
}
