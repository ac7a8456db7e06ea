//! Fidelity, transition times and parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dk;
use crate::effective::{integrate_suv, EffectiveMode};
use crate::liouville::{check_state, integrate, Basis, StateError};
use crate::numerics::interp;
use crate::numerics::ode::OdeStats;
use crate::pulses::{ConfigError, DephasingMatrix, Ordering, PulseConfig};
use crate::tripod::{adiabatic_frame, geometric_phase, TargetState};
use crate::{Mat4, Vec4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("state is not a valid density matrix: {0}")]
    NonHermitianState(#[from] StateError),
    #[error("fidelity never crosses {level}")]
    NoCrossing { level: f64 },
    #[error("lower threshold {low} is not below upper threshold {high}")]
    InvertedThresholds { low: f64, high: f64 },
    #[error("time series needs at least 2 matching samples")]
    ShortSeries,
    #[error("epsilon must lie in (0, 1/2), got {0}")]
    Epsilon(f64),
    #[error("sweep values must be non-empty and strictly increasing")]
    BadAxis,
    #[error("analytic engine requires overlap ordering")]
    AnalyticNeedsOverlap,
}

/// `F^2 = <Psi|rho|Psi>`.
pub fn fidelity(rho: &Mat4, target: &TargetState) -> Result<f64, AnalysisError> {
    check_state(rho)?;
    Ok(quadratic_form(rho, &target.amplitudes))
}

fn quadratic_form(rho: &Mat4, psi: &Vec4) -> f64 {
    (psi.adjoint() * rho * psi)[(0, 0)].re
}

/// Fidelity from the dark-state block of `rho_a` and the geometric phase:
/// `rho_a_11 + cos(2 thetag) Re rho_a_12 - sin(2 thetag) Im rho_a_12`.
pub fn dark_state_fidelity(rho_a: &Mat4, thetag: f64) -> f64 {
    let (s, c) = (2.0 * thetag).sin_cos();
    let r12 = rho_a[(0, 1)];
    rho_a[(0, 0)].re + c * r12.re - s * r12.im
}

/// Fidelity of an adiabatic-basis state at time `t`, by rotating the target.
pub fn adiabatic_fidelity(rho_a: &Mat4, t: f64, cfg: &PulseConfig, target: &TargetState) -> f64 {
    let r = adiabatic_frame(t, cfg).r;
    quadratic_form(rho_a, &(r.adjoint() * target.amplitudes))
}

/// Threshold crossings bounding the rise of the fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionTime {
    pub value: f64,
    pub t_low: f64,
    pub t_high: f64,
    /// A threshold was crossed more than once; the first crossing is used.
    pub ambiguous: bool,
}

/// Time for `F^2` to rise from `eps` to `1 - eps`. For the fractional
/// ordering the lower threshold is `(1 + eps) F^2(t_0)`, since the fidelity
/// starts at `cos^2(thetag)` rather than zero.
pub fn transition_time(
    times: &[f64],
    fid: &[f64],
    eps: f64,
    ordering: Ordering,
) -> Result<TransitionTime, AnalysisError> {
    if times.len() < 2 || times.len() != fid.len() {
        return Err(AnalysisError::ShortSeries);
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(AnalysisError::Epsilon(eps));
    }
    let low = match ordering {
        Ordering::Fractional => (1.0 + eps) * fid[0],
        _ => eps,
    };
    let high = 1.0 - eps;
    if low >= high {
        // fractional ordering with a small delay starts above 1 - eps
        return Err(AnalysisError::InvertedThresholds { low, high });
    }
    let lo = interp::crossings(times, fid, low);
    let hi = interp::crossings(times, fid, high);
    let t_low = *lo.first().ok_or(AnalysisError::NoCrossing { level: low })?;
    let t_high = *hi.first().ok_or(AnalysisError::NoCrossing { level: high })?;
    Ok(TransitionTime {
        value: t_high - t_low,
        t_low,
        t_high,
        ambiguous: lo.len() > 1 || hi.len() > 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Full master equation.
    Master,
    /// Dark-state (s, u, v) model.
    Effective,
    /// Demkov-Kunike closed forms (overlap ordering only).
    Analytic,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Master => "master",
            Engine::Effective => "effective",
            Engine::Analytic => "analytic",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "master" => Ok(Engine::Master),
            "effective" => Ok(Engine::Effective),
            "analytic" => Ok(Engine::Analytic),
            _ => Err(format!(
                "unknown engine '{s}' (expected master, effective or analytic)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Uniform dephasing rate.
    Gamma,
    /// Pulse delay; the window follows the default for each value.
    Tau,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Gamma => "gamma",
            SweepAxis::Tau => "tau",
        }
    }

    pub fn apply(self, cfg: &PulseConfig, value: f64) -> Result<PulseConfig, ConfigError> {
        match self {
            SweepAxis::Gamma => Ok(cfg.with_gamma(DephasingMatrix::uniform(value)?)),
            SweepAxis::Tau => cfg.with_tau(value),
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gamma" => Ok(SweepAxis::Gamma),
            "tau" => Ok(SweepAxis::Tau),
            _ => Err(format!("unknown axis '{s}' (expected gamma or tau)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    pub samples: usize,
    /// Time of the finite-time fidelity `F^2(t_max)`.
    pub t_max_eval: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            samples: 2000,
            t_max_eval: 5.0,
        }
    }
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub f2_final: f64,
    pub f2_tmax: f64,
    pub t_tr: Option<f64>,
    pub thetag: f64,
    /// Engine failure; the numeric fields are NaN when set.
    pub error: Option<String>,
    /// Non-fatal notes such as an ambiguous or missing crossing.
    pub warning: Option<String>,
    pub cfg_hash: String,
    pub stats: Option<OdeStats>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub engine: Engine,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn f2_final(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.f2_final).collect()
    }
}

/// First 16 hex digits of the SHA-256 of the canonical config text.
pub fn config_hash(cfg: &PulseConfig) -> String {
    let digest = Sha256::digest(cfg.canonical().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Runs `engine` at every axis value. Points run in parallel; engine
/// failures become row-level errors.
pub fn sweep(
    cfg: &PulseConfig,
    axis: SweepAxis,
    values: &[f64],
    engine: Engine,
    opts: &SweepOptions,
) -> Result<SweepResult, AnalysisError> {
    if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::BadAxis);
    }
    if engine == Engine::Analytic && cfg.ordering != Ordering::Overlap {
        return Err(AnalysisError::AnalyticNeedsOverlap);
    }
    let rows = values
        .par_iter()
        .map(|&v| match axis.apply(cfg, v) {
            Ok(c) => run_point(&c, v, engine, opts),
            Err(e) => failed_row(v, String::new(), e.to_string()),
        })
        .collect();
    Ok(SweepResult { axis, engine, rows })
}

fn failed_row(value: f64, cfg_hash: String, error: String) -> SweepRow {
    SweepRow {
        value,
        f2_final: f64::NAN,
        f2_tmax: f64::NAN,
        t_tr: None,
        thetag: f64::NAN,
        error: Some(error),
        warning: None,
        cfg_hash,
        stats: None,
    }
}

/// Evaluates one configuration with the chosen engine.
pub fn run_point(cfg: &PulseConfig, value: f64, engine: Engine, opts: &SweepOptions) -> SweepRow {
    let hash = config_hash(cfg);
    let series = match engine {
        Engine::Master => integrate(cfg, Basis::Bare, opts.samples)
            .map(|tr| (tr.times, tr.fidelity, tr.target.thetag, tr.stats))
            .map_err(|e| e.to_string()),
        Engine::Effective => effective_series(cfg, opts.samples),
        Engine::Analytic => return analytic_row(cfg, value, hash, opts),
    };
    let (times, fid, thetag, stats) = match series {
        Ok(s) => s,
        Err(e) => return failed_row(value, hash, e),
    };
    let f2_final = *fid.last().unwrap();
    let f2_tmax = interp::pchip_eval(&times, &fid, opts.t_max_eval);
    let (t_tr, warning) = match transition_time(&times, &fid, cfg.epsilon, cfg.ordering) {
        Ok(tt) => (
            Some(tt.value),
            tt.ambiguous.then(|| "ambiguous crossing".to_string()),
        ),
        Err(e) => (None, Some(e.to_string())),
    };
    SweepRow {
        value,
        f2_final,
        f2_tmax,
        t_tr,
        thetag,
        error: None,
        warning,
        cfg_hash: hash,
        stats: Some(stats),
    }
}

type Series = (Vec<f64>, Vec<f64>, f64, OdeStats);

fn effective_series(cfg: &PulseConfig, samples: usize) -> Result<Series, String> {
    let tr = integrate_suv(cfg, EffectiveMode::Full, samples).map_err(|e| e.to_string())?;
    let target = TargetState::for_ordering(cfg.ordering, geometric_phase(cfg));
    let fid = tr
        .times
        .iter()
        .zip(&tr.states)
        .map(|(&t, b)| adiabatic_fidelity(&b.to_adiabatic(), t, cfg, &target))
        .collect();
    Ok((tr.times, fid, target.thetag, tr.stats))
}

fn analytic_row(cfg: &PulseConfig, value: f64, hash: String, opts: &SweepOptions) -> SweepRow {
    let run = || -> Result<(f64, f64, f64), dk::DkError> {
        Ok((
            dk::analytic_fidelity(cfg, cfg.t_end)?,
            dk::analytic_fidelity(cfg, opts.t_max_eval)?,
            dk::analytic_transition_time(cfg)?,
        ))
    };
    match run() {
        Ok((f2_final, f2_tmax, t_tr)) => SweepRow {
            value,
            f2_final,
            f2_tmax,
            t_tr: Some(t_tr),
            thetag: 0.0,
            error: None,
            warning: None,
            cfg_hash: hash,
            stats: None,
        },
        Err(e) => failed_row(value, hash, e.to_string()),
    }
}
