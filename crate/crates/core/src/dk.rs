//! Closed-form analytics for overlapping Stokes and control pulses with
//! equal dephasing rates.
//!
//! With `phi = pi/4` the coherence `v` decouples and (s, u) form a
//! two-level system with an imaginary chirp. Approximating its coupling by a
//! sech pulse and its chirp by a tanh gives a Demkov-Kunike problem whose
//! asymptotic amplitudes are ratios of gamma functions.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::gamma::{gamma, near_pole};
use crate::numerics::quad;
use crate::pulses::{mixing_angles, Ordering, PulseConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DkError {
    #[error("analytic model requires overlap ordering, got {0}")]
    WrongOrdering(Ordering),
    #[error("analytic model requires equal rates gamma_13 = gamma_14 = gamma_34")]
    UnequalRates,
    #[error("analytic model requires a non-zero pulse delay")]
    ZeroDelay,
    #[error("gamma function pole at argument {0}")]
    GammaPole(f64),
}

fn atan_2sqrt2() -> f64 {
    (2.0 * SQRT_2).atan()
}

/// Common dephasing rate after checking the model's preconditions.
pub fn overlap_rate(cfg: &PulseConfig) -> Result<f64, DkError> {
    if cfg.ordering != Ordering::Overlap {
        return Err(DkError::WrongOrdering(cfg.ordering));
    }
    cfg.gamma.equal_dark_rate().ok_or(DkError::UnequalRates)
}

fn delayed_rate(cfg: &PulseConfig) -> Result<f64, DkError> {
    let g = overlap_rate(cfg)?;
    if cfg.tau == 0.0 {
        return Err(DkError::ZeroDelay);
    }
    Ok(g)
}

/// Rescaled time `x = 4 t tau / T^2`.
pub fn scaled_time(t: f64, cfg: &PulseConfig) -> f64 {
    4.0 * t * cfg.tau / (cfg.width * cfg.width)
}

/// `Delta / gamma` as a function of `x`.
pub fn f1(x: f64) -> f64 {
    if x > 0.0 {
        let y = (-x).exp();
        let r = 1.0 + 8.0 * y * y / ((1.0 + y) * (1.0 + y));
        (y * y - 1.0) / ((2.0 * y + 1.0) * (2.0 * y + 1.0)) * r.sqrt()
    } else {
        let e = x.exp();
        let r = 1.0 + 8.0 / ((1.0 + e) * (1.0 + e));
        (1.0 - e * e) / ((2.0 + e) * (2.0 + e)) * r.sqrt()
    }
}

/// `xi_dot T^2 / tau` as a function of `x`.
pub fn f2(x: f64) -> f64 {
    // 1 + 5 cosh x - 4 sinh x = 1 + (e^x + 9 e^-x) / 2
    let d = 2.0 + x.exp() + 9.0 * (-x).exp();
    4.0 * SQRT_2 / d
}

/// Couplings of the (s, u) two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuTwoLevel {
    pub omega_su: f64,
    pub delta_su: f64,
    pub gamma_v: f64,
}

impl SuTwoLevel {
    /// Eigenvalues `(eps_plus, eps_minus)` of the (s, u) rate matrix.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * self.delta_su;
        let half = (mean * mean + 2.0 * self.omega_su * self.omega_su).sqrt();
        if self.delta_su >= 0.0 {
            (mean + half, mean - half)
        } else {
            (mean - half, mean + half)
        }
    }
}

pub fn su_two_level(t: f64, cfg: &PulseConfig) -> Result<SuTwoLevel, DkError> {
    let g = overlap_rate(cfg)?;
    let theta = mixing_angles(t, cfg).theta;
    let (st, ct) = theta.sin_cos();
    let s2t = (2.0 * theta).sin();
    let q = 0.75 * s2t * s2t;
    Ok(SuTwoLevel {
        omega_su: 0.25 * g * (q - ct * ct),
        delta_su: 0.25 * g * (q + ct * ct) - g * st * st,
        gamma_v: g * ct * ct,
    })
}

/// Rotation angle `xi` diagonalizing the (s, u) system and its derivative.
///
/// `tan(2 xi) = 2 sqrt(2) Omega_su / Delta_su` and the ratio reduces to
/// `-cos^2(theta) / (1 + sin^2(theta))`, which is continuous through the
/// zero of `Delta_su`.
pub fn xi_angle(t: f64, cfg: &PulseConfig) -> Result<(f64, f64), DkError> {
    overlap_rate(cfg)?;
    let theta = mixing_angles(t, cfg).theta;
    let (st, ct) = theta.sin_cos();
    let ratio = -ct * ct / (1.0 + st * st);
    let xi = 0.5 * (2.0 * SQRT_2 * ratio).atan();
    let xi_dot = cfg.tau / (cfg.width * cfg.width) * f2(scaled_time(t, cfg));
    Ok((xi, xi_dot))
}

/// Parameters of the effective sech/tanh two-level model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DkParams {
    pub a: f64,
    pub t_eff: f64,
    pub t_max: f64,
    pub d: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

pub fn dk_params(cfg: &PulseConfig) -> Result<DkParams, DkError> {
    let g = delayed_rate(cfg)?;
    let t2 = cfg.width * cfg.width;
    let tau = cfg.tau;
    let at = atan_2sqrt2();
    let t_eff = t2 * at / (SQRT_2 * PI * tau);
    let d = -4.0 * 6f64.sqrt() * g / 25.0;
    let b = -64.0 * 3f64.sqrt() * g * at / (125.0 * PI);
    Ok(DkParams {
        a: tau / (SQRT_2 * t2),
        t_eff,
        t_max: t2 / (4.0 * tau) * 0.8f64.atanh(),
        d,
        b,
        alpha: at / (2.0 * PI),
        beta: 0.5 * b * t_eff,
        delta: 0.5 * d * t_eff,
    })
}

/// Survival and transition amplitudes of the crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DkAmplitudes {
    pub u_pp: f64,
    pub u_mp: f64,
}

pub fn dk_amplitudes(p: &DkParams) -> Result<DkAmplitudes, DkError> {
    let (al, be, de) = (p.alpha, p.beta, p.delta);
    let r = (be * be + al * al).sqrt();
    let args = [
        0.5 + de - be,
        0.5 + de + be,
        0.5 + de + r,
        0.5 + de - r,
        1.0 - be + r,
        1.0 - be - r,
        0.5 - de - be,
    ];
    if let Some(&x) = args.iter().find(|&&x| near_pole(x, 1e-12)) {
        return Err(DkError::GammaPole(x));
    }
    let u_pp = gamma(args[0]) * gamma(args[1]) / (gamma(args[2]) * gamma(args[3]));
    let u_mp = al * gamma(args[0]) * gamma(args[6]) / (gamma(args[4]) * gamma(args[5]));
    Ok(DkAmplitudes { u_pp, u_mp })
}

fn g_root(y: f64) -> f64 {
    1.0 + (1.0 + 8.0 * y * y / ((1.0 + y) * (1.0 + y))).sqrt()
}

/// `eps_plus / gamma`.
pub fn g_plus(x: f64) -> f64 {
    if x > 0.0 {
        let y = (-x).exp();
        (y * y - 1.0) * g_root(y) / (2.0 * (2.0 * y + 1.0).powi(2))
    } else {
        let e = x.exp();
        let root = 1.0 + (1.0 + 8.0 / ((1.0 + e) * (1.0 + e))).sqrt();
        (1.0 - e * e) * root / (2.0 * (2.0 + e).powi(2))
    }
}

/// `eps_minus / gamma`.
pub fn g_minus(x: f64) -> f64 {
    if x > 0.0 {
        let y = (-x).exp();
        4.0 * (1.0 - y) * y * y / ((1.0 + y) * (2.0 * y + 1.0).powi(2) * g_root(y))
    } else {
        let e = x.exp();
        let root = 1.0 + (1.0 + 8.0 / ((1.0 + e) * (1.0 + e))).sqrt();
        4.0 * (e - 1.0) / ((1.0 + e) * (2.0 + e).powi(2) * root)
    }
}

/// `Gamma_s / gamma`.
pub fn g_s(x: f64) -> f64 {
    if x > 0.0 {
        let y = (-x).exp();
        2.0 * y * (y + 2.0) / (2.0 * y + 1.0).powi(2)
    } else {
        let e = x.exp();
        2.0 * (1.0 + 2.0 * e) / (2.0 + e).powi(2)
    }
}

/// Population and coherence constants `(c_s, c_u)` by quadrature to
/// absolute tolerance `tol` per piece.
pub fn adiabatic_constants_with_tol(tol: f64) -> (f64, f64) {
    let left = quad::integrate_lower_infinite(|x| g_plus(x) - g_s(x), 0.0, tol, 0.0).value;
    let right_s = quad::integrate_upper_infinite(|x| g_minus(x) - g_s(x), 0.0, tol, 0.0).value;
    let right_u =
        quad::integrate_upper_infinite(|x| g_plus(x) - g_s(x) + 1.0, 0.0, tol, 0.0).value;
    (-(left + right_s), -(left + right_u))
}

/// `(c_s, c_u)` at tolerance 1e-12, computed once.
pub fn adiabatic_constants() -> (f64, f64) {
    static CONSTANTS: OnceLock<(f64, f64)> = OnceLock::new();
    *CONSTANTS.get_or_init(|| adiabatic_constants_with_tol(1e-12))
}

/// Exponents of the adiabatic decay factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticIntegrals {
    /// `-c_s gamma T^2 / (4 tau)`
    pub i_s: f64,
    /// Convergent part `-c_u gamma T^2 / (4 tau)`; the remainder is the
    /// factor `exp(-gamma t)` applied by [`analytic_dark_observables`].
    pub i_u_finite: f64,
    pub c_s: f64,
    pub c_u: f64,
}

pub fn adiabatic_integrals(cfg: &PulseConfig) -> Result<AdiabaticIntegrals, DkError> {
    let g = delayed_rate(cfg)?;
    let (c_s, c_u) = adiabatic_constants();
    let k = g * cfg.width * cfg.width / (4.0 * cfg.tau);
    Ok(AdiabaticIntegrals {
        i_s: -c_s * k,
        i_u_finite: -c_u * k,
        c_s,
        c_u,
    })
}

/// `(rho_a_11(inf), Re rho_a_12(t))`.
pub fn analytic_dark_observables(cfg: &PulseConfig, t: f64) -> Result<(f64, f64), DkError> {
    let g = delayed_rate(cfg)?;
    let amps = dk_amplitudes(&dk_params(cfg)?)?;
    let ints = adiabatic_integrals(cfg)?;
    let rho11 = 0.25 + 0.25 * 3f64.sqrt() * amps.u_mp * ints.i_s.exp();
    let coherence = if t.is_infinite() && g > 0.0 {
        0.0
    } else {
        (3.0f64 / 8.0).sqrt() * amps.u_pp * (ints.i_u_finite - g * t).exp()
    };
    Ok((rho11, coherence))
}

/// `F^2(t) = rho_a_11(inf) + Re rho_a_12(t)`; for infinite `t` only the
/// population survives.
pub fn analytic_fidelity(cfg: &PulseConfig, t_max_eval: f64) -> Result<f64, DkError> {
    let (rho11, coherence) = analytic_dark_observables(cfg, t_max_eval)?;
    if t_max_eval.is_infinite() {
        return Ok(rho11);
    }
    Ok(rho11 + coherence)
}

/// Weak-dephasing expansion of [`analytic_fidelity`].
pub fn weak_dephasing_fidelity(cfg: &PulseConfig, t_max_eval: f64) -> Result<f64, DkError> {
    let g = delayed_rate(cfg)?;
    let (c_s, c_u) = adiabatic_constants();
    let k = g * cfg.width * cfg.width / (4.0 * cfg.tau);
    Ok(0.25 * (1.0 + (-c_s * k).exp()) + 0.5 * (-c_u * k - g * t_max_eval).exp())
}

/// Dephasing-free transition time `T^2 ln((1 - eps)/eps) / (2 tau)` from
/// `F^2 = sin^2(theta) = e^x / (2 + e^x)`.
pub fn analytic_transition_time(cfg: &PulseConfig) -> Result<f64, DkError> {
    delayed_rate(cfg)?;
    let e = cfg.epsilon;
    Ok(cfg.width * cfg.width * ((1.0 - e) / e).ln() / (2.0 * cfg.tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::DephasingMatrix;

    fn cfg(gamma: f64, tau: f64) -> PulseConfig {
        PulseConfig::new(
            Ordering::Overlap,
            50.0,
            tau,
            DephasingMatrix::uniform(gamma).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn f_helpers() {
        assert_eq!(f1(0.0), 0.0);
        assert!((f2(0.0) - SQRT_2 / 3.0).abs() < 1e-15);
        assert!(f1(800.0).is_finite() && f2(800.0) == 0.0 && f2(-800.0) == 0.0);
    }

    #[test]
    fn su_at_limits() {
        let c = cfg(0.8, 1.5);
        let early = su_two_level(-40.0, &c).unwrap();
        assert!((early.delta_su - 0.2).abs() < 1e-14);
        let late = su_two_level(40.0, &c).unwrap();
        assert!(late.gamma_v.abs() < 1e-14);
    }

    #[test]
    fn params_closed_forms() {
        let c = cfg(1.0, 1.0);
        let p = dk_params(&c).unwrap();
        assert!((p.a - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((p.alpha - 0.19592).abs() < 1e-5);
        let at = atan_2sqrt2();
        let beta = -16.0 * 6f64.sqrt() * at * at / (125.0 * PI * PI);
        let delta = -2.0 * 3f64.sqrt() * at / (25.0 * PI);
        assert!((p.beta - beta).abs() < 1e-15);
        assert!((p.delta - delta).abs() < 1e-15);
        assert_eq!(dk_params(&cfg(1.0, 0.0)), Err(DkError::ZeroDelay));
    }

    #[test]
    fn zero_dephasing_amplitudes() {
        let p = dk_params(&cfg(0.0, 1.5)).unwrap();
        let a = dk_amplitudes(&p).unwrap();
        assert!((a.u_pp - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((a.u_mp - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((a.u_pp.powi(2) + a.u_mp.powi(2) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pole_detected() {
        let mut p = dk_params(&cfg(0.0, 1.5)).unwrap();
        p.delta = -0.5;
        p.beta = 0.0;
        assert!(matches!(dk_amplitudes(&p), Err(DkError::GammaPole(_))));
    }

    #[test]
    fn wrong_ordering() {
        let c = PulseConfig::new(Ordering::StokesControlPump, 50.0, 1.5, DephasingMatrix::zero())
            .unwrap();
        assert!(matches!(su_two_level(0.0, &c), Err(DkError::WrongOrdering(_))));
        let mut r = [[1.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        r[0][2] = 2.0;
        r[2][0] = 2.0;
        let c = cfg(1.0, 1.0).with_gamma(DephasingMatrix::new(r).unwrap());
        assert_eq!(dk_params(&c), Err(DkError::UnequalRates));
    }

    #[test]
    fn fidelity_limits() {
        let c = cfg(0.0, 1.5);
        assert!((analytic_fidelity(&c, 5.0).unwrap() - 1.0).abs() < 1e-12);
        let (p, q) = analytic_dark_observables(&c, 3.0).unwrap();
        assert!((p - 0.5).abs() < 1e-12 && (q - 0.5).abs() < 1e-12);
        let c = cfg(1.0, 1.5);
        let (p, _) = analytic_dark_observables(&c, 5.0).unwrap();
        assert_eq!(analytic_fidelity(&c, f64::INFINITY).unwrap(), p);
        let big = cfg(200.0, 1.5);
        let (p, _) = analytic_dark_observables(&big, 5.0).unwrap();
        assert!((p - 0.25).abs() < 1e-6);
    }

    #[test]
    fn transition_time_at_default_epsilon() {
        let c = cfg(0.0, 1.0);
        assert!((analytic_transition_time(&c).unwrap() - 3f64.ln()).abs() < 1e-15);
    }
}
