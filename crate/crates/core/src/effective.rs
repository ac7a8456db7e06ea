//! Reduced dark-state model: the Bloch-like variables (s, u, v), their
//! effective rates and couplings, and numerical extraction of the
//! dark-block dissipator tensor.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::liouville::{sample_times, ode_options, LiouvilleError};
use crate::numerics::ode::{integrate_dense, OdeStats};
use crate::pulses::{mixing_angles, DephasingMatrix, MixingAngles, PulseConfig};
use crate::tripod::{adiabatic_frame, frame_matrix};
use crate::{Mat4, C64};

/// Effective relaxation rates and couplings of the (s, u, v) system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveRates {
    pub gamma_s: f64,
    pub gamma_u: f64,
    pub gamma_v: f64,
    pub omega_su: f64,
    pub omega_sv: f64,
    pub omega_uv: f64,
}

/// Closed forms in theta, phi; only gamma_13, gamma_14 and gamma_34 enter.
pub fn effective_rates(angles: &MixingAngles, gamma: &DephasingMatrix) -> EffectiveRates {
    rates_at(angles.theta, angles.phi, gamma)
}

pub fn rates_at(theta: f64, phi: f64, gamma: &DephasingMatrix) -> EffectiveRates {
    let (g13, g14, g34) = (gamma.get(0, 2), gamma.get(0, 3), gamma.get(2, 3));
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let s2t = (2.0 * theta).sin();
    let s2p = (2.0 * phi).sin();
    let c2p = (2.0 * phi).cos();
    let s4p = (4.0 * phi).sin();
    let ct2 = ct * ct;
    let st2 = st * st;
    let g1 = cp * cp * g13 + sp * sp * g14;

    EffectiveRates {
        gamma_s: 0.5 * s2t * s2t * g1 + 0.5 * ct2 * ct2 * s2p * s2p * g34,
        gamma_u: 0.25 * s2t * s2t * g1 + 0.25 * (1.0 + st2).powi(2) * s2p * s2p * g34,
        gamma_v: ct2 * (sp * sp * g13 + cp * cp * g14) + st2 * c2p * c2p * g34,
        omega_su: 0.25 * s2t * s2t * g1 - 0.25 * ct2 * (1.0 + st2) * s2p * s2p * g34,
        omega_sv: -0.25 * ct2 * st * s4p * g34 + 0.5 * ct2 * st * s2p * (g14 - g13),
        omega_uv: ((3.0 * theta).sin() - 7.0 * st) * s4p * g34 / 16.0
            - 0.5 * ct2 * st * s2p * (g14 - g13),
    }
}

/// `s` parametrizes the dark populations, `u + i v = sqrt(2) rho_a_12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkBlochVector {
    pub s: f64,
    pub u: f64,
    pub v: f64,
}

impl DarkBlochVector {
    /// State at `t -> -inf`: all population in psi_1.
    pub fn initial() -> Self {
        Self {
            s: -0.5,
            u: std::f64::consts::FRAC_1_SQRT_2,
            v: 0.0,
        }
    }

    /// `rho_a_11 = rho_a_22 = 1/4 - s/2`.
    pub fn dark_population(&self) -> f64 {
        0.25 - 0.5 * self.s
    }

    /// `rho_a_33 = rho_a_44 = 1/4 + s/2`.
    pub fn bright_population(&self) -> f64 {
        0.25 + 0.5 * self.s
    }

    pub fn dark_coherence(&self) -> C64 {
        C64::new(self.u, self.v) / SQRT_2
    }

    /// Adiabatic-basis density matrix; bright coherences vanish.
    pub fn to_adiabatic(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        let d = C64::new(self.dark_population(), 0.0);
        let b = C64::new(self.bright_population(), 0.0);
        m[(0, 0)] = d;
        m[(1, 1)] = d;
        m[(2, 2)] = b;
        m[(3, 3)] = b;
        m[(0, 1)] = self.dark_coherence();
        m[(1, 0)] = self.dark_coherence().conj();
        m
    }

    /// Bare-basis density matrix at `t`.
    pub fn to_bare(&self, t: f64, cfg: &PulseConfig) -> Mat4 {
        let r = adiabatic_frame(t, cfg).r;
        r * self.to_adiabatic() * r.adjoint()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EffectiveMode {
    /// All rates and couplings.
    #[default]
    Full,
    /// Drops the Omega couplings: `s` decays on its own and (u, v) rotate
    /// at `2 phi_dot sin(theta)` while decaying.
    WeakDephasing,
}

#[derive(Debug, Clone)]
pub struct SuvTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DarkBlochVector>,
    pub stats: OdeStats,
}

pub fn suv_rhs(t: f64, y: &[f64], cfg: &PulseConfig, mode: EffectiveMode) -> [f64; 3] {
    let a = mixing_angles(t, cfg);
    let r = effective_rates(&a, &cfg.gamma);
    let (s, u, v) = (y[0], y[1], y[2]);
    let w = 2.0 * a.phi_dot * a.theta.sin();
    match mode {
        EffectiveMode::Full => [
            -r.gamma_s * s + SQRT_2 * (r.omega_su * u + r.omega_sv * v),
            -r.gamma_u * u + (w + r.omega_uv) * v + SQRT_2 * r.omega_su * s,
            -r.gamma_v * v + (r.omega_uv - w) * u + SQRT_2 * r.omega_sv * s,
        ],
        EffectiveMode::WeakDephasing => [
            -r.gamma_s * s,
            -r.gamma_u * u + w * v,
            -r.gamma_v * v - w * u,
        ],
    }
}

/// Integrates (s, u, v) from [`DarkBlochVector::initial`] at `t_start`.
pub fn integrate_suv(
    cfg: &PulseConfig,
    mode: EffectiveMode,
    samples: usize,
) -> Result<SuvTrajectory, LiouvilleError> {
    if samples < 2 {
        return Err(LiouvilleError::Samples(samples));
    }
    integrate_suv_at(cfg, mode, &sample_times(cfg, samples))
}

pub fn integrate_suv_at(
    cfg: &PulseConfig,
    mode: EffectiveMode,
    times: &[f64],
) -> Result<SuvTrajectory, LiouvilleError> {
    if times.len() < 2 {
        return Err(LiouvilleError::Samples(times.len()));
    }
    let y0 = DarkBlochVector::initial();
    let (ys, stats) = integrate_dense(
        |t, y, dy| dy.copy_from_slice(&suv_rhs(t, y, cfg, mode)),
        &[y0.s, y0.u, y0.v],
        times,
        &ode_options(cfg),
    )?;
    Ok(SuvTrajectory {
        times: times.to_vec(),
        states: ys
            .iter()
            .map(|y| DarkBlochVector {
                s: y[0],
                u: y[1],
                v: y[2],
            })
            .collect(),
        stats,
    })
}

/// Dark-block action of the adiabatic-frame dissipator:
/// `d rho_a_kl / dt = -d[i][j][k][l] rho_a_ij - d0[k][l] + ...` after the
/// bright populations are replaced by `(1 - rho_a_11 - rho_a_22) / 2`.
/// Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorTensor {
    pub d: [[[[C64; 2]; 2]; 2]; 2],
    pub d0: [[C64; 2]; 2],
}

impl DissipatorTensor {
    /// Component with 1-based indices as usually written.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.d[i - 1][j - 1][k - 1][l - 1]
    }

    pub fn get0(&self, k: usize, l: usize) -> C64 {
        self.d0[k - 1][l - 1]
    }

    /// Rates recovered from the tensor components.
    pub fn rates(&self) -> EffectiveRates {
        let g = |i, j, k, l| self.get(i, j, k, l);
        EffectiveRates {
            gamma_s: (g(1, 1, 1, 1) + g(2, 2, 1, 1)).re,
            gamma_u: (g(1, 2, 1, 2) + g(1, 2, 2, 1)).re,
            gamma_v: (g(1, 2, 1, 2) - g(1, 2, 2, 1)).re,
            omega_su: g(1, 1, 1, 2).re,
            omega_sv: g(1, 1, 1, 2).im,
            omega_uv: g(1, 2, 2, 1).im,
        }
    }
}

/// Extracts the tensor by applying `X -> R^dagger (gamma o (R X R^dagger)) R`
/// to basis matrices.
pub fn dissipator_tensor_at(theta: f64, phi: f64, gamma: &DephasingMatrix) -> DissipatorTensor {
    let r = frame_matrix(theta, phi);
    let ra = r.adjoint();
    let action = |x: &Mat4| -> Mat4 {
        let b = r * x * ra;
        let g = Mat4::from_fn(|m, n| b[(m, n)] * gamma.get(m, n));
        ra * g * r
    };
    let unit = |i: usize, j: usize| {
        let mut e = Mat4::zeros();
        e[(i, j)] = C64::new(1.0, 0.0);
        e
    };
    let bright = action(&(unit(2, 2) + unit(3, 3))) * C64::new(0.5, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut d = [[[[zero; 2]; 2]; 2]; 2];
    for (i, di) in d.iter_mut().enumerate() {
        for (j, dij) in di.iter_mut().enumerate() {
            let mut m = action(&unit(i, j));
            if i == j {
                m -= bright;
            }
            for (k, dijk) in dij.iter_mut().enumerate() {
                for (l, v) in dijk.iter_mut().enumerate() {
                    *v = m[(k, l)];
                }
            }
        }
    }
    let d0 = [
        [bright[(0, 0)], bright[(0, 1)]],
        [bright[(1, 0)], bright[(1, 1)]],
    ];
    DissipatorTensor { d, d0 }
}

pub fn dissipator_tensor(t: f64, cfg: &PulseConfig) -> DissipatorTensor {
    let a = mixing_angles(t, cfg);
    dissipator_tensor_at(a.theta, a.phi, &cfg.gamma)
}
