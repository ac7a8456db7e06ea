//! Tripod Hamiltonian, its analytic adiabatic eigenbasis and the target
//! superpositions reached by adiabatic passage.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::numerics::quad;
use crate::pulses::{mixing_angles, pulse_envelopes, rms_rabi, MixingAngles, Ordering, PulseConfig};
use crate::{Mat4, Vec4, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Resonant RWA Hamiltonian in the bare basis psi_1..psi_4, with psi_2 the
/// common excited state.
pub fn hamiltonian(t: f64, cfg: &PulseConfig) -> Mat4 {
    let (p, s, c) = pulse_envelopes(t, cfg);
    let mut h = Mat4::zeros();
    h[(0, 1)] = re(0.5 * p);
    h[(1, 0)] = re(0.5 * p);
    h[(1, 2)] = re(0.5 * s);
    h[(2, 1)] = re(0.5 * s);
    h[(1, 3)] = re(0.5 * c);
    h[(3, 1)] = re(0.5 * c);
    h
}

/// Columns are the dark states Phi_1, Phi_2 and bright states Phi_3, Phi_4.
pub fn frame_matrix(theta: f64, phi: f64) -> Mat4 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let k = FRAC_1_SQRT_2;
    let c = |a: f64, b: f64| C64::new(k * a, k * b);
    Mat4::new(
        c(ct, 0.0), c(ct, 0.0), c(st, 0.0), c(st, 0.0),
        ZERO, ZERO, c(1.0, 0.0), c(-1.0, 0.0),
        c(-st * cp, -sp), c(-st * cp, sp), c(ct * cp, 0.0), c(ct * cp, 0.0),
        c(-st * sp, cp), c(-st * sp, -cp), c(ct * sp, 0.0), c(ct * sp, 0.0),
    )
}

/// Partial derivatives of [`frame_matrix`] with respect to theta and phi.
pub fn frame_matrix_partials(theta: f64, phi: f64) -> (Mat4, Mat4) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let k = FRAC_1_SQRT_2;
    let c = |a: f64, b: f64| C64::new(k * a, k * b);
    let d_theta = Mat4::new(
        c(-st, 0.0), c(-st, 0.0), c(ct, 0.0), c(ct, 0.0),
        ZERO, ZERO, ZERO, ZERO,
        c(-ct * cp, 0.0), c(-ct * cp, 0.0), c(-st * cp, 0.0), c(-st * cp, 0.0),
        c(-ct * sp, 0.0), c(-ct * sp, 0.0), c(-st * sp, 0.0), c(-st * sp, 0.0),
    );
    let d_phi = Mat4::new(
        ZERO, ZERO, ZERO, ZERO,
        ZERO, ZERO, ZERO, ZERO,
        c(st * sp, -cp), c(st * sp, cp), c(-ct * sp, 0.0), c(-ct * sp, 0.0),
        c(-st * cp, -sp), c(-st * cp, sp), c(ct * cp, 0.0), c(ct * cp, 0.0),
    );
    (d_theta, d_phi)
}

/// Instantaneous adiabatic basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrame {
    pub t: f64,
    /// Rotation to the adiabatic basis; columns Phi_1..Phi_4.
    pub r: Mat4,
    /// Time derivative of `r` from the closed-form angle derivatives.
    pub r_dot: Mat4,
    /// (0, 0, Omega/2, -Omega/2)
    pub energies: [f64; 4],
    pub angles: MixingAngles,
    pub rabi: f64,
}

impl AdiabaticFrame {
    /// Non-adiabatic coupling `R^dagger dR/dt`.
    pub fn connection(&self) -> Mat4 {
        self.r.adjoint() * self.r_dot
    }

    /// Column `k` of `r`.
    pub fn state(&self, k: usize) -> Vec4 {
        self.r.column(k).into_owned()
    }

    pub fn hamiltonian(&self) -> Mat4 {
        Mat4::from_diagonal(&Vec4::from_iterator(self.energies.iter().map(|&e| re(e))))
    }
}

pub fn adiabatic_frame(t: f64, cfg: &PulseConfig) -> AdiabaticFrame {
    let angles = mixing_angles(t, cfg);
    let r = frame_matrix(angles.theta, angles.phi);
    let (dt, dp) = frame_matrix_partials(angles.theta, angles.phi);
    let r_dot = dt * re(angles.theta_dot) + dp * re(angles.phi_dot);
    let rabi = rms_rabi(t, cfg);
    AdiabaticFrame {
        t,
        r,
        r_dot,
        energies: [0.0, 0.0, 0.5 * rabi, -0.5 * rabi],
        angles,
        rabi,
    }
}

/// Geometric phase `int phi_dot sin(theta) dt` over the configured window.
pub fn geometric_phase(cfg: &PulseConfig) -> f64 {
    if cfg.ordering == Ordering::Overlap {
        return 0.0;
    }
    quad::integrate(
        |t| {
            let a = mixing_angles(t, cfg);
            a.phi_dot * a.theta.sin()
        },
        cfg.t_start,
        cfg.t_end,
        1e-11,
        0.0,
    )
    .value
}

/// Target superposition over psi_1..psi_4 for a pulse ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetState {
    #[serde(skip)]
    pub amplitudes: Vec4,
    pub thetag: f64,
}

impl TargetState {
    pub fn for_ordering(ordering: Ordering, thetag: f64) -> Self {
        let (s, c) = thetag.sin_cos();
        let a = |v: [f64; 4]| Vec4::new(re(v[0]), re(v[1]), re(v[2]), re(v[3]));
        let (amplitudes, thetag) = match ordering {
            Ordering::Overlap => (a([0.0, 0.0, -FRAC_1_SQRT_2, -FRAC_1_SQRT_2]), 0.0),
            Ordering::Fractional => (a([c, 0.0, -s, 0.0]), thetag),
            Ordering::StokesControlPump => (a([0.0, 0.0, -s, -c]), thetag),
            Ordering::ControlStokesPump => (a([0.0, 0.0, -c, s]), thetag),
        };
        Self { amplitudes, thetag }
    }
}

pub fn target_state(cfg: &PulseConfig) -> TargetState {
    TargetState::for_ordering(cfg.ordering, geometric_phase(cfg))
}
