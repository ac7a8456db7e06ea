//! Master equation with pure dephasing, in the bare and the adiabatic basis.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::interp;
use crate::numerics::ode::{integrate_dense, OdeError, OdeOptions, OdeStats};
use crate::pulses::{DephasingMatrix, PulseConfig};
use crate::tripod::{adiabatic_frame, hamiltonian, target_state, TargetState};
use crate::{Mat4, Vec4, C64};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("at least 2 samples are required, got {0}")]
    Samples(usize),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("density matrix is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    Trace(f64),
    #[error("population {0} outside [0, 1]")]
    Population(f64),
    #[error("density matrix has non-finite entries")]
    NonFinite,
}

/// A 4x4 density matrix in the bare basis psi_1..psi_4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(rho: Mat4) -> Result<Self, StateError> {
        check_state(&rho)?;
        Ok(Self(rho))
    }

    /// `|psi><psi|` for a normalized `psi`.
    pub fn pure(psi: &Vec4) -> Self {
        Self(psi * psi.adjoint())
    }

    /// All population in psi_1.
    pub fn ground() -> Self {
        let mut m = Mat4::zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        Self(m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_inner(self) -> Mat4 {
        self.0
    }
}

/// Hermitian to 1e-9, unit trace to 1e-9, populations in [-1e-6, 1 + 1e-6].
pub fn check_state(rho: &Mat4) -> Result<(), StateError> {
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(StateError::NonFinite);
    }
    let dev = (rho - rho.adjoint()).camax();
    if dev > 1e-9 {
        return Err(StateError::NonHermitian(dev));
    }
    let tr = rho.trace();
    if (tr - 1.0).norm() > 1e-9 {
        return Err(StateError::Trace(tr.re));
    }
    for k in 0..4 {
        let p = rho[(k, k)].re;
        if !(-1e-6..=1.0 + 1e-6).contains(&p) {
            return Err(StateError::Population(p));
        }
    }
    Ok(())
}

/// Dissipator `D_mn = -i gamma_mn rho_mn`, zero on the diagonal.
pub fn dissipator(rho: &Mat4, gamma: &DephasingMatrix) -> Mat4 {
    Mat4::from_fn(|m, n| -I * gamma.get(m, n) * rho[(m, n)])
}

fn commutator(a: &Mat4, b: &Mat4) -> Mat4 {
    a * b - b * a
}

/// `d rho / dt = -i [H, rho] - i D(rho)`.
pub fn rhs_bare(t: f64, rho: &Mat4, cfg: &PulseConfig) -> Mat4 {
    let h = hamiltonian(t, cfg);
    (commutator(&h, rho) + dissipator(rho, &cfg.gamma)) * -I
}

/// `rho_a = R^dagger rho R`.
pub fn to_adiabatic(rho: &Mat4, t: f64, cfg: &PulseConfig) -> Mat4 {
    let r = adiabatic_frame(t, cfg).r;
    r.adjoint() * rho * r
}

/// `rho = R rho_a R^dagger`.
pub fn to_bare(rho_a: &Mat4, t: f64, cfg: &PulseConfig) -> Mat4 {
    let r = adiabatic_frame(t, cfg).r;
    r * rho_a * r.adjoint()
}

/// Master equation in the adiabatic basis, including the non-adiabatic
/// coupling `R^dagger dR/dt`.
pub fn rhs_adiabatic(t: f64, rho_a: &Mat4, cfg: &PulseConfig) -> Mat4 {
    let f = adiabatic_frame(t, cfg);
    let ha = f.hamiltonian();
    let k = f.connection();
    let rho = f.r * rho_a * f.r.adjoint();
    let d = f.r.adjoint() * dissipator(&rho, &cfg.gamma) * f.r;
    commutator(&ha, rho_a) * -I - commutator(&k, rho_a) - d * I
}

/// Basis in which the master equation is propagated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    #[default]
    Bare,
    Adiabatic,
}

pub fn flatten(m: &Mat4, out: &mut [f64]) {
    for (k, z) in m.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
}

pub fn unflatten(y: &[f64]) -> Mat4 {
    Mat4::from_iterator((0..16).map(|k| C64::new(y[2 * k], y[2 * k + 1])))
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Bare-basis states.
    pub rho: Vec<Mat4>,
    /// Adiabatic-basis states.
    pub rho_a: Vec<Mat4>,
    pub target: TargetState,
    /// `<Psi|rho|Psi>` at every sample.
    pub fidelity: Vec<f64>,
    pub stats: OdeStats,
    /// Smallest eigenvalue of any sampled state; positivity is only monitored.
    pub min_eigenvalue: f64,
    pub basis: Basis,
}

impl Trajectory {
    pub fn population(&self, k: usize) -> Vec<f64> {
        self.rho.iter().map(|r| r[(k, k)].re).collect()
    }

    pub fn adiabatic_population(&self, k: usize) -> Vec<f64> {
        self.rho_a.iter().map(|r| r[(k, k)].re).collect()
    }

    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity.last().unwrap()
    }

    /// Fidelity at `t` by monotone cubic interpolation of the samples.
    pub fn fidelity_at(&self, t: f64) -> f64 {
        interp::pchip_eval(&self.times, &self.fidelity, t)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `n` evenly spaced times covering the config window.
pub fn sample_times(cfg: &PulseConfig, n: usize) -> Vec<f64> {
    let h = (cfg.t_end - cfg.t_start) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|k| cfg.t_start + k as f64 * h).collect();
    v[n - 1] = cfg.t_end;
    v
}

pub fn ode_options(cfg: &PulseConfig) -> OdeOptions {
    // let the controller see every Gaussian peak
    OdeOptions {
        h_max: Some(0.05 * cfg.width),
        ..OdeOptions::default()
    }
}

/// Integrates from `|psi_1><psi_1|` at `t_start` and samples `samples`
/// evenly spaced times across the window.
pub fn integrate(
    cfg: &PulseConfig,
    basis: Basis,
    samples: usize,
) -> Result<Trajectory, LiouvilleError> {
    if samples < 2 {
        return Err(LiouvilleError::Samples(samples));
    }
    integrate_at(cfg, basis, &sample_times(cfg, samples))
}

/// As [`integrate`] with explicit sample times; `times[0]` is the start.
pub fn integrate_at(
    cfg: &PulseConfig,
    basis: Basis,
    times: &[f64],
) -> Result<Trajectory, LiouvilleError> {
    if times.len() < 2 {
        return Err(LiouvilleError::Samples(times.len()));
    }
    let rho0 = DensityMatrix::ground().into_inner();
    let mut y0 = vec![0.0; 32];
    let opts = ode_options(cfg);
    let (ys, stats) = match basis {
        Basis::Bare => {
            flatten(&rho0, &mut y0);
            integrate_dense(
                |t, y, dy| flatten(&rhs_bare(t, &unflatten(y), cfg), dy),
                &y0,
                times,
                &opts,
            )?
        }
        Basis::Adiabatic => {
            flatten(&to_adiabatic(&rho0, times[0], cfg), &mut y0);
            integrate_dense(
                |t, y, dy| flatten(&rhs_adiabatic(t, &unflatten(y), cfg), dy),
                &y0,
                times,
                &opts,
            )?
        }
    };

    let target = target_state(cfg);
    let psi = target.amplitudes;
    let mut rho = Vec::with_capacity(times.len());
    let mut rho_a = Vec::with_capacity(times.len());
    let mut fidelity = Vec::with_capacity(times.len());
    let mut min_eigenvalue = f64::INFINITY;
    for (&t, y) in times.iter().zip(&ys) {
        let m = unflatten(y);
        let r = adiabatic_frame(t, cfg).r;
        let (bare, adia) = match basis {
            Basis::Bare => (m, r.adjoint() * m * r),
            Basis::Adiabatic => (r * m * r.adjoint(), m),
        };
        fidelity.push((psi.adjoint() * bare * psi)[(0, 0)].re);
        let herm = (bare + bare.adjoint()) * C64::new(0.5, 0.0);
        let ev = SymmetricEigen::new(herm).eigenvalues.min();
        min_eigenvalue = min_eigenvalue.min(ev);
        rho.push(bare);
        rho_a.push(adia);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        rho,
        rho_a,
        target,
        fidelity,
        stats,
        min_eigenvalue,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::Ordering;

    fn random_state(seed: u64) -> Mat4 {
        // deterministic pseudo-random positive matrix
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = Mat4::from_fn(|_, _| C64::new(next(), next()));
        let m = a * a.adjoint();
        m / m.trace()
    }

    #[test]
    fn dissipator_examples() {
        let rho = random_state(3);
        assert_eq!(dissipator(&rho, &DephasingMatrix::zero()), Mat4::zeros());
        let g = DephasingMatrix::uniform(0.8).unwrap();
        let d = dissipator(&rho, &g);
        let off = rho - Mat4::from_diagonal(&rho.diagonal());
        assert!((d - off * (-I * 0.8)).norm() < 1e-15);
        for k in 0..4 {
            assert_eq!(d[(k, k)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn rhs_trace_free_and_fixed_point() {
        let cfg = PulseConfig::new(
            Ordering::StokesControlPump,
            30.0,
            1.0,
            DephasingMatrix::uniform(0.6).unwrap(),
        )
        .unwrap();
        let rho = random_state(11);
        assert!(rhs_bare(0.2, &rho, &cfg).trace().norm() < 1e-13);
        let mixed = Mat4::identity() * C64::new(0.25, 0.0);
        assert!(rhs_bare(0.2, &mixed, &cfg).norm() < 1e-14);
    }

    #[test]
    fn adiabatic_transform_examples() {
        let cfg =
            PulseConfig::new(Ordering::Overlap, 50.0, 1.5, DephasingMatrix::zero()).unwrap();
        let ra = to_adiabatic(DensityMatrix::ground().matrix(), cfg.t_start, &cfg);
        assert!((ra[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((ra[(1, 1)].re - 0.5).abs() < 1e-12);
        assert!((ra[(0, 1)] - 0.5).norm() < 1e-12);
        let mixed = Mat4::identity() * C64::new(0.25, 0.0);
        assert!((to_adiabatic(&mixed, 0.3, &cfg) - mixed).norm() < 1e-15);
        let rho = random_state(5);
        assert!((to_adiabatic(&rho, 0.3, &cfg).trace() - rho.trace()).norm() < 1e-14);
        assert!((to_bare(&to_adiabatic(&rho, 0.3, &cfg), 0.3, &cfg) - rho).norm() < 1e-14);
    }

    #[test]
    fn state_checks() {
        assert!(DensityMatrix::new(random_state(1)).is_ok());
        let mut m = random_state(2);
        m[(0, 1)] += C64::new(1e-6, 0.0);
        assert!(matches!(check_state(&m), Err(StateError::NonHermitian(_))));
        let m = random_state(2) * C64::new(2.0, 0.0);
        assert!(matches!(check_state(&m), Err(StateError::Trace(_))));
    }

    #[test]
    fn too_few_samples() {
        let cfg =
            PulseConfig::new(Ordering::Overlap, 50.0, 1.5, DephasingMatrix::zero()).unwrap();
        assert_eq!(
            integrate(&cfg, Basis::Bare, 1).unwrap_err(),
            LiouvilleError::Samples(1)
        );
    }

    #[test]
    fn flatten_round_trip() {
        let m = random_state(9);
        let mut y = vec![0.0; 32];
        flatten(&m, &mut y);
        assert_eq!(unflatten(&y), m);
    }
}
