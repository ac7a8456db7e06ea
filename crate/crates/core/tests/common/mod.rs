//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

use tripod_core::pulses::{DephasingMatrix, Ordering, PulseConfig};

pub fn config(ordering: Ordering, omega0: f64, tau: f64, gamma: f64) -> PulseConfig {
    PulseConfig::new(
        ordering,
        omega0,
        tau,
        DephasingMatrix::uniform(gamma).unwrap(),
    )
    .unwrap()
}

/// Classical fixed-step RK4 for real systems.
pub fn rk4<F>(mut f: F, y0: &[f64], t0: f64, t1: f64, steps: usize) -> Vec<f64>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    let add = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(a, b)| a + s * b).collect()
    };
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &add(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// Brute-force amplitudes `(U_pp, U_mp)` of the sech/tanh two-level model
/// for `x = gamma T^2 / tau`, written directly from the model definition:
/// coupling `A sech((t - t_m)/T_e)`, detuning `D + B tanh((t - t_m)/T_e)`.
pub fn dk_oracle(x: f64, tau: f64) -> (f64, f64) {
    let t2 = 1.0;
    let gamma = x * tau / t2;
    let at = (2.0 * SQRT_2).atan();
    let a = tau / (SQRT_2 * t2);
    let te = t2 * at / (SQRT_2 * PI * tau);
    let tm = t2 / (4.0 * tau) * 0.8f64.atanh();
    let d = -4.0 * 6f64.sqrt() * gamma / 25.0;
    let b = -64.0 * 3f64.sqrt() * gamma * at / (125.0 * PI);
    // antiderivative of the detuning, symmetric about t_m
    let phase = |t: f64| {
        let z = (t - tm) / te;
        let lncosh = z.abs() + (-2.0 * z.abs()).exp().ln_1p();
        d * (t - tm) + b * te * lncosh
    };
    let span = 12.0 * te;
    let y = rk4(
        |t, y| {
            let c = a / ((t - tm) / te).cosh();
            let e = phase(t).exp();
            vec![c * e * y[1], -c / e * y[0]]
        },
        &[0.0, 1.0],
        tm - span,
        tm + span,
        40_000,
    );
    (y[1], y[0])
}

/// Central difference.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Composite Simpson rule on `n` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Adiabatic frame written out column by column (dark, dark, bright+, bright-).
pub fn frame(theta: f64, phi: f64) -> tripod_core::Mat4 {
    use tripod_core::C64;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    let cols = [
        [r(ct), r(0.0), C64::new(-st * cp, -sp), C64::new(-st * sp, cp)],
        [r(ct), r(0.0), C64::new(-st * cp, sp), C64::new(-st * sp, -cp)],
        [r(st), r(1.0), r(ct * cp), r(ct * sp)],
        [r(st), r(-1.0), r(ct * cp), r(ct * sp)],
    ];
    tripod_core::Mat4::from_fn(|i, j| cols[j][i] / SQRT_2)
}

/// Symmetric rate matrix from six off-diagonal rates (12, 13, 14, 23, 24, 34).
pub fn rate_matrix(g: [f64; 6]) -> DephasingMatrix {
    let [a, b, c, d, e, f] = g;
    DephasingMatrix::new([
        [0.0, a, b, c],
        [a, 0.0, d, e],
        [b, d, 0.0, f],
        [c, e, f, 0.0],
    ])
    .unwrap()
}
