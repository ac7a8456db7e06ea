//! Real gamma function via the Lanczos approximation.

// published coefficients, kept digit for digit
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function on the real line. Non-positive integers return infinity
/// (of either sign); use [`near_pole`] to detect them first.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let w = z + LANCZOS_G + 0.5;
        // split the power to delay overflow for large arguments
        let p = w.powf(0.5 * (z + 0.5));
        (2.0 * PI).sqrt() * p * ((-w).exp() * p) * acc
    }
}

/// True when `x` lies within `tol` of a pole (0, -1, -2, ...).
pub fn near_pole(x: f64, tol: f64) -> bool {
    x <= tol && (x - x.round()).abs() < tol
}
