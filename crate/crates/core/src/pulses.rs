//! Gaussian pulse sequences, dephasing rates and the mixing angles.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("omega0 must be positive, got {0}")]
    Omega0(f64),
    #[error("tau must be non-negative, got {0}")]
    Tau(f64),
    #[error("width must be positive, got {0}")]
    Width(f64),
    #[error("epsilon must lie in (0, 1/2), got {0}")]
    Epsilon(f64),
    #[error("integration window is empty: [{0}, {1}]")]
    Window(f64, f64),
    #[error("pulse envelope {value:e} at t = {t} exceeds 1e-6 omega0; widen the window")]
    WindowTooShort { t: f64, value: f64 },
    #[error("dephasing matrix must be symmetric")]
    Asymmetric,
    #[error("dephasing rates must be non-negative")]
    NegativeRate,
    #[error("dephasing matrix must have a zero diagonal")]
    NonzeroDiagonal,
    #[error("dephasing rates must be finite")]
    NonFinite,
    #[error("cannot parse dephasing matrix: {0}")]
    Parse(String),
    #[error("unknown pulse ordering '{0}' (expected overlap, scp, csp or fractional)")]
    UnknownOrdering(String),
}

/// The four pulse sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// Stokes and control coincide and precede the pump.
    Overlap,
    #[serde(rename = "scp")]
    StokesControlPump,
    #[serde(rename = "csp")]
    ControlStokesPump,
    /// Pump and the wider Stokes start together, the control comes last.
    Fractional,
}

impl Ordering {
    pub const ALL: [Ordering; 4] = [
        Ordering::Overlap,
        Ordering::StokesControlPump,
        Ordering::ControlStokesPump,
        Ordering::Fractional,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ordering::Overlap => "overlap",
            Ordering::StokesControlPump => "scp",
            Ordering::ControlStokesPump => "csp",
            Ordering::Fractional => "fractional",
        }
    }

    /// (centre, width) of the pump, Stokes and control pulses.
    pub fn pulses(self, tau: f64, width: f64) -> [Pulse; 3] {
        let h = 0.5 * tau;
        let w = width;
        let w2 = std::f64::consts::SQRT_2 * width;
        let p = |center, width| Pulse { center, width };
        match self {
            Ordering::Overlap => [p(h, w), p(-h, w), p(-h, w)],
            Ordering::StokesControlPump => [p(h, w), p(-h, w), p(0.0, w)],
            Ordering::ControlStokesPump => [p(h, w), p(0.0, w), p(-h, w)],
            Ordering::Fractional => [p(-h, w), p(-h, w2), p(h, w2)],
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ordering {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "overlap" => Ok(Ordering::Overlap),
            "scp" | "stokes-control-pump" => Ok(Ordering::StokesControlPump),
            "csp" | "control-stokes-pump" => Ok(Ordering::ControlStokesPump),
            "fractional" | "frac" => Ok(Ordering::Fractional),
            _ => Err(ConfigError::UnknownOrdering(s.to_string())),
        }
    }
}

/// A Gaussian `exp(-(t - center)^2 / width^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub center: f64,
    pub width: f64,
}

impl Pulse {
    fn log(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        -x * x
    }

    fn log_dot(&self, t: f64) -> f64 {
        -2.0 * (t - self.center) / (self.width * self.width)
    }
}

/// Symmetric pure-dephasing rates `gamma[i][j]` between bare states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 4]; 4]", into = "[[f64; 4]; 4]")]
pub struct DephasingMatrix {
    rates: [[f64; 4]; 4],
}

impl DephasingMatrix {
    pub fn new(rates: [[f64; 4]; 4]) -> Result<Self, ConfigError> {
        for i in 0..4 {
            if rates[i][i] != 0.0 {
                return Err(ConfigError::NonzeroDiagonal);
            }
            for j in 0..4 {
                let g = rates[i][j];
                if !g.is_finite() {
                    return Err(ConfigError::NonFinite);
                }
                if g < 0.0 {
                    return Err(ConfigError::NegativeRate);
                }
                if g != rates[j][i] {
                    return Err(ConfigError::Asymmetric);
                }
            }
        }
        Ok(Self { rates })
    }

    pub fn zero() -> Self {
        Self {
            rates: [[0.0; 4]; 4],
        }
    }

    /// All off-diagonal rates equal to `gamma`.
    pub fn uniform(gamma: f64) -> Result<Self, ConfigError> {
        let mut rates = [[gamma; 4]; 4];
        for (i, row) in rates.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        Self::new(rates)
    }

    /// Parses four rows of four numbers separated by whitespace or commas.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| ConfigError::Parse(format!("bad number '{s}'")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != 4 {
                return Err(ConfigError::Parse(format!(
                    "expected 4 entries per row, found {}",
                    row.len()
                )));
            }
            rows.push([row[0], row[1], row[2], row[3]]);
        }
        if rows.len() != 4 {
            return Err(ConfigError::Parse(format!(
                "expected 4 rows, found {}",
                rows.len()
            )));
        }
        Self::new([rows[0], rows[1], rows[2], rows[3]])
    }

    /// Rate for the pair (i, j), 0-indexed.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rates[i][j]
    }

    pub fn rates(&self) -> &[[f64; 4]; 4] {
        &self.rates
    }

    /// The common rate when gamma_13 = gamma_14 = gamma_34, the only rates
    /// entering the dark-state dynamics.
    pub fn equal_dark_rate(&self) -> Option<f64> {
        let g = self.rates[0][2];
        (self.rates[0][3] == g && self.rates[2][3] == g).then_some(g)
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().flatten().fold(0.0, |a, &b| a.max(b))
    }
}

impl TryFrom<[[f64; 4]; 4]> for DephasingMatrix {
    type Error = ConfigError;
    fn try_from(rates: [[f64; 4]; 4]) -> Result<Self, Self::Error> {
        Self::new(rates)
    }
}

impl From<DephasingMatrix> for [[f64; 4]; 4] {
    fn from(m: DephasingMatrix) -> Self {
        m.rates
    }
}

/// Full definition of one experiment. Times in units of `width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseConfig {
    pub ordering: Ordering,
    pub omega0: f64,
    pub tau: f64,
    pub width: f64,
    pub gamma: DephasingMatrix,
    pub t_start: f64,
    pub t_end: f64,
    pub epsilon: f64,
}

impl PulseConfig {
    /// Config with unit width, the default window `[-6T - tau, 6T + tau]`
    /// and epsilon = 0.1.
    pub fn new(
        ordering: Ordering,
        omega0: f64,
        tau: f64,
        gamma: DephasingMatrix,
    ) -> Result<Self, ConfigError> {
        let (t_start, t_end) = Self::default_window(tau, 1.0);
        let cfg = Self {
            ordering,
            omega0,
            tau,
            width: 1.0,
            gamma,
            t_start,
            t_end,
            epsilon: 0.1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn default_window(tau: f64, width: f64) -> (f64, f64) {
        (-6.0 * width - tau, 6.0 * width + tau)
    }

    pub fn with_window(mut self, t_start: f64, t_end: f64) -> Result<Self, ConfigError> {
        self.t_start = t_start;
        self.t_end = t_end;
        self.validate()?;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self, ConfigError> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: DephasingMatrix) -> Self {
        self.gamma = gamma;
        self
    }

    /// New width; the window is reset to the default for it.
    pub fn with_width(mut self, width: f64) -> Result<Self, ConfigError> {
        self.width = width;
        (self.t_start, self.t_end) = Self::default_window(self.tau, width);
        self.validate()?;
        Ok(self)
    }

    pub fn with_tau(mut self, tau: f64) -> Result<Self, ConfigError> {
        self.tau = tau;
        (self.t_start, self.t_end) = Self::default_window(tau, self.width);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(ConfigError::Omega0(self.omega0));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(ConfigError::Tau(self.tau));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(ConfigError::Width(self.width));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if !(self.t_start < self.t_end) || !self.t_start.is_finite() || !self.t_end.is_finite() {
            return Err(ConfigError::Window(self.t_start, self.t_end));
        }
        for t in [self.t_start, self.t_end] {
            let (p, s, c) = pulse_envelopes(t, self);
            let value = p.max(s).max(c);
            if value >= 1e-6 * self.omega0 {
                return Err(ConfigError::WindowTooShort { t, value });
            }
        }
        Ok(())
    }

    /// Stable text form used for hashing and CSV headers.
    pub fn canonical(&self) -> String {
        let g = self.gamma.rates();
        format!(
            "ordering={} omega0={:?} tau={:?} width={:?} t_start={:?} t_end={:?} epsilon={:?} \
             gamma12={:?} gamma13={:?} gamma14={:?} gamma23={:?} gamma24={:?} gamma34={:?}",
            self.ordering,
            self.omega0,
            self.tau,
            self.width,
            self.t_start,
            self.t_end,
            self.epsilon,
            g[0][1],
            g[0][2],
            g[0][3],
            g[1][2],
            g[1][3],
            g[2][3]
        )
    }

    fn pulses(&self) -> [Pulse; 3] {
        self.ordering.pulses(self.tau, self.width)
    }
}

/// Mixing angles and their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingAngles {
    pub theta: f64,
    pub phi: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
}

/// Pump, Stokes and control Rabi frequencies at `t`.
pub fn pulse_envelopes(t: f64, cfg: &PulseConfig) -> (f64, f64, f64) {
    let [p, s, c] = cfg.pulses();
    (
        cfg.omega0 * p.log(t).exp(),
        cfg.omega0 * s.log(t).exp(),
        cfg.omega0 * c.log(t).exp(),
    )
}

pub fn rms_rabi(t: f64, cfg: &PulseConfig) -> f64 {
    let (p, s, c) = pulse_envelopes(t, cfg);
    (p * p + s * s + c * c).sqrt()
}

// atan(e^d) without overflow
fn atan_exp(d: f64) -> f64 {
    if d > 0.0 {
        FRAC_PI_2 - (-d).exp().atan()
    } else {
        d.exp().atan()
    }
}

/// `tan(phi) = Omega_c / Omega_s` and `tan(theta) = Omega_p / sqrt(Omega_s^2 + Omega_c^2)`,
/// evaluated from differences of log-envelopes so that the limits survive
/// envelope underflow.
pub fn mixing_angles(t: f64, cfg: &PulseConfig) -> MixingAngles {
    let [p, s, c] = cfg.pulses();
    let (lp, ls, lc) = (p.log(t), s.log(t), c.log(t));
    let (dlp, dls, dlc) = (p.log_dot(t), s.log_dot(t), c.log_dot(t));

    let d_phi = lc - ls;
    let phi = atan_exp(d_phi);
    let phi_dot = (dlc - dls) / (2.0 * d_phi.cosh());

    // m = ln sqrt(e^{2 ls} + e^{2 lc})
    let hi = ls.max(lc);
    let m = hi + 0.5 * ((2.0 * (ls - hi)).exp() + (2.0 * (lc - hi)).exp()).ln();
    let (sp, cp) = phi.sin_cos();
    let m_dot = cp * cp * dls + sp * sp * dlc;

    let d_theta = lp - m;
    let theta = atan_exp(d_theta);
    let theta_dot = (dlp - m_dot) / (2.0 * d_theta.cosh());

    MixingAngles {
        theta,
        phi,
        theta_dot,
        phi_dot,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn cfg(ordering: Ordering, tau: f64) -> PulseConfig {
        PulseConfig::new(ordering, 50.0, tau, DephasingMatrix::zero()).unwrap()
    }

    #[test]
    fn overlap_envelopes() {
        let tau = 1.5;
        let c = cfg(Ordering::Overlap, tau);
        let (p, s, k) = pulse_envelopes(-tau / 2.0, &c);
        assert_eq!(s, 50.0);
        assert_eq!(k, 50.0);
        assert!((p - 50.0 * (-tau * tau).exp()).abs() < 1e-12);
        let (p, _, _) = pulse_envelopes(tau / 2.0, &c);
        assert_eq!(p, 50.0);
    }

    #[test]
    fn scp_envelopes_at_origin() {
        let tau = 1.5;
        let c = cfg(Ordering::StokesControlPump, tau);
        let (p, s, k) = pulse_envelopes(0.0, &c);
        let e = 50.0 * (-tau * tau / 4.0).exp();
        assert_eq!(k, 50.0);
        assert!((p - e).abs() < 1e-12 && (s - e).abs() < 1e-12);
    }

    #[test]
    fn csp_swaps_stokes_and_control() {
        let a = cfg(Ordering::StokesControlPump, 1.2);
        let b = cfg(Ordering::ControlStokesPump, 1.2);
        for &t in &[-2.0, -0.3, 0.0, 0.9] {
            let (p1, s1, c1) = pulse_envelopes(t, &a);
            let (p2, s2, c2) = pulse_envelopes(t, &b);
            assert_eq!((p1, s1, c1), (p2, c2, s2));
        }
    }

    #[test]
    fn overlap_angles() {
        let c = cfg(Ordering::Overlap, 1.5);
        for &t in &[-20.0, -3.0, 0.0, 0.4, 7.0] {
            let a = mixing_angles(t, &c);
            assert_eq!(a.phi, FRAC_PI_4);
            assert_eq!(a.phi_dot, 0.0);
        }
        let a = mixing_angles(0.0, &c);
        assert!((a.theta.tan() - 1.0 / SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn angle_limits_survive_underflow() {
        let c = cfg(Ordering::StokesControlPump, 1.5);
        let early = mixing_angles(-60.0, &c);
        let late = mixing_angles(60.0, &c);
        assert!(early.theta < 1e-60);
        assert_eq!(late.theta, FRAC_PI_2);
        assert!(early.phi.abs() < 1e-12);
        assert!((late.phi - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rms_rabi_values() {
        let tau = 1.5;
        let c = cfg(Ordering::Overlap, tau);
        let expect = 50.0 * (2.0 + (-2.0 * tau * tau).exp()).sqrt();
        assert!((rms_rabi(-tau / 2.0, &c) - expect).abs() < 1e-12);
        let z = cfg(Ordering::StokesControlPump, 0.0);
        assert!((rms_rabi(0.0, &z) - 3f64.sqrt() * 50.0).abs() < 1e-12);
        assert_eq!(rms_rabi(1e3, &z), 0.0);
    }

    #[test]
    fn config_validation() {
        let g = DephasingMatrix::zero();
        assert!(PulseConfig::new(Ordering::Overlap, 0.0, 1.0, g).is_err());
        assert!(PulseConfig::new(Ordering::Overlap, 1.0, -1.0, g).is_err());
        let c = PulseConfig::new(Ordering::Overlap, 1.0, 1.0, g).unwrap();
        assert!(c.with_epsilon(0.5).is_err());
        assert!(c.with_window(1.0, 0.0).is_err());
        assert!(matches!(
            c.with_window(-2.0, 7.0),
            Err(ConfigError::WindowTooShort { .. })
        ));
    }

    #[test]
    fn dephasing_matrix_rules() {
        let mut r = [[0.0; 4]; 4];
        r[0][2] = 1.0;
        assert_eq!(DephasingMatrix::new(r), Err(ConfigError::Asymmetric));
        r[2][0] = 1.0;
        assert!(DephasingMatrix::new(r).is_ok());
        r[1][1] = 0.5;
        assert_eq!(DephasingMatrix::new(r), Err(ConfigError::NonzeroDiagonal));
        let u = DephasingMatrix::uniform(0.7).unwrap();
        assert_eq!(u.equal_dark_rate(), Some(0.7));
        assert!(DephasingMatrix::uniform(-1.0).is_err());
    }

    #[test]
    fn parse_dephasing_file() {
        let text = "# rates\n0 1 2 3\n1,0,4,5\n2 4 0 6\n3 5 6 0\n";
        let m = DephasingMatrix::parse(text).unwrap();
        assert_eq!(m.get(2, 3), 6.0);
        let bad = "0 1 2 3\n0 0 4 5\n2 4 0 6\n3 5 6 0\n";
        assert_eq!(DephasingMatrix::parse(bad), Err(ConfigError::Asymmetric));
        assert!(DephasingMatrix::parse("0 1\n").is_err());
    }

    #[test]
    fn ordering_names_round_trip() {
        for o in Ordering::ALL {
            assert_eq!(o.name().parse::<Ordering>().unwrap(), o);
        }
        assert_eq!("frac".parse::<Ordering>().unwrap(), Ordering::Fractional);
        assert!("ladder".parse::<Ordering>().is_err());
    }
}
