use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::standard_normal;

/// Time-varying error rates: a daily sinusoid around calibrated base rates,
/// an optional per-query lognormal jitter, and a global scale knob.
///
/// `fluct_1q`/`fluct_2q` hold the published daily spread (max-min)/min; the
/// sinusoid amplitude is derived from that spread, so the evaluated rates
/// reproduce it exactly. The jitter factor is lognormal with unit mean and
/// relative standard deviation `jitter_rel`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    pub base_1q: f64,
    pub base_2q: f64,
    /// Daily relative span (max-min)/min of the one-qubit rate.
    pub fluct_1q: f64,
    /// Daily relative span (max-min)/min of the two-qubit rate.
    pub fluct_2q: f64,
    pub readout_eps: f64,
    pub period_hours: f64,
    pub phase: f64,
    pub jitter_rel: f64,
    pub scale: f64,
}

/// Error rates in effect for one query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub p_1q: f64,
    pub p_2q: f64,
    pub readout_eps: f64,
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        Self {
            base_1q: 1.973e-4,
            base_2q: 4.561e-3,
            fluct_1q: 0.312,
            fluct_2q: 0.103,
            readout_eps: 0.0,
            period_hours: 24.0,
            phase: 0.0,
            jitter_rel: 0.05,
            scale: 1.0,
        }
    }
}

impl NoiseSchedule {
    /// Completely quiet profile: exact simulation regardless of time.
    pub fn noiseless() -> Self {
        Self { scale: 0.0, jitter_rel: 0.0, readout_eps: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("base_1q", self.base_1q),
            ("base_2q", self.base_2q),
            ("fluct_1q", self.fluct_1q),
            ("fluct_2q", self.fluct_2q),
            ("jitter_rel", self.jitter_rel),
            ("scale", self.scale),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidSchedule(format!("{name} = {v} must be >= 0")));
            }
        }
        if !(0.0..=1.0).contains(&self.readout_eps) {
            return Err(Error::InvalidSchedule(format!(
                "readout_eps = {} outside [0, 1]",
                self.readout_eps
            )));
        }
        if !(self.period_hours > 0.0 && self.period_hours.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "period_hours = {} must be positive",
                self.period_hours
            )));
        }
        if !(self.base_1q <= 1.0 && self.base_2q <= 1.0) {
            return Err(Error::InvalidSchedule("base rates must be <= 1".into()));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidSchedule("phase must be finite".into()));
        }
        Ok(())
    }

    /// Sinusoid amplitude that yields a daily (max-min)/min equal to `span`.
    ///
    /// With rate = b(1 + a sin), max/min are b(1 +- a), so the relative span
    /// is 2a/(1-a); inverting gives a = span/(2 + span).
    pub fn fluct_amplitude(span: f64) -> f64 {
        span / (2.0 + span)
    }

    fn modulated(&self, base: f64, span: f64, t_hours: f64, jitter: f64) -> f64 {
        let a = Self::fluct_amplitude(span);
        let angle = std::f64::consts::TAU * t_hours / self.period_hours + self.phase;
        (self.scale * base * (1.0 + a * angle.sin()) * jitter).clamp(0.0, 1.0)
    }

    /// Deterministic rates at time `t_hours` (jitter factor fixed at 1).
    pub fn rates_at(&self, t_hours: f64) -> Rates {
        Rates {
            p_1q: self.modulated(self.base_1q, self.fluct_1q, t_hours, 1.0),
            p_2q: self.modulated(self.base_2q, self.fluct_2q, t_hours, 1.0),
            readout_eps: (self.scale * self.readout_eps).clamp(0.0, 1.0),
        }
    }

    /// Rates with per-query jitter drawn from `rng` (two draws, 1q then 2q).
    ///
    /// The factor is lognormal with mean exactly 1 and relative standard
    /// deviation `jitter_rel`; a zero `jitter_rel` still consumes the draws,
    /// so toggling it does not shift any other stream.
    pub fn rates_at_jittered(&self, t_hours: f64, rng: &mut ChaCha8Rng) -> Rates {
        let sigma_sq = (1.0 + self.jitter_rel * self.jitter_rel).ln();
        let sigma = sigma_sq.sqrt();
        let mut factor = || (-0.5 * sigma_sq + sigma * standard_normal(rng)).exp();
        let j1 = factor();
        let j2 = factor();
        Rates {
            p_1q: self.modulated(self.base_1q, self.fluct_1q, t_hours, j1),
            p_2q: self.modulated(self.base_2q, self.fluct_2q, t_hours, j2),
            readout_eps: (self.scale * self.readout_eps).clamp(0.0, 1.0),
        }
    }
}
