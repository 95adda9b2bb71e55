//! Waveform parameters, target geometry, noise levels and the closed-form
//! chirp relations (instantaneous frequency, beat frequency, channel gains).

use crate::error::{domain, Error, Result};

/// Triangular FMCW chirp and receiver sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmcwConfig {
    pub carrier_hz: f64,
    pub chirp_bandwidth_hz: f64,
    pub period_s: f64,
    pub symbols_per_period: usize,
    pub sample_rate_hz: f64,
    pub light_speed_mps: f64,
}

impl Default for FmcwConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 194e12,
            chirp_bandwidth_hz: 5e9,
            period_s: 10e-6,
            symbols_per_period: 500,
            sample_rate_hz: 200e6,
            light_speed_mps: 3e8,
        }
    }
}

impl FmcwConfig {
    /// Checks positivity and that one period holds a whole number of
    /// samples, divisible by the symbol count.
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("carrier_hz", self.carrier_hz),
            ("chirp_bandwidth_hz", self.chirp_bandwidth_hz),
            ("period_s", self.period_s),
            ("sample_rate_hz", self.sample_rate_hz),
            ("light_speed_mps", self.light_speed_mps),
        ];
        for (name, v) in reals {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.symbols_per_period == 0 {
            return Err(domain("symbols_per_period must be positive"));
        }
        let raw = self.sample_rate_hz * self.period_s;
        let n = raw.round();
        if (raw - n).abs() > 1e-6 * raw.max(1.0) || n < 2.0 {
            return Err(domain(format!(
                "sample_rate_hz * period_s = {raw} is not an integer sample count"
            )));
        }
        let n = n as usize;
        if !n.is_multiple_of(2) {
            return Err(domain(format!("samples per period {n} must be even (two ramps)")));
        }
        if !n.is_multiple_of(self.symbols_per_period) {
            return Err(domain(format!(
                "symbols_per_period {} does not divide {n} samples",
                self.symbols_per_period
            )));
        }
        Ok(())
    }

    /// `R_s · T_F`.
    pub fn samples_per_period(&self) -> usize {
        (self.sample_rate_hz * self.period_s).round() as usize
    }

    /// Samples each PAM symbol is held for.
    pub fn samples_per_symbol(&self) -> usize {
        self.samples_per_period() / self.symbols_per_period
    }

    /// Frequency offset from the carrier at time `t`, periodic in `T_F`.
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        let tf = self.period_s;
        let t = t.rem_euclid(tf);
        if t <= tf / 2.0 {
            2.0 * self.chirp_bandwidth_hz * t / tf
        } else {
            self.chirp_bandwidth_hz * (2.0 - 2.0 * t / tf)
        }
    }
}

/// Chirp ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ramp {
    Up,
    Down,
}

/// Single point target and link geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetScenario {
    pub range_m: f64,
    pub velocity_mps: f64,
    pub comm_offset_m: f64,
    pub sense_offset_m: f64,
    pub reflectivity: f64,
    pub waist_m: f64,
    pub rayleigh_m: f64,
    pub amplitude: f64,
    pub responsivity_comm: f64,
    pub responsivity_sense: f64,
}

impl Default for TargetScenario {
    fn default() -> Self {
        Self {
            range_m: 7.5,
            velocity_mps: 10.0,
            comm_offset_m: 0.0,
            sense_offset_m: 0.0,
            reflectivity: 0.5,
            waist_m: 1e-3,
            rayleigh_m: 1.0,
            amplitude: 1.0,
            responsivity_comm: 1.0,
            responsivity_sense: 1.0,
        }
    }
}

impl TargetScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.range_m > 0.0) || !self.range_m.is_finite() {
            return Err(domain(format!("range_m must be positive, got {}", self.range_m)));
        }
        if !self.velocity_mps.is_finite() || !self.comm_offset_m.is_finite() || !self.sense_offset_m.is_finite() {
            return Err(domain("velocity and offsets must be finite"));
        }
        if !(self.reflectivity > 0.0 && self.reflectivity <= 1.0) {
            return Err(domain(format!(
                "reflectivity must lie in (0, 1], got {}",
                self.reflectivity
            )));
        }
        let positive = [
            ("waist_m", self.waist_m),
            ("rayleigh_m", self.rayleigh_m),
            ("amplitude", self.amplitude),
            ("responsivity_comm", self.responsivity_comm),
            ("responsivity_sense", self.responsivity_sense),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Post-detection noise levels and master seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Standard deviation of the communication AWGN.
    pub sigma_comm: f64,
    /// Total IQ noise standard deviation; each quadrature gets `σ_s²/2`.
    pub sigma_sense: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_comm >= 0.0) || !(self.sigma_sense >= 0.0) {
            return Err(domain("noise standard deviations must be non-negative"));
        }
        if !self.sigma_comm.is_finite() || !self.sigma_sense.is_finite() {
            return Err(domain("noise standard deviations must be finite"));
        }
        Ok(())
    }
}

/// Signed beat frequency of one ramp; errors if it aliases.
pub fn beat_frequency(s: &TargetScenario, cfg: &FmcwConfig, ramp: Ramp) -> Result<f64> {
    let doppler = 2.0 * cfg.carrier_hz * s.velocity_mps / cfg.light_speed_mps;
    let range = 4.0 * cfg.chirp_bandwidth_hz * s.range_m / (cfg.light_speed_mps * cfg.period_s);
    let fb = match ramp {
        Ramp::Up => doppler + range,
        Ramp::Down => doppler - range,
    };
    // Relative slack so a range term that is nominally R_s/2 still aliases.
    if fb.abs() >= cfg.sample_rate_hz / 2.0 * (1.0 - 1e-12) {
        return Err(Error::Alias {
            freq_hz: fb,
            sample_rate_hz: cfg.sample_rate_hz,
        });
    }
    Ok(fb)
}

/// Communication and sensing gains `(h_c, h_s)`.
pub fn channel_gains(s: &TargetScenario) -> Result<(f64, f64)> {
    s.validate()?;
    let d0 = s.range_m;
    let dr = s.rayleigh_m;
    let w0 = s.waist_m;
    let hc = s.amplitude.powi(2) * dr.powi(2) * s.responsivity_comm / d0.powi(2)
        * (-2.0 * dr.powi(2) * s.comm_offset_m.powi(2) / (w0.powi(2) * d0.powi(2))).exp();
    let hs = 2.0 * s.amplitude * dr * s.reflectivity * s.responsivity_sense / d0
        * (-dr.powi(2) * s.sense_offset_m.powi(2) / (w0.powi(2) * d0.powi(2))).exp();
    Ok((hc, hs))
}
