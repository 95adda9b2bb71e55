//! Beat-frequency estimation and two-ramp range/velocity inversion.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::config::{FmcwConfig, TargetScenario};
use super::detect::delay_samples;
use crate::error::{domain, Error, Result};

/// Zero-padding factor of the spectral peak search.
pub const ZERO_PAD: usize = 8;

/// Half-open sample interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleWindow {
    pub start: usize,
    pub end: usize,
}

impl SampleWindow {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Up window `[n_rt, N/2)` and down window `[N/2 + n_rt, N)`, where `n_rt`
/// is the round-trip delay in samples.
pub fn default_windows(s: &TargetScenario, cfg: &FmcwConfig) -> Result<(SampleWindow, SampleWindow)> {
    let n = cfg.samples_per_period();
    let half = n / 2;
    let rt = delay_samples(2.0 * s.range_m / cfg.light_speed_mps, cfg);
    if rt + 2 >= half {
        return Err(domain(format!(
            "round trip of {rt} samples leaves no room in a {half}-sample ramp"
        )));
    }
    Ok((SampleWindow::new(rt, half), SampleWindow::new(half + rt, n)))
}

/// Peak frequency of `|DFT|` over `window`, zero-padded ×8 and refined by a
/// three-point parabola on log-magnitude. Returns a signed frequency in Hz.
pub fn estimate_beat_frequency(z: &[Complex64], window: SampleWindow, cfg: &FmcwConfig) -> Result<f64> {
    let n = cfg.samples_per_period();
    let half = n / 2;
    let SampleWindow { start, end } = window;
    let within_ramp = (end <= half) || (start >= half && end <= n);
    if start >= end || end > z.len() || !within_ramp {
        return Err(Error::Window { start, end });
    }
    let len = end - start;
    let m = ZERO_PAD * len;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[..len].copy_from_slice(&z[start..end]);
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let mag: Vec<f64> = buf.iter().map(|v| v.norm()).collect();
    let peak = mag
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |best, (k, &v)| if v > best.1 { (k, v) } else { best },
        )
        .0;
    let ln = |k: usize| mag[k].max(f64::MIN_POSITIVE).ln();
    let (l, c, r) = (ln((peak + m - 1) % m), ln(peak), ln((peak + 1) % m));
    let curvature = l - 2.0 * c + r;
    let offset = if curvature < 0.0 {
        (0.5 * (l - r) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let mut bin = peak as f64 + offset;
    if bin >= m as f64 / 2.0 {
        bin -= m as f64;
    }
    Ok(bin * cfg.sample_rate_hz / m as f64)
}

/// `(d̂, v̂)` from the up- and down-ramp beat frequencies.
pub fn estimate_range_velocity(f_up: f64, f_down: f64, cfg: &FmcwConfig) -> (f64, f64) {
    let range = (f_up - f_down) * cfg.light_speed_mps * cfg.period_s / (8.0 * cfg.chirp_bandwidth_hz);
    let velocity = (f_up + f_down) * cfg.light_speed_mps / (4.0 * cfg.carrier_hz);
    (range, velocity)
}
