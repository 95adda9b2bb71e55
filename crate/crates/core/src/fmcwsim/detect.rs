//! Envelope synthesis, direct/coherent detection and beat recovery.
//!
//! Only the post-LPF baseband models are simulated: the optical carrier is
//! never sampled. One FMCW period of `N = R_s T_F` samples is generated; the
//! up ramp occupies `[0, N/2)` and the down ramp `[N/2, N)`. Propagation
//! delays are rounded to whole samples and the envelope is treated as
//! periodic, so a delayed sample wraps to the end of the period.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{beat_frequency, FmcwConfig, NoiseSpec, Ramp, TargetScenario};
use crate::envelope::PamConstellation;
use crate::error::{domain, Result};

/// Envelope estimates below this are treated as lost samples.
pub const DEGENERATE_ENVELOPE: f64 = 1e-12;

/// Draws `N_s` i.i.d. symbols and holds each for `N / N_s` samples.
pub fn generate_envelope<R: Rng + ?Sized>(
    p: &PamConstellation<f64>,
    cfg: &FmcwConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let picker = WeightedIndex::new(p.probs()).map_err(|e| domain(format!("constellation weights: {e}")))?;
    let hold = cfg.samples_per_symbol();
    let mut out = Vec::with_capacity(cfg.samples_per_period());
    for _ in 0..cfg.symbols_per_period {
        let level = p.levels()[picker.sample(rng)];
        out.extend(std::iter::repeat_n(level, hold));
    }
    Ok(out)
}

/// Received signals of one period plus the ground truth used to form them.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Direct-detection communication samples.
    pub y: Vec<f64>,
    /// Coherent IQ sensing samples `z_I + j z_Q`.
    pub z_iq: Vec<Complex64>,
    /// Envelope delayed by the round trip, as seen by the sensing receiver.
    pub sense_envelope: Vec<f64>,
    pub phase: f64,
    pub beat_up_hz: f64,
    pub beat_down_hz: f64,
    pub comm_delay_samples: usize,
    pub sense_delay_samples: usize,
}

/// Delay in whole samples, `round(τ R_s)`.
pub fn delay_samples(delay_s: f64, cfg: &FmcwConfig) -> usize {
    (delay_s * cfg.sample_rate_hz).round() as usize
}

fn delayed(envelope: &[f64], shift: usize) -> Vec<f64> {
    let n = envelope.len();
    (0..n).map(|i| envelope[(i + n - shift % n) % n]).collect()
}

/// Beat frequency in force at sample `i`.
pub fn beat_at(i: usize, n: usize, f_up: f64, f_down: f64) -> f64 {
    if i < n / 2 {
        f_up
    } else {
        f_down
    }
}

/// `exp(j(2π f_b n / R_s + φ))` over one period.
pub fn reference_beat(cfg: &FmcwConfig, f_up: f64, f_down: f64, phase: f64) -> Vec<Complex64> {
    let n = cfg.samples_per_period();
    (0..n)
        .map(|i| {
            let fb = beat_at(i, n, f_up, f_down);
            Complex64::from_polar(1.0, TAU * fb * i as f64 / cfg.sample_rate_hz + phase)
        })
        .collect()
}

/// Direct and coherent detection of one period of `envelope`.
///
/// Draw order from `rng`: beat phase, then communication noise (if
/// `σ_c > 0`), then IQ noise (if `σ_s > 0`).
pub fn simulate_detection<R: Rng + ?Sized>(
    envelope: &[f64],
    s: &TargetScenario,
    cfg: &FmcwConfig,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<Detection> {
    cfg.validate()?;
    noise.validate()?;
    let n = cfg.samples_per_period();
    if envelope.len() != n {
        return Err(domain(format!(
            "envelope has {} samples, period has {n}",
            envelope.len()
        )));
    }
    if envelope.iter().any(|x| !(*x >= 0.0)) {
        return Err(domain("envelope must be non-negative"));
    }
    let f_up = beat_frequency(s, cfg, Ramp::Up)?;
    let f_down = beat_frequency(s, cfg, Ramp::Down)?;
    let (hc, hs) = super::config::channel_gains(s)?;
    let comm_delay = delay_samples(s.range_m / cfg.light_speed_mps, cfg);
    let sense_delay = delay_samples(2.0 * s.range_m / cfg.light_speed_mps, cfg);

    let phase = rng.random::<f64>() * TAU;

    let comm_env = delayed(envelope, comm_delay);
    let mut y: Vec<f64> = comm_env.iter().map(|x| hc * x).collect();
    if noise.sigma_comm > 0.0 {
        for v in &mut y {
            let g: f64 = StandardNormal.sample(rng);
            *v += noise.sigma_comm * g;
        }
    }

    let sense_envelope = delayed(envelope, sense_delay);
    let reference = reference_beat(cfg, f_up, f_down, phase);
    let mut z_iq: Vec<Complex64> = sense_envelope
        .iter()
        .zip(&reference)
        .map(|(x, r)| r * (hs * x.sqrt()))
        .collect();
    if noise.sigma_sense > 0.0 {
        let per_quadrature = noise.sigma_sense / std::f64::consts::SQRT_2;
        for v in &mut z_iq {
            let gi: f64 = StandardNormal.sample(rng);
            let gq: f64 = StandardNormal.sample(rng);
            *v += Complex64::new(per_quadrature * gi, per_quadrature * gq);
        }
    }

    Ok(Detection {
        y,
        z_iq,
        sense_envelope,
        phase,
        beat_up_hz: f_up,
        beat_down_hz: f_down,
        comm_delay_samples: comm_delay,
        sense_delay_samples: sense_delay,
    })
}

/// Envelope estimate used in the recovery division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EnvelopeEstimator {
    /// `x̂ = (z_I² + z_Q²)/h_s²`, available at the receiver.
    #[default]
    Instantaneous,
    /// The true delayed envelope (genie reference).
    Ideal,
}

/// Recovered beat signal; degenerate samples hold `0` and are listed.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredBeat {
    pub z: Vec<Complex64>,
    pub degenerate: Vec<usize>,
}

impl RecoveredBeat {
    pub fn is_degenerate(&self, i: usize) -> bool {
        self.degenerate.binary_search(&i).is_ok()
    }
}

fn divide(z_iq: &[Complex64], hs: f64, envelope: impl Iterator<Item = f64>) -> RecoveredBeat {
    let mut degenerate = Vec::new();
    let z = z_iq
        .iter()
        .zip(envelope)
        .enumerate()
        .map(|(i, (v, x_hat))| {
            if !(x_hat >= DEGENERATE_ENVELOPE) {
                degenerate.push(i);
                Complex64::new(0.0, 0.0)
            } else {
                v / (hs * x_hat.sqrt())
            }
        })
        .collect();
    RecoveredBeat { z, degenerate }
}

fn check_gain(hs: f64) -> Result<()> {
    if !(hs > 0.0) || !hs.is_finite() {
        return Err(domain(format!("sensing gain must be positive, got {hs}")));
    }
    Ok(())
}

/// `z = z_iq / (h_s x̂^{1/2})` with `x̂ = |z_iq|²/h_s²`.
pub fn recover_beat(z_iq: &[Complex64], hs: f64) -> Result<RecoveredBeat> {
    check_gain(hs)?;
    Ok(divide(z_iq, hs, z_iq.iter().map(|v| v.norm_sqr() / (hs * hs))))
}

/// Recovery dividing by a known envelope.
pub fn recover_beat_with_envelope(z_iq: &[Complex64], hs: f64, envelope: &[f64]) -> Result<RecoveredBeat> {
    check_gain(hs)?;
    if envelope.len() != z_iq.len() {
        return Err(domain("envelope and IQ sequences differ in length"));
    }
    Ok(divide(z_iq, hs, envelope.iter().copied()))
}

/// Dispatches on the estimator.
pub fn recover(det: &Detection, hs: f64, estimator: EnvelopeEstimator) -> Result<RecoveredBeat> {
    match estimator {
        EnvelopeEstimator::Instantaneous => recover_beat(&det.z_iq, hs),
        EnvelopeEstimator::Ideal => recover_beat_with_envelope(&det.z_iq, hs, &det.sense_envelope),
    }
}
