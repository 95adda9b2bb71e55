//! Seeded, order-independent Monte-Carlo sensing runs.
//!
//! Trial `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so
//! its samples do not depend on which thread runs it. Per-trial metrics are
//! collected in trial order and reduced sequentially.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{beat_frequency, channel_gains, FmcwConfig, NoiseSpec, Ramp, TargetScenario};
use super::detect::{generate_envelope, recover, reference_beat, simulate_detection, EnvelopeEstimator};
use super::estimate::{default_windows, estimate_beat_frequency, estimate_range_velocity, SampleWindow};
use crate::envelope::PamConstellation;
use crate::error::{domain, Result};

/// Aggregate sensing metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingRunResult {
    /// Beat-recovery MSE `ε_z²`, dimensionless.
    pub mse_beat: f64,
    pub rmse_range_m: f64,
    pub rmse_velocity_mps: f64,
    pub trials: usize,
    /// True `(up, down)` beat frequencies.
    pub beat_freq_true_hz: (f64, f64),
    /// Samples excluded from the MSE because `x̂` vanished.
    pub degenerate_samples: usize,
}

/// Knobs beyond the scenario itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SensingOptions {
    pub estimator: EnvelopeEstimator,
    /// Up/down estimation windows; defaults skip the round-trip dead zone.
    pub windows: Option<(SampleWindow, SampleWindow)>,
}

/// Per-trial RNG.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

struct TrialMetrics {
    mse: Option<f64>,
    range_sq: f64,
    velocity_sq: f64,
    degenerate: usize,
}

pub fn monte_carlo_sensing(
    p: &PamConstellation<f64>,
    s: &TargetScenario,
    cfg: &FmcwConfig,
    noise: &NoiseSpec,
    trials: usize,
) -> Result<SensingRunResult> {
    monte_carlo_sensing_with(p, s, cfg, noise, trials, &SensingOptions::default())
}

/// Runs `trials` independent periods and averages the metrics.
///
/// `mse_beat` is `(1/N_s) Σ_{n<N_s} |z(n/R_s) - e^{j(2π f_b n/R_s + φ)}|²`
/// per trial (degenerate samples dropped from numerator and count), then
/// averaged over trials.
pub fn monte_carlo_sensing_with(
    p: &PamConstellation<f64>,
    s: &TargetScenario,
    cfg: &FmcwConfig,
    noise: &NoiseSpec,
    trials: usize,
    opts: &SensingOptions,
) -> Result<SensingRunResult> {
    if trials == 0 {
        return Err(domain("trials must be at least 1"));
    }
    cfg.validate()?;
    noise.validate()?;
    let f_up = beat_frequency(s, cfg, Ramp::Up)?;
    let f_down = beat_frequency(s, cfg, Ramp::Down)?;
    let (_, hs) = channel_gains(s)?;
    let (w_up, w_down) = match opts.windows {
        Some(w) => w,
        None => default_windows(s, cfg)?,
    };
    let ns = cfg.symbols_per_period;

    let run = |trial: usize| -> Result<TrialMetrics> {
        let mut rng = trial_rng(noise.seed, trial);
        let env = generate_envelope(p, cfg, &mut rng)?;
        let det = simulate_detection(&env, s, cfg, noise, &mut rng)?;
        let rec = recover(&det, hs, opts.estimator)?;
        let reference = reference_beat(cfg, f_up, f_down, det.phase);

        let (mut sum, mut count) = (0.0, 0usize);
        for (i, (z, r)) in rec.z.iter().zip(&reference).take(ns).enumerate() {
            if !rec.is_degenerate(i) {
                sum += (z - r).norm_sqr();
                count += 1;
            }
        }
        let up = estimate_beat_frequency(&rec.z, w_up, cfg)?;
        let down = estimate_beat_frequency(&rec.z, w_down, cfg)?;
        let (d, v) = estimate_range_velocity(up, down, cfg);
        Ok(TrialMetrics {
            mse: (count > 0).then(|| sum / count as f64),
            range_sq: (d - s.range_m).powi(2),
            velocity_sq: (v - s.velocity_mps).powi(2),
            degenerate: rec.degenerate.len(),
        })
    };
    let per_trial: Vec<TrialMetrics> = (0..trials).into_par_iter().map(run).collect::<Result<_>>()?;

    let mse: Vec<f64> = per_trial.iter().filter_map(|t| t.mse).collect();
    let n = trials as f64;
    Ok(SensingRunResult {
        mse_beat: if mse.is_empty() {
            f64::NAN
        } else {
            mse.iter().sum::<f64>() / mse.len() as f64
        },
        rmse_range_m: (per_trial.iter().map(|t| t.range_sq).sum::<f64>() / n).sqrt(),
        rmse_velocity_mps: (per_trial.iter().map(|t| t.velocity_sq).sum::<f64>() / n).sqrt(),
        trials,
        beat_freq_true_hz: (f_up, f_down),
        degenerate_samples: per_trial.iter().map(|t| t.degenerate).sum(),
    })
}

/// `(σ_s²/h_s²) E[1/X]`, the high-SNR variance of the normalized noise.
pub fn normalized_noise_variance(p: &PamConstellation<f64>, sigma_sense: f64, hs: f64) -> f64 {
    sigma_sense * sigma_sense / (hs * hs) * p.harmonic_mean()
}

/// `σ_s` giving sensing SNR `20 log10(h_s/σ_s)` dB.
pub fn sense_sigma_from_snr_db(hs: f64, snr_db: f64) -> f64 {
    hs / 10f64.powf(snr_db / 20.0)
}
