//! Waveform-level FMCW sensing simulator (complex baseband, `f64`).

pub mod config;
pub mod detect;
pub mod estimate;
pub mod montecarlo;

pub use config::{beat_frequency, channel_gains, FmcwConfig, NoiseSpec, Ramp, TargetScenario};
pub use detect::{
    generate_envelope, recover_beat, recover_beat_with_envelope, reference_beat, simulate_detection, Detection,
    EnvelopeEstimator, RecoveredBeat,
};
pub use estimate::{default_windows, estimate_beat_frequency, estimate_range_velocity, SampleWindow};
pub use montecarlo::{
    monte_carlo_sensing, monte_carlo_sensing_with, normalized_noise_variance, sense_sigma_from_snr_db, trial_rng,
    SensingOptions, SensingRunResult,
};
