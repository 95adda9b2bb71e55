//! Experiment configuration file (TOML).
//!
//! Every section and key is optional; missing keys take the defaults below,
//! which reproduce the reference figures. Unknown keys are rejected.

use std::path::PathBuf;

use owisac_core::fmcwsim::{EnvelopeEstimator, FmcwConfig, NoiseSpec, TargetScenario};
use owisac_core::{EnvelopeConstraints, EnvelopeConstraintsF64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub run: RunSection,
    pub constraints: ConstraintsSection,
    pub solver: SolverSection,
    pub maxent: MaxentSection,
    pub pam: PamSection,
    pub cdf: CdfSection,
    pub capacity: CapacitySection,
    pub tradeoff: TradeoffSection,
    pub sensing: SensingSection,
    pub fmcw: FmcwSection,
    pub scenario: ScenarioSection,
    pub noise: NoiseSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub trials: usize,
    /// Write entropies and rates in bits instead of nats.
    pub bits: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstraintsSection {
    pub a_min: f64,
    pub b_peak: f64,
    /// Harmonic-mean threshold ς. Exactly one of `sigma_h` and `nsp` is used;
    /// `nsp` wins when both are present.
    pub sigma_h: Option<f64>,
    pub nsp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Bracket width at which the dual-variable bisection stops.
    pub tol_eta: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaxentSection {
    /// Thresholds to solve; empty means the `[constraints]` threshold.
    pub sigma_h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PamSection {
    pub orders: Vec<usize>,
    /// Also emit the two-level low-SNR design.
    pub low_snr: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CdfSection {
    pub points: usize,
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacitySection {
    /// `(B - A)/σ̃` in dB.
    pub snr_db: Axis,
    pub constellations: Vec<ConstellationSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TradeoffSection {
    /// `[A, B]` pairs, one curve each.
    pub bounds: Vec<[f64; 2]>,
    pub nsp: Axis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensingSection {
    /// `h_s/σ_s` in dB.
    pub snr_db: Axis,
    pub constellations: Vec<ConstellationSpec>,
    pub estimator: Estimator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Instantaneous,
    Ideal,
}

/// Chirp and sampling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FmcwSection {
    pub carrier_hz: f64,
    pub chirp_bandwidth_hz: f64,
    pub period_s: f64,
    pub symbols_per_period: usize,
    pub sample_rate_hz: f64,
    pub light_speed_mps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
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

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub sigma_comm: f64,
}

/// A grid, either listed or as an inclusive `start..=stop` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

/// Constellation reference for the capacity and sensing experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstellationSpec {
    /// Two-level maximum-variance design.
    LowSnr,
    /// Max-entropy PAM on `order` uniform levels.
    Pam { order: usize },
    /// A `level,probability` CSV.
    File { path: PathBuf },
}

impl ConstellationSpec {
    pub fn label(&self) -> String {
        match self {
            ConstellationSpec::LowSnr => "2pam_low_snr".into(),
            ConstellationSpec::Pam { order } => format!("{order}pam"),
            ConstellationSpec::File { path } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into()),
        }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 2024,
            trials: 100,
            bits: false,
        }
    }
}

impl Default for ConstraintsSection {
    fn default() -> Self {
        Self {
            a_min: 0.1,
            b_peak: 1.0,
            sigma_h: Some(1.156),
            nsp: None,
        }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            tol_eta: owisac_core::maxent::DEFAULT_TOL_ETA,
        }
    }
}

impl Default for PamSection {
    fn default() -> Self {
        Self {
            orders: vec![4, 8, 16],
            low_snr: true,
        }
    }
}

impl Default for CdfSection {
    fn default() -> Self {
        Self {
            points: 451,
            orders: vec![4, 8, 16],
        }
    }
}

impl Default for CapacitySection {
    fn default() -> Self {
        Self {
            snr_db: Axis::Range {
                start: -10.0,
                stop: 50.0,
                step: 2.0,
            },
            constellations: vec![
                ConstellationSpec::LowSnr,
                ConstellationSpec::Pam { order: 4 },
                ConstellationSpec::Pam { order: 8 },
                ConstellationSpec::Pam { order: 16 },
            ],
        }
    }
}

impl Default for TradeoffSection {
    fn default() -> Self {
        Self {
            bounds: vec![[0.1, 1.0], [0.2, 1.0]],
            nsp: Axis::Range {
                start: 0.0,
                stop: 0.9,
                step: 0.1,
            },
        }
    }
}

impl Default for SensingSection {
    fn default() -> Self {
        Self {
            snr_db: Axis::Range {
                start: -10.0,
                stop: 40.0,
                step: 5.0,
            },
            constellations: vec![
                ConstellationSpec::LowSnr,
                ConstellationSpec::Pam { order: 8 },
                ConstellationSpec::Pam { order: 16 },
            ],
            estimator: Estimator::Instantaneous,
        }
    }
}

impl Default for FmcwSection {
    fn default() -> Self {
        let c = FmcwConfig::default();
        Self {
            carrier_hz: c.carrier_hz,
            chirp_bandwidth_hz: c.chirp_bandwidth_hz,
            period_s: c.period_s,
            symbols_per_period: c.symbols_per_period,
            sample_rate_hz: c.sample_rate_hz,
            light_speed_mps: c.light_speed_mps,
        }
    }
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let s = TargetScenario::default();
        Self {
            range_m: s.range_m,
            velocity_mps: s.velocity_mps,
            comm_offset_m: s.comm_offset_m,
            sense_offset_m: s.sense_offset_m,
            reflectivity: s.reflectivity,
            waist_m: s.waist_m,
            rayleigh_m: s.rayleigh_m,
            amplitude: s.amplitude,
            responsivity_comm: s.responsivity_comm,
            responsivity_sense: s.responsivity_sense,
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl Axis {
    /// Grid points in order. Range points are `start + k·step`, snapped to
    /// 12 decimals so that `0.1` steps print as typed.
    pub fn points(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let pts = match *self {
            Axis::List(ref v) => v.clone(),
            Axis::Range { start, stop, step } => {
                if !(step > 0.0) || !step.is_finite() || !start.is_finite() || !(stop >= start) {
                    return Err(invalid(
                        field,
                        format!("bad range start = {start}, stop = {stop}, step = {step}"),
                    ));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                if n >= 1_000_000 {
                    return Err(invalid(field, format!("range has {n} points")));
                }
                (0..=n)
                    .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                    .collect()
            }
        };
        if pts.is_empty() {
            return Err(invalid(field, "grid is empty"));
        }
        if let Some(v) = pts.iter().find(|v| !v.is_finite()) {
            return Err(invalid(field, format!("non-finite grid point {v}")));
        }
        Ok(pts)
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
    }

    /// The resolved configuration as TOML, for artifact headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Threshold from `[constraints]`, resolving `nsp` if given.
    pub fn sigma_h(&self) -> Result<f64, CliError> {
        let c = &self.constraints;
        match (c.nsp, c.sigma_h) {
            (Some(chi), _) => {
                owisac_core::sigma_from_nsp(c.a_min, c.b_peak, chi).map_err(|e| invalid("constraints.nsp", e))
            }
            (None, Some(s)) => Ok(s),
            (None, None) => Err(invalid("constraints", "one of `sigma_h` or `nsp` is required")),
        }
    }

    /// Constraints from `[constraints]`; an infeasible threshold is a
    /// configuration error here.
    pub fn constraints(&self) -> Result<EnvelopeConstraintsF64, CliError> {
        let c = EnvelopeConstraints::new(self.constraints.a_min, self.constraints.b_peak, self.sigma_h()?)
            .map_err(|e| invalid("constraints", e))?;
        if !c.is_feasible() {
            return Err(invalid(
                "constraints.sigma_h",
                format!(
                    "infeasible: b_peak = {} < 1/sigma_h = {}",
                    c.b_peak(),
                    1.0 / c.sigma_h()
                ),
            ));
        }
        Ok(c)
    }

    pub fn tol_eta(&self) -> Result<f64, CliError> {
        let t = self.solver.tol_eta;
        if !(t > 0.0) || !t.is_finite() {
            return Err(invalid("solver.tol_eta", format!("must be positive, got {t}")));
        }
        Ok(t)
    }

    pub fn trials(&self) -> Result<usize, CliError> {
        if self.run.trials == 0 {
            return Err(invalid("run.trials", "must be positive"));
        }
        Ok(self.run.trials)
    }

    pub fn fmcw(&self) -> Result<FmcwConfig, CliError> {
        let f = &self.fmcw;
        let cfg = FmcwConfig {
            carrier_hz: f.carrier_hz,
            chirp_bandwidth_hz: f.chirp_bandwidth_hz,
            period_s: f.period_s,
            symbols_per_period: f.symbols_per_period,
            sample_rate_hz: f.sample_rate_hz,
            light_speed_mps: f.light_speed_mps,
        };
        cfg.validate().map_err(|e| invalid("fmcw", e))?;
        Ok(cfg)
    }

    pub fn scenario(&self) -> Result<TargetScenario, CliError> {
        let s = &self.scenario;
        let t = TargetScenario {
            range_m: s.range_m,
            velocity_mps: s.velocity_mps,
            comm_offset_m: s.comm_offset_m,
            sense_offset_m: s.sense_offset_m,
            reflectivity: s.reflectivity,
            waist_m: s.waist_m,
            rayleigh_m: s.rayleigh_m,
            amplitude: s.amplitude,
            responsivity_comm: s.responsivity_comm,
            responsivity_sense: s.responsivity_sense,
        };
        t.validate().map_err(|e| invalid("scenario", e))?;
        Ok(t)
    }

    /// Noise spec with the sensing deviation filled in per grid point.
    pub fn noise(&self, sigma_sense: f64) -> Result<NoiseSpec, CliError> {
        let n = NoiseSpec {
            sigma_comm: self.noise.sigma_comm,
            sigma_sense,
            seed: self.run.seed,
        };
        n.validate().map_err(|e| invalid("noise", e))?;
        Ok(n)
    }

    pub fn estimator(&self) -> EnvelopeEstimator {
        match self.sensing.estimator {
            Estimator::Instantaneous => EnvelopeEstimator::Instantaneous,
            Estimator::Ideal => EnvelopeEstimator::Ideal,
        }
    }
}
