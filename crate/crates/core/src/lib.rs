//! Capacity bounds, envelope design and FMCW sensing simulation for optical
//! wireless integrated sensing and communication under a harmonic-mean
//! sensing constraint.
//!
//! The analytic modules are generic over [`Real`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below pin the common instantiations. The waveform
//! simulator in [`fmcwsim`] is `f64` only.

// `!(x > 0.0)` is the NaN-rejecting form used throughout argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bisection;
pub mod capacity;
pub mod envelope;
pub mod error;
pub mod fmcwsim;
pub mod maxent;
pub mod quadrature;
pub mod scalar;
pub mod specialfn;

pub use capacity::{
    asymptotic_gap, build_capacity_curve, high_snr_asymptote, high_snr_hyperparams, high_snr_upper_bound,
    low_snr_asymptote, low_snr_upper_bound, max_variance, noise_sigma_from_snr_db, nsp_from_sigma, sigma_from_nsp,
    snr_db_from_noise_sigma, tradeoff_high, tradeoff_low, CapacityCurve, GapPoint, HighSnrHyperParams, MaxVarianceCase,
    MaxVarianceResult, VariancePoint,
};
pub use envelope::{
    cdf_sup_distance, design_high_snr, design_low_snr, mutual_information_discrete, pam_levels_uniform, DiscreteCase,
    HighSnrDesign, PamConstellation,
};
pub use error::{Error, Result};
pub use maxent::{classify_case, solve_max_entropy, CaseClassification, EnvelopeConstraints, MaxEntropyDistribution};
pub use scalar::Real;

pub type EnvelopeConstraintsF64 = EnvelopeConstraints<f64>;
pub type EnvelopeConstraintsF32 = EnvelopeConstraints<f32>;
pub type MaxEntropyDistributionF64 = MaxEntropyDistribution<f64>;
pub type MaxEntropyDistributionF32 = MaxEntropyDistribution<f32>;
pub type PamConstellationF64 = PamConstellation<f64>;
pub type PamConstellationF32 = PamConstellation<f32>;
pub type MaxVarianceResultF64 = MaxVarianceResult<f64>;
pub type MaxVarianceResultF32 = MaxVarianceResult<f32>;
pub type CapacityCurveF64 = CapacityCurve<f64>;
pub type CapacityCurveF32 = CapacityCurve<f32>;
pub type HighSnrDesignF64 = HighSnrDesign<f64>;
pub type HighSnrDesignF32 = HighSnrDesign<f32>;
