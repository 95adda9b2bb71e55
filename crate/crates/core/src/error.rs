use thiserror::Error;

/// Errors raised by the solvers and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The harmonic-mean threshold cannot be met below the peak: B < 1/ς.
    #[error("infeasible constraints: peak {b_peak} < 1/sigma_h = {inverse_sigma}")]
    InfeasibleConstraint { b_peak: f64, inverse_sigma: f64 },

    /// A bracketing solver failed to bracket or to reach its residual target.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// A beat frequency at or beyond the complex-baseband Nyquist limit.
    #[error("beat frequency {freq_hz} Hz aliases at sample rate {sample_rate_hz} Hz")]
    Alias { freq_hz: f64, sample_rate_hz: f64 },

    /// An estimation window that leaves a single chirp ramp.
    #[error("window [{start}, {end}) crosses a ramp boundary")]
    Window { start: usize, end: usize },

    /// Malformed constellation or configuration input.
    #[error("parse error: {0}")]
    Parse(String),

    /// A post-condition that must hold by construction was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
