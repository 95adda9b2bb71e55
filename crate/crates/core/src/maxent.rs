//! Max-entropy envelope law under floor, peak and harmonic-mean constraints.
//!
//! Among densities on `[A, B]` with `E[1/X] ≤ ς`, the entropy maximiser is the
//! truncated exponential-family law `f(x) = exp(η/x + μ - 1)`. Three regimes:
//!
//! * `B < 1/ς`: no law on `[A, B]` can meet the threshold (infeasible);
//! * `ς ≥ ς_max = (ln B - ln A)/(B - A)`: the uniform law already satisfies it
//!   and `η = 0`;
//! * otherwise the constraint binds and `η < 0` solves `g_h(η) = 1/ς`.

use crate::bisection::extended_bisection;
use crate::error::{domain, Error, Result};
use crate::scalar::{softplus, Real};
use crate::specialfn::{gh_auxiliary, ln_ei_difference, ln_ih_integral};

/// Default bracket tolerance for the dual-variable bisection.
pub const DEFAULT_TOL_ETA: f64 = 1e-10;

/// Floor `A`, peak `B` and harmonic-mean threshold `ς` of the envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConstraints<T> {
    a_min: T,
    b_peak: T,
    sigma_h: T,
}

impl<T: Real> EnvelopeConstraints<T> {
    /// Requires `0 < a_min < b_peak ≤ 1` and `sigma_h > 0`.
    pub fn new(a_min: T, b_peak: T, sigma_h: T) -> Result<Self> {
        let finite = a_min.is_finite() && b_peak.is_finite() && sigma_h.is_finite();
        if !finite || !(a_min > T::zero()) || !(b_peak > a_min) || b_peak > T::one() {
            return Err(domain(format!(
                "envelope bounds must satisfy 0 < A < B <= 1, got A = {a_min}, B = {b_peak}"
            )));
        }
        if !(sigma_h > T::zero()) {
            return Err(domain(format!(
                "harmonic-mean threshold must be positive, got {sigma_h}"
            )));
        }
        Ok(Self { a_min, b_peak, sigma_h })
    }

    /// Constraints whose threshold is set from a normalized sensing priority.
    pub fn from_nsp(a_min: T, b_peak: T, chi: T) -> Result<Self> {
        let sigma = crate::capacity::sigma_from_nsp(a_min, b_peak, chi)?;
        Self::new(a_min, b_peak, sigma)
    }

    pub fn a_min(&self) -> T {
        self.a_min
    }

    pub fn b_peak(&self) -> T {
        self.b_peak
    }

    pub fn sigma_h(&self) -> T {
        self.sigma_h
    }

    /// Amplitude range `B - A`.
    pub fn width(&self) -> T {
        self.b_peak - self.a_min
    }

    /// Harmonic mean `E[1/X]` of the uniform law on `[A, B]`.
    pub fn sigma_max(&self) -> T {
        (self.b_peak.ln() - self.a_min.ln()) / self.width()
    }

    /// Smallest feasible threshold, `1/B`.
    pub fn sigma_min(&self) -> T {
        self.b_peak.recip()
    }

    pub fn is_feasible(&self) -> bool {
        self.b_peak >= self.sigma_h.recip()
    }

    /// Same bounds with a different threshold.
    pub fn with_sigma(&self, sigma_h: T) -> Result<Self> {
        Self::new(self.a_min, self.b_peak, sigma_h)
    }

    /// `(κA, κB, ς/κ)`.
    pub fn scaled(&self, kappa: T) -> Result<Self> {
        Self::new(self.a_min * kappa, self.b_peak * kappa, self.sigma_h / kappa)
    }

    pub(crate) fn infeasible_error(&self) -> Error {
        Error::InfeasibleConstraint {
            b_peak: self.b_peak.as_f64(),
            inverse_sigma: self.sigma_h.recip().as_f64(),
        }
    }
}

/// Which constraint regime a threshold falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseClassification {
    /// `B < 1/ς`.
    Infeasible,
    /// `ς ≥ ς_max`: the uniform law is optimal.
    ConstraintInactive,
    /// `1/B ≤ ς < ς_max`: the harmonic-mean constraint binds.
    TradeOff,
}

impl CaseClassification {
    pub fn label(&self) -> &'static str {
        match self {
            CaseClassification::Infeasible => "infeasible",
            CaseClassification::ConstraintInactive => "constraint_inactive",
            CaseClassification::TradeOff => "trade_off",
        }
    }
}

pub fn classify_case<T: Real>(c: &EnvelopeConstraints<T>) -> CaseClassification {
    if !c.is_feasible() {
        CaseClassification::Infeasible
    } else if c.sigma_h >= c.sigma_max() {
        CaseClassification::ConstraintInactive
    } else {
        CaseClassification::TradeOff
    }
}

/// Solved max-entropy law `f(x) = exp(η*/x + μ* - 1)` on `[A, B]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEntropyDistribution<T> {
    constraints: EnvelopeConstraints<T>,
    eta_star: T,
    mu_star: T,
    case: CaseClassification,
}

/// Solves for the dual variables `(η*, μ*)`.
///
/// In the trade-off regime `η*` is found by extended bisection on `g_h`
/// starting from `η = -1`; `μ*` always comes from normalization.
pub fn solve_max_entropy<T: Real>(c: &EnvelopeConstraints<T>, tol_eta: T) -> Result<MaxEntropyDistribution<T>> {
    let case = classify_case(c);
    let eta_star = match case {
        CaseClassification::Infeasible => return Err(c.infeasible_error()),
        CaseClassification::ConstraintInactive => T::zero(),
        CaseClassification::TradeOff => {
            let (a, b) = (c.a_min, c.b_peak);
            extended_bisection(|eta| gh_auxiliary(a, b, eta), c.sigma_h.recip(), tol_eta)?
        }
    };
    let mu_star = T::one() - ln_ih_integral(c.a_min, c.b_peak, eta_star)?;
    Ok(MaxEntropyDistribution {
        constraints: *c,
        eta_star,
        mu_star,
        case,
    })
}

impl<T: Real> MaxEntropyDistribution<T> {
    pub fn constraints(&self) -> &EnvelopeConstraints<T> {
        &self.constraints
    }

    pub fn eta_star(&self) -> T {
        self.eta_star
    }

    pub fn mu_star(&self) -> T {
        self.mu_star
    }

    pub fn case(&self) -> CaseClassification {
        self.case
    }

    /// Density; zero outside `[A, B]`.
    pub fn pdf(&self, x: T) -> T {
        let c = &self.constraints;
        if x < c.a_min || x > c.b_peak || x.is_nan() {
            return T::zero();
        }
        (self.eta_star / x + self.mu_star - T::one()).exp()
    }

    /// Distribution function `I_h(A, x, η*) / I_h(A, B, η*)`.
    pub fn cdf(&self, x: T) -> T {
        let c = &self.constraints;
        if !(x > c.a_min) {
            return T::zero();
        }
        if x >= c.b_peak {
            return T::one();
        }
        match ln_ih_integral(c.a_min, x, self.eta_star) {
            Ok(ln_partial) => (ln_partial + self.mu_star - T::one()).exp().min(T::one()),
            Err(_) => T::zero(),
        }
    }

    /// Harmonic mean `E[1/X] = e^{μ*-1}(Ei(η*/A) - Ei(η*/B))`.
    pub fn harmonic_mean(&self) -> T {
        let c = &self.constraints;
        ln_ei_difference(c.a_min, c.b_peak, self.eta_star)
            .map(|l| (l + self.mu_star - T::one()).exp())
            .unwrap_or_else(|_| T::nan())
    }

    /// Differential entropy in nats.
    ///
    /// Trade-off regime: `ln((Ei(η*/A) - Ei(η*/B))/ς) - η*ς`; otherwise
    /// `ln(B - A)`.
    pub fn entropy(&self) -> T {
        let c = &self.constraints;
        match self.case {
            CaseClassification::TradeOff => {
                let ln_diff = ln_ei_difference(c.a_min, c.b_peak, self.eta_star).unwrap_or_else(|_| T::nan());
                ln_diff - c.sigma_h.ln() - self.eta_star * c.sigma_h
            }
            _ => c.width().ln(),
        }
    }

    /// EPI lower bound `½ ln(1 + e^{2h}/(2πe σ̃²))` in nats.
    pub fn capacity_lower_bound(&self, noise_sigma: T) -> T {
        let two = T::lit(2.0);
        let log_ratio = two * (self.entropy() - noise_sigma.ln()) - (two * T::PI() * T::E()).ln();
        softplus(log_ratio) / two
    }
}
