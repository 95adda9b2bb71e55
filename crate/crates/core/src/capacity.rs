//! Capacity upper bounds, asymptotes and trade-off curves.
//!
//! All quantities are in nats. The SNR axis is `(B - A)/σ̃_c` expressed as
//! `10·log10((B - A)/σ̃_c)`; see [`noise_sigma_from_snr_db`].

use rayon::prelude::*;

use crate::envelope::{mutual_information_discrete, PamConstellation};
use crate::error::{domain, Error, Result};
use crate::maxent::{solve_max_entropy, EnvelopeConstraints};
use crate::scalar::Real;
use crate::specialfn::{gaussian_q, ln_ei_difference, ln_ih_integral};

/// Slack allowed in the lower ≤ upper sandwich check.
pub const SANDWICH_SLACK: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Max-variance input
// ---------------------------------------------------------------------------

/// Which constraint shapes the variance-maximising two-point law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaxVarianceCase {
    /// `ς ≥ (1/A + 1/B)/2`: equiprobable on `{A, B}`.
    Unconstrained,
    /// `1/(2A) < ς < (1/A + 1/B)/2`: support `{A, B}`, harmonic mean tight.
    FloorLimited,
    /// `ς ≤ 1/(2A)`: support `{1/(2ς), B}`, harmonic mean tight.
    HarmonicLimited,
}

impl MaxVarianceCase {
    pub fn label(&self) -> &'static str {
        match self {
            MaxVarianceCase::Unconstrained => "III-1",
            MaxVarianceCase::FloorLimited => "III-2",
            MaxVarianceCase::HarmonicLimited => "III-3",
        }
    }
}

/// Largest input variance under the envelope constraints, with its
/// Bernoulli law `P(X = low_level) = low_prob`, `P(X = B) = 1 - low_prob`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxVarianceResult<T> {
    pub variance: T,
    pub mean: T,
    pub harmonic: T,
    pub case: MaxVarianceCase,
    pub low_level: T,
    pub low_prob: T,
    pub b_peak: T,
}

pub fn max_variance<T: Real>(c: &EnvelopeConstraints<T>) -> Result<MaxVarianceResult<T>> {
    if !c.is_feasible() {
        return Err(c.infeasible_error());
    }
    let (a, b, s) = (c.a_min(), c.b_peak(), c.sigma_h());
    let half = T::lit(0.5);
    let inv_b = b.recip();
    let (case, variance, low_level, low_prob) = if s >= half * (a.recip() + inv_b) {
        let w = b - a;
        (MaxVarianceCase::Unconstrained, w * w * T::lit(0.25), a, half)
    } else if s <= (T::lit(2.0) * a).recip() {
        let var = b * (b * s - T::one()) / (T::lit(4.0) * s);
        let x1 = (T::lit(2.0) * s).recip();
        let p = (s - inv_b) / (T::lit(2.0) * s - inv_b);
        (MaxVarianceCase::HarmonicLimited, var, x1, p)
    } else {
        let var = (s - inv_b) * (a.recip() - s) * a * a * b * b;
        let p = (s - inv_b) / (a.recip() - inv_b);
        (MaxVarianceCase::FloorLimited, var, a, p)
    };
    let mean = low_prob * low_level + (T::one() - low_prob) * b;
    let harmonic = low_prob / low_level + (T::one() - low_prob) * inv_b;
    Ok(MaxVarianceResult {
        variance,
        mean,
        harmonic,
        case,
        low_level,
        low_prob,
        b_peak: b,
    })
}

/// Duality upper bound with a Gaussian output law: `½ ln(1 + σ_X²/σ̃²)`.
pub fn low_snr_upper_bound<T: Real>(v: &MaxVarianceResult<T>, noise_sigma: T) -> T {
    (v.variance / (noise_sigma * noise_sigma)).ln_1p() * T::lit(0.5)
}

/// Low-SNR asymptote `σ_X²/(2σ̃²)`.
pub fn low_snr_asymptote<T: Real>(v: &MaxVarianceResult<T>, noise_sigma: T) -> T {
    v.variance / (T::lit(2.0) * noise_sigma * noise_sigma)
}

// ---------------------------------------------------------------------------
// High-SNR bound
// ---------------------------------------------------------------------------

/// Output-law parameters of the high-SNR duality bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighSnrHyperParams<T> {
    /// `ς* = min(ς, 2/(A + B))`
    pub sigma_star: T,
    /// Width of the Gaussian roll-off margin, `δ = σ̃ ln(1 + A/(2σ̃))`.
    pub delta: T,
    /// `η̃ = η*(1 - exp(-ς δ²/(2σ̃²)))`
    pub eta_tilde: T,
}

pub fn high_snr_hyperparams<T: Real>(c: &EnvelopeConstraints<T>, eta_star: T, noise_sigma: T) -> HighSnrHyperParams<T> {
    let two = T::lit(2.0);
    let sigma_star = c.sigma_h().min(two / (c.a_min() + c.b_peak()));
    let delta = noise_sigma * (c.a_min() / (two * noise_sigma)).ln_1p();
    let decay = (-(c.sigma_h() * delta * delta) / (two * noise_sigma * noise_sigma)).exp();
    let eta_tilde = eta_star * (T::one() - decay);
    HighSnrHyperParams {
        sigma_star,
        delta,
        eta_tilde,
    }
}

/// Closed-form high-SNR duality upper bound.
///
/// The output law follows `exp(η̃/y)/J` on `[A - δ, B + δ]` with Gaussian
/// tails outside, `J = I_h(A - δ, B + δ, η̃)/(1 - 2Q(δ/σ̃))`. Requires
/// `δ < A`.
pub fn high_snr_upper_bound<T: Real>(
    c: &EnvelopeConstraints<T>,
    hp: &HighSnrHyperParams<T>,
    noise_sigma: T,
) -> Result<T> {
    let (a, b, s) = (c.a_min(), c.b_peak(), c.sigma_h());
    let (delta, eta_t) = (hp.delta, hp.eta_tilde);
    if !(delta < a) {
        return Err(domain(format!("roll-off margin delta = {delta} must be below A = {a}")));
    }
    if !(noise_sigma > T::zero()) {
        return Err(domain(format!("noise sigma must be positive, got {noise_sigma}")));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let sqrt_2pi = (two * T::PI()).sqrt();
    let sg = noise_sigma;
    let q = |x: T| gaussian_q(x);

    let ln_j = ln_ih_integral(a - delta, b + delta, eta_t)? - (T::one() - two * q(delta / sg)).ln();
    let inv_ss = hp.sigma_star.recip();
    let inner_mass = T::one() - q((inv_ss - a + delta) / sg) - q((b - inv_ss + delta) / sg);
    let gauss = |d: T| (-(d * d) / (two * sg * sg)).exp();

    let tail = delta / (sqrt_2pi * sg) * gauss(delta) - half;
    let log_term = (ln_j - (sqrt_2pi * sg).ln()) * inner_mass;
    let harmonic = T::one() - two * q((b - a + two * delta) / (two * sg))
        + sg / sqrt_2pi
            * ((a - delta).recip() * (T::one() - gauss(b - a + delta))
                - (b + delta).recip() * (T::one() - gauss(delta)));
    let bound = tail + log_term + q(delta / sg) - eta_t * s * harmonic;
    if !bound.is_finite() {
        return Err(Error::Invariant(format!("high-SNR bound not finite at sigma = {sg}")));
    }
    Ok(bound)
}

/// `ln((Ei(η/A) - Ei(η/B))/((B - A)ς)) - ης`, or `0` when `η = 0`.
fn entropy_excess<T: Real>(c: &EnvelopeConstraints<T>, eta_star: T) -> T {
    if eta_star == T::zero() {
        return T::zero();
    }
    let ln_diff = ln_ei_difference(c.a_min(), c.b_peak(), eta_star).unwrap_or_else(|_| T::nan());
    ln_diff - (c.width() * c.sigma_h()).ln() - eta_star * c.sigma_h()
}

/// Asymptotic gap `lim C - ln((B - A)/σ̃)`; `-½ ln(2πe)` when `η* = 0`.
pub fn asymptotic_gap<T: Real>(c: &EnvelopeConstraints<T>, eta_star: T) -> T {
    -T::lit(0.5) * (T::lit(2.0) * T::PI() * T::E()).ln() + entropy_excess(c, eta_star)
}

/// High-SNR asymptote `ln((B - A)/σ̃) + gap`.
pub fn high_snr_asymptote<T: Real>(c: &EnvelopeConstraints<T>, eta_star: T, noise_sigma: T) -> T {
    (c.width() / noise_sigma).ln() + asymptotic_gap(c, eta_star)
}

// ---------------------------------------------------------------------------
// Normalized sensing priority and SNR axis
// ---------------------------------------------------------------------------

/// `χ = (ς_max - ς)/(ς_max - ς_min)` for `ς ∈ [1/B, ς_max]`.
pub fn nsp_from_sigma<T: Real>(c: &EnvelopeConstraints<T>) -> Result<T> {
    let (lo, hi) = (c.sigma_min(), c.sigma_max());
    let s = c.sigma_h();
    if s < lo || s > hi {
        return Err(domain(format!("sigma_h = {s} outside [{lo}, {hi}]")));
    }
    Ok((hi - s) / (hi - lo))
}

/// Inverse of [`nsp_from_sigma`].
pub fn sigma_from_nsp<T: Real>(a: T, b: T, chi: T) -> Result<T> {
    if !(chi >= T::zero() && chi <= T::one()) {
        return Err(domain(format!("NSP must lie in [0, 1], got {chi}")));
    }
    if !(a > T::zero()) || !(b > a) {
        return Err(domain(format!("require 0 < A < B, got A = {a}, B = {b}")));
    }
    let hi = (b.ln() - a.ln()) / (b - a);
    let lo = b.recip();
    Ok(hi - chi * (hi - lo))
}

/// `σ̃_c` such that `10·log10((B - A)/σ̃_c) = snr_db`.
pub fn noise_sigma_from_snr_db<T: Real>(width: T, snr_db: T) -> T {
    width / T::lit(10.0).powf(snr_db / T::lit(10.0))
}

pub fn snr_db_from_noise_sigma<T: Real>(width: T, noise_sigma: T) -> T {
    T::lit(10.0) * (width / noise_sigma).log10()
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

/// Per-SNR capacity bounds, asymptotes and PAM achievable rates (nats).
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve<T> {
    pub constraints: EnvelopeConstraints<T>,
    pub eta_star: T,
    pub snr_db: Vec<T>,
    pub noise_sigma: Vec<T>,
    pub lower: Vec<T>,
    pub upper_low: Vec<T>,
    pub upper_high: Vec<T>,
    /// Grid points where the high-SNR bound was unavailable (`δ ≥ A`) and
    /// `upper_high` holds the low-SNR bound instead.
    pub upper_high_fallback: Vec<bool>,
    pub asymptote_low: Vec<T>,
    pub asymptote_high: Vec<T>,
    /// `(label, rates)` in the order the constellations were given.
    pub achievable: Vec<(String, Vec<T>)>,
}

struct CurvePoint<T> {
    sigma: T,
    lower: T,
    upper_low: T,
    upper_high: T,
    fallback: bool,
    asymptote_low: T,
    asymptote_high: T,
    achievable: Vec<T>,
}

/// Evaluates every bound on `snr_grid_db`; grid points run in parallel and
/// are returned in grid order.
pub fn build_capacity_curve<T: Real>(
    c: &EnvelopeConstraints<T>,
    snr_grid_db: &[T],
    constellations: &[(String, PamConstellation<T>)],
) -> Result<CapacityCurve<T>> {
    let dist = solve_max_entropy(c, T::lit(crate::maxent::DEFAULT_TOL_ETA))?;
    let var = max_variance(c)?;
    let eta = dist.eta_star();
    let slack = T::lit(SANDWICH_SLACK);

    let points: Vec<CurvePoint<T>> = snr_grid_db
        .par_iter()
        .map(|&db| -> Result<CurvePoint<T>> {
            let sigma = noise_sigma_from_snr_db(c.width(), db);
            let lower = dist.capacity_lower_bound(sigma);
            let upper_low = low_snr_upper_bound(&var, sigma);
            let hp = high_snr_hyperparams(c, eta, sigma);
            let (upper_high, fallback) = match high_snr_upper_bound(c, &hp, sigma) {
                Ok(v) => (v, false),
                Err(Error::Domain(_)) => (upper_low, true),
                Err(e) => return Err(e),
            };
            if lower > upper_low.min(upper_high) + slack {
                return Err(Error::Invariant(format!(
                    "sandwich violated at {db} dB: lower {lower}, upper_low {upper_low}, upper_high {upper_high}"
                )));
            }
            let achievable = constellations
                .iter()
                .map(|(_, p)| mutual_information_discrete(p, sigma))
                .collect::<Result<Vec<T>>>()?;
            Ok(CurvePoint {
                sigma,
                lower,
                upper_low,
                upper_high,
                fallback,
                asymptote_low: low_snr_asymptote(&var, sigma),
                asymptote_high: high_snr_asymptote(c, eta, sigma),
                achievable,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let achievable = constellations
        .iter()
        .enumerate()
        .map(|(k, (label, _))| (label.clone(), points.iter().map(|p| p.achievable[k]).collect()))
        .collect();
    Ok(CapacityCurve {
        constraints: *c,
        eta_star: eta,
        snr_db: snr_grid_db.to_vec(),
        noise_sigma: points.iter().map(|p| p.sigma).collect(),
        lower: points.iter().map(|p| p.lower).collect(),
        upper_low: points.iter().map(|p| p.upper_low).collect(),
        upper_high: points.iter().map(|p| p.upper_high).collect(),
        upper_high_fallback: points.iter().map(|p| p.fallback).collect(),
        asymptote_low: points.iter().map(|p| p.asymptote_low).collect(),
        asymptote_high: points.iter().map(|p| p.asymptote_high).collect(),
        achievable,
    })
}

/// One point of the high-SNR trade-off plane (NSP vs asymptotic gap).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint<T> {
    pub nsp: T,
    pub sigma_h: T,
    pub eta_star: T,
    pub gap: T,
}

pub fn tradeoff_high<T: Real>(a: T, b: T, nsp_grid: &[T]) -> Result<Vec<GapPoint<T>>> {
    nsp_grid
        .iter()
        .map(|&chi| {
            let c = EnvelopeConstraints::from_nsp(a, b, chi)?;
            let d = solve_max_entropy(&c, T::lit(crate::maxent::DEFAULT_TOL_ETA))?;
            Ok(GapPoint {
                nsp: chi,
                sigma_h: c.sigma_h(),
                eta_star: d.eta_star(),
                gap: asymptotic_gap(&c, d.eta_star()),
            })
        })
        .collect()
}

/// One point of the low-SNR trade-off plane (NSP vs maximum variance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePoint<T> {
    pub nsp: T,
    pub sigma_h: T,
    pub variance: T,
    pub case: MaxVarianceCase,
}

pub fn tradeoff_low<T: Real>(a: T, b: T, nsp_grid: &[T]) -> Result<Vec<VariancePoint<T>>> {
    nsp_grid
        .iter()
        .map(|&chi| {
            let c = EnvelopeConstraints::from_nsp(a, b, chi)?;
            let v = max_variance(&c)?;
            Ok(VariancePoint {
                nsp: chi,
                sigma_h: c.sigma_h(),
                variance: v.variance,
                case: v.case,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cons(s: f64) -> EnvelopeConstraints<f64> {
        EnvelopeConstraints::new(0.1, 1.0, s).unwrap()
    }

    #[test]
    fn max_variance_cases() {
        let v = max_variance(&cons(6.0)).unwrap();
        assert_eq!(v.case, MaxVarianceCase::Unconstrained);
        assert!((v.variance - 0.2025).abs() < 1e-15 && (v.mean - 0.55).abs() < 1e-15);

        let v = max_variance(&cons(2.0)).unwrap();
        assert_eq!(v.case, MaxVarianceCase::HarmonicLimited);
        assert!((v.variance - 0.125).abs() < 1e-15 && (v.mean - 0.75).abs() < 1e-15);

        let v = max_variance(&cons(5.2)).unwrap();
        assert_eq!(v.case, MaxVarianceCase::FloorLimited);
        assert!((v.variance - 0.2016).abs() < 1e-14 && (v.mean - 0.58).abs() < 1e-14);
    }

    #[test]
    fn boundary_at_half_inverse_floor_is_harmonic_limited() {
        let v = max_variance(&cons(5.0)).unwrap();
        assert_eq!(v.case, MaxVarianceCase::HarmonicLimited);
        let formula_iii2 = (5.0 - 1.0) * (10.0 - 5.0) * 0.01;
        assert!((v.variance - formula_iii2).abs() < 1e-14);
    }

    #[test]
    fn max_variance_infeasible() {
        assert!(matches!(
            max_variance(&cons(0.8)),
            Err(Error::InfeasibleConstraint { .. })
        ));
    }

    #[test]
    fn low_snr_examples() {
        let v = MaxVarianceResult {
            variance: 0.125,
            ..max_variance(&cons(2.0)).unwrap()
        };
        assert!((low_snr_upper_bound(&v, 0.5) - 0.5 * 1.5f64.ln()).abs() < 1e-15);
        let zero = MaxVarianceResult { variance: 0.0, ..v };
        assert_eq!(low_snr_upper_bound(&zero, 0.5), 0.0);

        let v = max_variance(&cons(6.0)).unwrap();
        assert!((low_snr_asymptote(&v, 4.5) - 0.005).abs() < 1e-15);
        assert!((low_snr_asymptote(&v, 9.0) * 4.0 - low_snr_asymptote(&v, 4.5)).abs() < 1e-15);
        assert!(low_snr_upper_bound(&v, 4.5) <= low_snr_asymptote(&v, 4.5));
    }

    #[test]
    fn low_snr_bound_taylor_ratio() {
        let v = max_variance(&cons(2.0)).unwrap();
        let sigma = 100.0 * 0.9;
        let ratio = low_snr_upper_bound(&v, sigma) / low_snr_asymptote(&v, sigma);
        assert!((ratio - 1.0).abs() < 0.01);
    }

    #[test]
    fn hyperparams_example() {
        let hp = high_snr_hyperparams(&cons(2.0), -1.0, 0.01);
        assert!((hp.sigma_star - 2.0 / 1.1).abs() < 1e-15);
        assert!((hp.delta - 0.01 * 6f64.ln()).abs() < 1e-15);
        assert!((hp.delta - 0.017918).abs() < 1e-6);
        assert_eq!(high_snr_hyperparams(&cons(2.0), 0.0, 0.01).eta_tilde, 0.0);
        let tight = high_snr_hyperparams(&cons(2.0), -1.3, 1e-6);
        assert!((tight.eta_tilde + 1.3).abs() < 1e-12);
    }

    #[test]
    fn high_snr_bound_domain_guard() {
        let c = cons(2.0);
        let hp = HighSnrHyperParams {
            sigma_star: 1.0,
            delta: 0.2,
            eta_tilde: 0.0,
        };
        assert!(matches!(high_snr_upper_bound(&c, &hp, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn conventional_gap() {
        let gap = asymptotic_gap(&cons(3.0), 0.0);
        let want = -0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((gap - want).abs() < 1e-15);
        assert!((gap + 1.41894).abs() < 1e-5);
    }

    #[test]
    fn nsp_endpoints_and_inverse() {
        let c = cons(1.0);
        assert!((nsp_from_sigma(&c.with_sigma(c.sigma_max()).unwrap()).unwrap()).abs() < 1e-15);
        assert!((nsp_from_sigma(&c).unwrap() - 1.0).abs() < 1e-15);
        let chi = nsp_from_sigma(&cons(1.156)).unwrap();
        assert!((chi - 0.90).abs() < 5e-3, "{chi}");
        let back = sigma_from_nsp(0.1, 1.0, chi).unwrap();
        assert!((back - 1.156).abs() < 1e-14);
        assert!(nsp_from_sigma(&cons(3.0)).is_err());
        assert!(sigma_from_nsp(0.1, 1.0, 1.5).is_err());
    }

    #[test]
    fn snr_axis_round_trip() {
        let s: f64 = noise_sigma_from_snr_db(0.9, 40.0);
        assert!((s - 0.9e-4).abs() < 1e-18);
        assert!((snr_db_from_noise_sigma(0.9f64, s) - 40.0).abs() < 1e-12);
    }
}
