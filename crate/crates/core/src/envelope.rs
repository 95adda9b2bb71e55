//! PAM envelope laws: low-SNR two-level design, high-SNR max-entropy
//! probabilities on uniform levels, CDF comparison and achievable rates.

use std::io::{BufRead, Write};

use crate::bisection::extended_bisection;
use crate::capacity::max_variance;
use crate::error::{domain, Error, Result};
use crate::maxent::{EnvelopeConstraints, MaxEntropyDistribution};
use crate::quadrature::integrate;
use crate::scalar::{log_sum_exp, Real};

/// Column header of the constellation CSV format.
pub const CONSTELLATION_CSV_HEADER: &str = "level,probability";

/// Absolute tolerance of the mutual-information quadrature.
pub const MI_ABS_TOL: f64 = 1e-8;

/// Half-width, in noise standard deviations, of each component's window.
const MI_WINDOW_SIGMAS: f64 = 10.0;

/// Discrete envelope law: strictly increasing `levels` with masses `probs`.
#[derive(Debug, Clone, PartialEq)]
pub struct PamConstellation<T> {
    levels: Vec<T>,
    probs: Vec<T>,
}

fn sum_tolerance<T: Real>(m: usize) -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(8.0) * T::from_count(m))
}

impl<T: Real> PamConstellation<T> {
    pub fn new(levels: Vec<T>, probs: Vec<T>) -> Result<Self> {
        if levels.is_empty() || levels.len() != probs.len() {
            return Err(domain(format!(
                "need matching non-empty levels/probs, got {} and {}",
                levels.len(),
                probs.len()
            )));
        }
        if levels.iter().any(|x| !x.is_finite()) || levels.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("levels must be finite and strictly increasing"));
        }
        if probs.iter().any(|p| !(*p >= T::zero())) {
            return Err(domain("probabilities must be non-negative"));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > sum_tolerance::<T>(probs.len()) {
            return Err(domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { levels, probs })
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn mean(&self) -> T {
        self.pairs().map(|(x, p)| p * x).sum()
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.pairs().map(|(x, p)| p * (x - m) * (x - m)).sum()
    }

    /// `E[1/X] = Σ a_m / x_m`.
    pub fn harmonic_mean(&self) -> T {
        self.pairs().map(|(x, p)| p / x).sum()
    }

    /// Discrete entropy `-Σ a_m ln a_m` in nats.
    pub fn entropy(&self) -> T {
        self.probs
            .iter()
            .filter(|p| **p > T::zero())
            .map(|&p| -p * p.ln())
            .sum()
    }

    /// Right-continuous step CDF.
    pub fn cdf(&self, x: T) -> T {
        let mass: T = self.pairs().filter(|(l, _)| *l <= x).map(|(_, p)| p).sum();
        mass.min(T::one())
    }

    fn pairs(&self) -> impl Iterator<Item = (T, T)> + Clone + '_ {
        self.levels.iter().copied().zip(self.probs.iter().copied())
    }

    /// Writes `level,probability` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CONSTELLATION_CSV_HEADER}")?;
        for (x, p) in self.pairs() {
            writeln!(w, "{},{}", x.as_f64(), p.as_f64())?;
        }
        Ok(())
    }

    /// Reads the format written by [`write_csv`](Self::write_csv). Lines
    /// starting with `#` are skipped.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut levels = Vec::new();
        let mut probs = Vec::new();
        let mut saw_header = false;
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line.replace(' ', "") != CONSTELLATION_CSV_HEADER {
                    return Err(Error::Parse(format!(
                        "line {}: expected header `{CONSTELLATION_CSV_HEADER}`",
                        lineno + 1
                    )));
                }
                saw_header = true;
                continue;
            }
            let mut cols = line.split(',');
            let mut field = |name: &str| -> Result<T> {
                let raw = cols
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing {name}", lineno + 1)))?;
                raw.trim()
                    .parse::<f64>()
                    .map(T::lit)
                    .map_err(|e| Error::Parse(format!("line {}: {name}: {e}", lineno + 1)))
            };
            levels.push(field("level")?);
            probs.push(field("probability")?);
        }
        Self::new(levels, probs)
    }
}

// ---------------------------------------------------------------------------
// Designs
// ---------------------------------------------------------------------------

/// Two-level design attaining the maximum input variance.
pub fn design_low_snr<T: Real>(c: &EnvelopeConstraints<T>) -> Result<PamConstellation<T>> {
    let v = max_variance(c)?;
    PamConstellation::new(vec![v.low_level, c.b_peak()], vec![v.low_prob, T::one() - v.low_prob])
}

/// `x_k = ((k-1)B + (M-k)A)/(M-1)`, endpoints exactly `A` and `B`.
pub fn pam_levels_uniform<T: Real>(c: &EnvelopeConstraints<T>, m: usize) -> Result<Vec<T>> {
    if m < 2 {
        return Err(domain(format!("PAM order must be at least 2, got {m}")));
    }
    let (a, b) = (c.a_min(), c.b_peak());
    let denom = T::from_count(m - 1);
    Ok((0..m)
        .map(|k| match k {
            0 => a,
            _ if k == m - 1 => b,
            _ => (T::from_count(k) * b + T::from_count(m - 1 - k) * a) / denom,
        })
        .collect())
}

/// Regime of the discrete max-entropy design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiscreteCase {
    /// Equal probabilities already meet the threshold.
    ConstraintInactive,
    /// The harmonic-mean constraint binds.
    TradeOff,
}

/// Max-entropy PAM law `a_m = exp(η̂/x_m + μ̂ - 1)` on uniform levels.
#[derive(Debug, Clone, PartialEq)]
pub struct HighSnrDesign<T> {
    pub constellation: PamConstellation<T>,
    pub eta_hat: T,
    pub mu_hat: T,
    pub case: DiscreteCase,
}

/// `Σ e^{η/x_m} / Σ (1/x_m) e^{η/x_m}`.
pub fn discrete_dual_ratio<T: Real>(levels: &[T], eta: T) -> T {
    let shift = levels.iter().map(|&x| eta / x).fold(T::neg_infinity(), T::max);
    let (num, den) = levels.iter().fold((T::zero(), T::zero()), |(n, d), &x| {
        let w = (eta / x - shift).exp();
        (n + w, d + w / x)
    });
    num / den
}

pub fn design_high_snr<T: Real>(c: &EnvelopeConstraints<T>, m: usize, tol: T) -> Result<HighSnrDesign<T>> {
    let levels = pam_levels_uniform(c, m)?;
    if !c.is_feasible() {
        return Err(c.infeasible_error());
    }
    let uniform_harmonic = levels.iter().map(|x| x.recip()).sum::<T>() / T::from_count(m);
    let (eta_hat, case) = if uniform_harmonic <= c.sigma_h() {
        (T::zero(), DiscreteCase::ConstraintInactive)
    } else {
        let target = c.sigma_h().recip();
        let eta = extended_bisection(|eta| Ok(discrete_dual_ratio(&levels, eta)), target, tol)?;
        (eta, DiscreteCase::TradeOff)
    };
    let ln_norm = log_sum_exp(levels.iter().map(|&x| eta_hat / x));
    let mu_hat = T::one() - ln_norm;
    let probs = levels.iter().map(|&x| (eta_hat / x - ln_norm).exp()).collect();
    Ok(HighSnrDesign {
        constellation: PamConstellation::new(levels, probs)?,
        eta_hat,
        mu_hat,
        case,
    })
}

// ---------------------------------------------------------------------------
// Distribution comparison and achievable rate
// ---------------------------------------------------------------------------

/// `sup_x |F_pam(x) - F_maxent(x)|`, attained at a level (left or right limit).
pub fn cdf_sup_distance<T: Real>(p: &PamConstellation<T>, d: &MaxEntropyDistribution<T>) -> T {
    let mut below = T::zero();
    let mut worst = T::zero();
    for (&x, &a) in p.levels().iter().zip(p.probs()) {
        let f = d.cdf(x);
        let above = below + a;
        worst = worst.max((f - below).abs()).max((f - above).abs());
        below = above;
    }
    worst
}

/// `I(X; X + N)` for a PAM input and Gaussian noise of std `noise_sigma`.
///
/// Each mixture component is integrated over `y = x_m + σ̃u`, `|u| ≤ 10`:
/// `I = -Σ_m a_m ∫ φ(u) ln Σ_k a_k exp(-u d_mk - d_mk²/2) du` with
/// `d_mk = (x_m - x_k)/σ̃`.
pub fn mutual_information_discrete<T: Real>(p: &PamConstellation<T>, noise_sigma: T) -> Result<T> {
    if !(noise_sigma > T::zero()) || !noise_sigma.is_finite() {
        return Err(domain(format!(
            "noise sigma must be positive and finite, got {noise_sigma}"
        )));
    }
    let support: Vec<(T, T)> = p.pairs().filter(|(_, a)| *a > T::zero()).collect();
    if support.len() < 2 {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let inv_sqrt_2pi = (T::lit(2.0) * T::PI()).sqrt().recip();
    let window = T::lit(MI_WINDOW_SIGMAS);
    let tol = T::lit(MI_ABS_TOL);
    let mut total = T::zero();
    for &(xm, am) in &support {
        let offsets: Vec<(T, T)> = support
            .iter()
            .map(|&(xk, ak)| ((xm - xk) / noise_sigma, ak.ln()))
            .collect();
        let integrand = |u: T| {
            let lse = log_sum_exp(offsets.iter().map(|&(d, ln_a)| ln_a - u * d - half * d * d));
            -(-half * u * u).exp() * inv_sqrt_2pi * lse
        };
        total = total + am * integrate(integrand, -window, window, tol)?.value;
    }
    Ok(total.max(T::zero()).min(p.entropy()))
}
