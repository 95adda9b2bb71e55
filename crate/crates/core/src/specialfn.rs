//! Exponential integral, Gaussian tail and the truncated exponential-family
//! integrals that every solver in this crate is built on.
//!
//! The exponential integral is evaluated for negative arguments only:
//!
//! ```text
//! Ei(x) = ∫_{-∞}^{x} e^u / u du,   x < 0
//! ```
//!
//! Two branches are used: a Lentz continued fraction for `x < -1` and the
//! Euler–Mascheroni power series on `[-1, 0)`. Both are accurate to a few ulp
//! on their range. The continued fraction naturally produces the scaled value
//! `e^{-x} Ei(x)`, which is what the integrals below consume so that they stay
//! finite long after `Ei` itself underflows (`x < -745` in `f64`).
//!
//! `I_h(a, b, η) = ∫_a^b e^{η/x} dx` and the ratio `g_h(η)` of `I_h` to the
//! harmonic moment are written in terms of the scaled exponential integral,
//! factoring out `e^{η/b}`.

use crate::error::{domain, Result};
use crate::scalar::Real;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_CF_ITERATIONS: usize = 10_000;
const MAX_SERIES_TERMS: usize = 200;

/// Exponential integral `Ei(x)` for `x < 0`.
///
/// Strictly negative and strictly decreasing on `(-∞, 0)`, tending to `0` at
/// `-∞` and to `-∞` at `0⁻`. Underflows to `-0` below about `-745` (`f64`).
pub fn exp_integral_ei<T: Real>(x: T) -> Result<T> {
    check_negative(x)?;
    if x < -T::one() {
        Ok(x.exp() * scaled_cf(x))
    } else {
        Ok(series(x))
    }
}

/// `e^{-x} Ei(x)` for `x < 0`; never underflows.
pub fn exp_integral_ei_scaled<T: Real>(x: T) -> Result<T> {
    check_negative(x)?;
    Ok(scaled_unchecked(x))
}

fn check_negative<T: Real>(x: T) -> Result<()> {
    if !(x < T::zero()) || !x.is_finite() {
        return Err(domain(format!("Ei requires a finite negative argument, got {x}")));
    }
    Ok(())
}

fn scaled_unchecked<T: Real>(x: T) -> T {
    if x < -T::one() {
        scaled_cf(x)
    } else {
        (-x).exp() * series(x)
    }
}

/// Modified Lentz evaluation of `e^{z} E1(z)`, `z = -x > 1`; returns
/// `e^{-x} Ei(x) = -e^{z} E1(z)`.
fn scaled_cf<T: Real>(x: T) -> T {
    let z = -x;
    let tiny = T::min_positive_value() / T::epsilon();
    let two = T::lit(2.0);
    let mut b = z + T::one();
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_CF_ITERATIONS {
        let k = T::from_count(i);
        let an = -k * k;
        b = b + two;
        d = T::one() / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h = h * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    -h
}

/// `γ + ln|x| + Σ_{k≥1} x^k / (k·k!)` for `-1 ≤ x < 0`.
fn series<T: Real>(x: T) -> T {
    let mut sum = T::zero();
    let mut term = T::one();
    for k in 1..MAX_SERIES_TERMS {
        let kf = T::from_count(k);
        term = term * x / kf;
        let contribution = term / kf;
        sum = sum + contribution;
        if contribution.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    T::lit(EULER_GAMMA) + (-x).ln() + sum
}

/// Standard Gaussian tail `Q(x) = 1 - Φ(x)`.
pub fn gaussian_q<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    T::lit(0.5 * libm::erfc(x.as_f64() / std::f64::consts::SQRT_2))
}

fn check_interval<T: Real>(a: T, b: T, eta: T) -> Result<()> {
    if !(a > T::zero()) || !(b > a) || !b.is_finite() {
        return Err(domain(format!("require 0 < a < b, got a = {a}, b = {b}")));
    }
    if eta > T::zero() || !eta.is_finite() {
        return Err(domain(format!("require finite eta <= 0, got {eta}")));
    }
    Ok(())
}

/// Pieces shared by `I_h`, `g_h` and the Ei difference, all scaled by `e^{-η/b}`.
struct Scaled<T> {
    /// `η / b`
    log_scale: T,
    /// `b - a e^{η/a - η/b}`
    boundary: T,
    /// `(Ei(η/a) - Ei(η/b)) e^{-η/b}`, positive
    ei_diff: T,
}

fn scaled_parts<T: Real>(a: T, b: T, eta: T) -> Scaled<T> {
    let p = eta / a;
    let q = eta / b;
    let r = (p - q).exp();
    Scaled {
        log_scale: q,
        boundary: b - a * r,
        ei_diff: scaled_unchecked(p) * r - scaled_unchecked(q),
    }
}

/// `I_h(a, b, η) = ∫_a^b exp(η/x) dx`.
///
/// Equals `b e^{η/b} - a e^{η/a} + η Ei(η/a) - η Ei(η/b)`, with the `η = 0`
/// case returned as `b - a`.
pub fn ih_integral<T: Real>(a: T, b: T, eta: T) -> Result<T> {
    ln_ih_integral(a, b, eta).map(T::exp)
}

/// Natural log of [`ih_integral`], finite for arbitrarily negative `η`.
pub fn ln_ih_integral<T: Real>(a: T, b: T, eta: T) -> Result<T> {
    check_interval(a, b, eta)?;
    if eta == T::zero() {
        return Ok((b - a).ln());
    }
    let s = scaled_parts(a, b, eta);
    Ok(s.log_scale + (s.boundary + eta * s.ei_diff).ln())
}

/// `ln(Ei(η/a) - Ei(η/b)) = ln ∫_a^b e^{η/x}/x dx`; `ln(ln(b/a))` at `η = 0`.
pub fn ln_ei_difference<T: Real>(a: T, b: T, eta: T) -> Result<T> {
    check_interval(a, b, eta)?;
    if eta == T::zero() {
        return Ok((b.ln() - a.ln()).ln());
    }
    let s = scaled_parts(a, b, eta);
    Ok(s.log_scale + s.ei_diff.ln())
}

/// Auxiliary ratio `g_h(η) = I_h / (Ei(η/a) - Ei(η/b))`.
///
/// Strictly decreasing on `(-∞, 0]` from `(b - a)/(ln b - ln a)` at `η = 0`
/// towards `b` as `η → -∞`.
pub fn gh_auxiliary<T: Real>(a: T, b: T, eta: T) -> Result<T> {
    check_interval(a, b, eta)?;
    if eta == T::zero() {
        return Ok((b - a) / (b.ln() - a.ln()));
    }
    let s = scaled_parts(a, b, eta);
    Ok(s.boundary / s.ei_diff + eta)
}
