//! Extended bisection on `(-∞, 0]` for a decreasing dual function.
//!
//! Both the continuous max-entropy solver and the discrete PAM design reduce
//! to finding `η ≤ 0` with `g(η) = target`, where `g` decreases from
//! `g(0) < target` towards a limit above `target`. The left end of the bracket
//! starts at `-1` and doubles until `g` crosses the target; plain bisection
//! follows. Termination requires both the bracket width below `tol_eta` and
//! the residual `|g(η) - target|` below [`residual_tolerance`].

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Maximum number of left-bracket doublings.
pub const MAX_DOUBLINGS: usize = 64;

/// Residual bound: `1e-8`, relaxed to `1000·ε` for low-precision scalars.
pub fn residual_tolerance<T: Real>() -> T {
    T::lit(1e-8).max(T::epsilon() * T::lit(1e3))
}

/// Root of the decreasing function `g` at level `target` on `(-∞, 0)`.
pub fn extended_bisection<T, G>(g: G, target: T, tol_eta: T) -> Result<T>
where
    T: Real,
    G: Fn(T) -> Result<T>,
{
    if !(tol_eta > T::zero()) {
        return Err(crate::error::domain(format!("tol_eta must be positive, got {tol_eta}")));
    }
    let residual_tol = residual_tolerance::<T>();
    let mut right = T::zero();
    let mut left = -T::one();
    let mut g_left = g(left)?;
    let mut doublings = 0;
    while g_left < target {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::NonConvergence(format!(
                "bracket did not reach target {target} after {MAX_DOUBLINGS} doublings (eta = {left})"
            )));
        }
        left = left + left;
        g_left = g(left)?;
        doublings += 1;
    }
    loop {
        let mid = (left + right) * T::lit(0.5);
        let g_mid = g(mid)?;
        let width = (left - right).abs();
        if width < tol_eta && (g_mid - target).abs() <= residual_tol {
            return Ok(mid);
        }
        if !(mid > left && mid < right) {
            return Err(Error::NonConvergence(format!(
                "bracket collapsed at eta = {mid} with residual {}",
                (g_mid - target).abs()
            )));
        }
        if g_mid == target {
            return Ok(mid);
        }
        if g_mid > target {
            left = mid;
        } else {
            right = mid;
        }
    }
}
