//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4096;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error_estimate: T,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Segment<T> {
    let half = (hi - lo) * T::lit(0.5);
    let center = lo + half;
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `abs_tol`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol` or the interval budget is exhausted.
pub fn integrate<T, F>(f: F, lo: T, hi: T, abs_tol: T) -> Result<Quadrature<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(hi > lo) {
        return Ok(Quadrature {
            value: T::zero(),
            error_estimate: T::zero(),
            intervals: 0,
        });
    }
    let mut segments = vec![kronrod(&f, lo, hi)];
    loop {
        let total_err: T = segments.iter().map(|s| s.error).sum();
        if total_err <= abs_tol {
            break;
        }
        if segments.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergence(format!(
                "quadrature on [{lo}, {hi}] stalled at error {total_err}"
            )));
        }
        let (worst, _) =
            segments.iter().enumerate().fold(
                (0, T::neg_infinity()),
                |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc },
            );
        let s = segments.swap_remove(worst);
        let mid = s.lo + (s.hi - s.lo) * T::lit(0.5);
        if !(mid > s.lo && mid < s.hi) {
            // Interval cannot be split further; accept it as is.
            segments.push(Segment { error: T::zero(), ..s });
            continue;
        }
        segments.push(kronrod(&f, s.lo, mid));
        segments.push(kronrod(&f, mid, s.hi));
    }
    // Sum in position order so the result does not depend on split history.
    segments.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
    Ok(Quadrature {
        value: segments.iter().map(|s| s.value).sum(),
        error_estimate: segments.iter().map(|s| s.error).sum(),
        intervals: segments.len(),
    })
}
