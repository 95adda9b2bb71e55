//! Reference implementations kept independent of the library internals.

#![allow(dead_code)]

/// Adaptive Simpson. `tol` is relative to a coarse estimate of `∫|f|`,
/// never below the smallest normal.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    // Pre-split so narrow features near an endpoint are not skipped.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    let scale = (0..=pieces).map(|i| f(a + i as f64 * h).abs()).sum::<f64>() * h;
    let tol = (tol * scale).max(f64::MIN_POSITIVE);
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (
                a + i as f64 * h,
                if i + 1 == pieces { b } else { a + (i + 1) as f64 * h },
            );
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let w = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            step(f, lo, hi, flo, fmid, fhi, w, tol / pieces as f64, 20)
        })
        .sum()
}

/// `∫_a^b e^{η/x} dx` by quadrature.
pub fn ih_oracle(a: f64, b: f64, eta: f64) -> f64 {
    simpson(&|x: f64| (eta / x).exp(), a, b, 1e-13)
}

/// `∫_a^b e^{η/x}/x dx` by quadrature.
pub fn harmonic_moment_oracle(a: f64, b: f64, eta: f64) -> f64 {
    simpson(&|x: f64| (eta / x).exp() / x, a, b, 1e-13)
}

/// `g_h` from two quadratures.
pub fn gh_oracle(a: f64, b: f64, eta: f64) -> f64 {
    ih_oracle(a, b, eta) / harmonic_moment_oracle(a, b, eta)
}

/// Grid search over two-point laws `{x1, x2}` with `p ∈ [0, cap]`.
pub fn brute_force_max_variance(a: f64, b: f64, s: f64, n: usize, np: usize) -> f64 {
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let mut best = 0.0f64;
    for (i, &x1) in grid.iter().enumerate() {
        for &x2 in &grid[i + 1..] {
            if 1.0 / x2 > s {
                continue;
            }
            let cap = ((s - 1.0 / x2) / (1.0 / x1 - 1.0 / x2)).min(1.0);
            let eval = |p: f64| p * (1.0 - p) * (x2 - x1).powi(2);
            best = best.max(eval(cap));
            for k in 0..=np {
                let p = cap * k as f64 / np as f64;
                best = best.max(eval(p));
            }
        }
    }
    best
}
