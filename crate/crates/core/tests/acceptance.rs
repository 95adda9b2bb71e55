//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release -p owisac-core --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use common::brute_force_max_variance;
use owisac_core::capacity::max_variance;
use owisac_core::fmcwsim::*;
use owisac_core::specialfn::gh_auxiliary;
use owisac_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const A: f64 = 0.1;
const B: f64 = 1.0;
const FIGURE_SIGMAS: [f64; 2] = [1.156, 2.406];

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, title: &str, elapsed: Duration, o: &Outcome) -> bool {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {id} [{tag}] {title} ({:.2} s): {}",
        elapsed.as_secs_f64(),
        o.detail
    );
    o.pass
}

fn cons(s: f64) -> EnvelopeConstraintsF64 {
    EnvelopeConstraints::new(A, B, s).unwrap()
}

/// High-SNR squeeze at 40 dB.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for s in FIGURE_SIGMAS {
        let c = cons(s);
        let d = solve_max_entropy(&c, 1e-10).unwrap();
        let sigma = noise_sigma_from_snr_db(c.width(), 40.0);
        let asym = high_snr_asymptote(&c, d.eta_star(), sigma);
        let lb = d.capacity_lower_bound(sigma);
        let ub = high_snr_upper_bound(&c, &high_snr_hyperparams(&c, d.eta_star(), sigma), sigma).unwrap();
        let (gl, gu) = ((lb - asym).abs(), (ub - asym).abs());
        pass &= gl < 0.02 && gu < 0.05;
        detail.push(format!("ς={s}: |lb-asym|={gl:.2e}, |ub-asym|={gu:.2e}"));
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(1);
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

/// 2-PAM at low SNR against the low-SNR upper bound.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for s in FIGURE_SIGMAS {
        let c = cons(s);
        let p = design_low_snr(&c).unwrap();
        let v = max_variance(&c).unwrap();
        for db in [-5.0, 0.0, 5.0] {
            let sigma = noise_sigma_from_snr_db(c.width(), db);
            let ratio = mutual_information_discrete(&p, sigma).unwrap() / low_snr_upper_bound(&v, sigma);
            pass &= ratio >= 0.98;
            detail.push(format!("ς={s} {db:+} dB: {ratio:.4}"));
        }
    }
    pass &= start.elapsed() < Duration::from_secs(10);
    Outcome {
        pass,
        detail: format!("MI/UB ratios {}", detail.join(", ")),
    }
}

/// Conventional OWC gap.
fn criterion_3() -> Outcome {
    let c = cons(3.0);
    let d = solve_max_entropy(&c, 1e-10).unwrap();
    let gap = asymptotic_gap(&c, d.eta_star());
    let want = -0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    let err = (gap - want).abs();
    Outcome {
        pass: d.eta_star() == 0.0 && err <= 1e-12,
        detail: format!("gap={gap:.15}, error={err:.1e}"),
    }
}

/// Trade-off curves depend on A/B only.
fn criterion_4() -> Outcome {
    let grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let high_a = tradeoff_high(0.1, 1.0, &grid).unwrap();
    let high_b = tradeoff_high(0.05, 0.5, &grid).unwrap();
    let low_a = tradeoff_low(0.1, 1.0, &grid).unwrap();
    let low_b = tradeoff_low(0.05, 0.5, &grid).unwrap();
    let gap_err = high_a
        .iter()
        .zip(&high_b)
        .map(|(x, y)| (x.gap - y.gap).abs())
        .fold(0.0, f64::max);
    // Variance scales with B², so compare σ_X²/B².
    let var_err = low_a
        .iter()
        .zip(&low_b)
        .map(|(x, y)| (x.variance / 1.0 - y.variance / 0.25).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: gap_err < 1e-9 && var_err < 1e-9,
        detail: format!("max gap diff {gap_err:.1e}, max σ²/B² diff {var_err:.1e}"),
    }
}

/// Closed-form max variance against a brute-force two-point grid.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut dominated = true;
    for _ in 0..50 {
        let a = rng.random_range(0.02..0.6);
        let b = rng.random_range(a + 0.05..=1.0f64).min(1.0);
        let hi = 0.5 * (1.0 / a + 1.0 / b) * 1.2;
        let s = rng.random_range(1.0 / b * 1.001..hi);
        let v = max_variance(&EnvelopeConstraints::new(a, b, s).unwrap()).unwrap();
        let brute = brute_force_max_variance(a, b, s, 300, 200);
        dominated &= brute <= v.variance * (1.0 + 1e-12);
        worst = worst.max((brute - v.variance).abs() / v.variance);
    }
    let t = start.elapsed();
    Outcome {
        pass: dominated && worst < 1e-3 && t < Duration::from_secs(30),
        detail: format!("worst relative gap {worst:.2e}, grid never exceeds closed form: {dominated}"),
    }
}

/// 64-PAM vs continuous CDF.
fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for s in FIGURE_SIGMAS {
        let c = cons(s);
        let law = solve_max_entropy(&c, 1e-10).unwrap();
        let dist = |m| cdf_sup_distance(&design_high_snr(&c, m, 1e-12).unwrap().constellation, &law);
        let (d8, d64) = (dist(8), dist(64));
        pass &= d64 < 0.02 && d64 < d8;
        detail.push(format!("ς={s}: d64={d64:.4}, d8={d8:.4}"));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

/// Noise amplification law in the beat-recovery MSE.
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let s = TargetScenario::default();
    let cfg = FmcwConfig::default();
    let (_, hs) = channel_gains(&s).unwrap();
    let sigma = sense_sigma_from_snr_db(hs, 40.0);
    let c = cons(2.0);
    let constellations = [
        ("2-PAM", design_low_snr(&c).unwrap()),
        ("8-PAM", design_high_snr(&c, 8, 1e-12).unwrap().constellation),
        ("16-PAM", design_high_snr(&c, 16, 1e-12).unwrap().constellation),
    ];
    let mut law_ok = true;
    let mut mse = Vec::new();
    let mut detail = Vec::new();
    let mut genie = Vec::new();
    for (k, (label, p)) in constellations.iter().enumerate() {
        let noise = NoiseSpec {
            sigma_comm: 0.0,
            sigma_sense: sigma,
            seed: 70 + k as u64,
        };
        let theory = normalized_noise_variance(p, sigma, hs);
        let r = monte_carlo_sensing(p, &s, &cfg, &noise, 1000).unwrap();
        let ratio = r.mse_beat / theory;
        law_ok &= (ratio - 1.0).abs() <= 0.05;
        mse.push(r.mse_beat);
        detail.push(format!("{label} {ratio:.3}"));
        let opts = SensingOptions {
            estimator: EnvelopeEstimator::Ideal,
            windows: None,
        };
        let g = monte_carlo_sensing_with(p, &s, &cfg, &noise, 1000, &opts).unwrap();
        genie.push(format!("{label} {:.3}", g.mse_beat / theory));
    }
    let lo = mse.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = mse.iter().cloned().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    let t = start.elapsed();
    println!(
        "    diagnostic: MSE/theory with the true envelope in the division: {}",
        genie.join(", ")
    );
    Outcome {
        pass: law_ok && spread <= 0.05 && t < Duration::from_secs(120),
        detail: format!(
            "MSE/theory with x̂=|z|²/h_s²: {}; MSE spread across constellations {spread:.3}",
            detail.join(", ")
        ),
    }
}

/// Millimetre ranging at high SNR with 1000-sample windows.
fn criterion_8() -> Outcome {
    let s = TargetScenario::default();
    let cfg = FmcwConfig::default();
    let (_, hs) = channel_gains(&s).unwrap();
    let p = design_high_snr(&cons(1.6), 8, 1e-12).unwrap().constellation;
    let opts = SensingOptions {
        estimator: EnvelopeEstimator::Instantaneous,
        windows: Some((SampleWindow::new(0, 1000), SampleWindow::new(1000, 2000))),
    };
    let mut rmse = Vec::new();
    for db in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let noise = NoiseSpec {
            sigma_comm: 0.0,
            sigma_sense: sense_sigma_from_snr_db(hs, db),
            seed: 80,
        };
        rmse.push((
            db,
            monte_carlo_sensing_with(&p, &s, &cfg, &noise, 300, &opts)
                .unwrap()
                .rmse_range_m,
        ));
    }
    let noiseless = NoiseSpec {
        sigma_comm: 0.0,
        sigma_sense: 0.0,
        seed: 80,
    };
    let floor = monte_carlo_sensing_with(&p, &s, &cfg, &noiseless, 1, &opts)
        .unwrap()
        .rmse_range_m;
    let monotone = rmse.windows(2).all(|w| w[1].1 <= w[0].1) && floor <= rmse.last().unwrap().1;
    let best = rmse.last().unwrap().1;
    let curve: Vec<String> = rmse
        .iter()
        .map(|(db, r)| format!("{db} dB {:.2} mm", r * 1e3))
        .collect();
    Outcome {
        pass: best < 5e-3 && floor < 5e-3 && monotone,
        detail: format!(
            "range RMSE {}, noiseless {:.3} mm, monotone {monotone}",
            curve.join(", "),
            floor * 1e3
        ),
    }
}

/// Solver property suite.
fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut gh_ok = true;
    let mut worst_residual: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    let mut sandwich_ok = true;
    for _ in 0..200 {
        let a = rng.random_range(0.01..0.9);
        let b = a + rng.random_range(0.01..1.5);
        let eta = -rng.random_range(0.0..100.0f64);
        let g = gh_auxiliary(a, b, eta).unwrap();
        let g2 = gh_auxiliary(a, b, eta - 0.5).unwrap();
        let lo = (b - a) / (b.ln() - a.ln());
        gh_ok &= g >= lo * (1.0 - 1e-12) && g < b && g2 >= g;
    }
    gh_ok &= (gh_auxiliary(0.1, 1.0, 0.0).unwrap() - 0.9 / 10f64.ln()).abs() < 1e-15;
    gh_ok &= (1.0 - gh_auxiliary(0.1, 1.0, -1e4).unwrap()) < 1e-3;
    for _ in 0..100 {
        let a = rng.random_range(0.02..0.8);
        let b: f64 = (a + rng.random_range(0.05..1.0f64)).min(1.0);
        if b - a < 0.02 {
            continue;
        }
        let c = EnvelopeConstraints::from_nsp(a, b, rng.random_range(0.0..0.95)).unwrap();
        let d = solve_max_entropy(&c, 1e-10).unwrap();
        if d.case() == CaseClassification::TradeOff {
            worst_residual = worst_residual.max((gh_auxiliary(a, b, d.eta_star()).unwrap() - 1.0 / c.sigma_h()).abs());
        }
        worst_mass = worst_mass.max((common::simpson(&|x| d.pdf(x), a, b, 1e-12) - 1.0).abs());
        let m = rng.random_range(2..32);
        let pmf: f64 = design_high_snr(&c, m, 1e-12)
            .unwrap()
            .constellation
            .probs()
            .iter()
            .sum();
        worst_mass = worst_mass.max((pmf - 1.0).abs());
    }
    let grid: Vec<f64> = (-20..=60).step_by(2).map(f64::from).collect();
    for chi in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98] {
        let c = EnvelopeConstraints::from_nsp(A, B, chi).unwrap();
        match build_capacity_curve(&c, &grid, &[]) {
            Ok(curve) => {
                for i in 0..grid.len() {
                    sandwich_ok &= curve.lower[i] <= curve.upper_low[i].min(curve.upper_high[i]) + 1e-9;
                }
            }
            Err(_) => sandwich_ok = false,
        }
    }
    Outcome {
        pass: gh_ok && worst_residual <= 1e-8 && worst_mass <= 1e-8 && sandwich_ok,
        detail: format!(
            "g_h bounds/monotone {gh_ok}, worst bisection residual {worst_residual:.1e}, worst normalization error {worst_mass:.1e}, sandwich {sandwich_ok}"
        ),
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let suite = Instant::now();
    let criteria: [Criterion; 9] = [
        (1, "high-SNR squeeze at 40 dB", criterion_1),
        (2, "low-SNR optimality of 2-PAM", criterion_2),
        (3, "conventional OWC gap", criterion_3),
        (4, "A/B scale invariance", criterion_4),
        (5, "max-variance brute-force oracle", criterion_5),
        (6, "64-PAM CDF consistency", criterion_6),
        (7, "noise-amplification law", criterion_7),
        (8, "millimetre ranging at high SNR", criterion_8),
        (9, "solver property suite", criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, title, run) in criteria {
        let t = Instant::now();
        let o = run();
        if !report(id, title, t.elapsed(), &o) {
            failed.push(id);
        }
    }
    let total = suite.elapsed();
    println!(
        "acceptance suite finished in {:.1} s (budget 300 s)",
        total.as_secs_f64()
    );
    assert!(total < Duration::from_secs(300));
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
