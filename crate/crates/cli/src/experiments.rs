//! One function per subcommand. Grid points run on the rayon pool and rows
//! are emitted in grid order.

use std::fs::File;
use std::io::BufReader;

use owisac_core::fmcwsim::{channel_gains, monte_carlo_sensing_with, sense_sigma_from_snr_db, SensingOptions};
use owisac_core::{
    asymptotic_gap, build_capacity_curve, cdf_sup_distance, design_high_snr, design_low_snr, max_variance,
    nsp_from_sigma, solve_max_entropy, EnvelopeConstraints, EnvelopeConstraintsF64, PamConstellationF64,
};
use rayon::prelude::*;

use crate::config::{Config, ConstellationSpec};
use crate::error::CliError;
use crate::output::{Artifact, Cell, Table, Units};
use crate::plot::Plot;

/// Artifacts plus the counts for the one-line summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub points: usize,
    pub infeasible: usize,
}

fn units(cfg: &Config) -> Units {
    Units { bits: cfg.run.bits }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn check_orders(field: &str, orders: &[usize]) -> Result<(), CliError> {
    match orders.iter().find(|&&m| m < 2) {
        Some(m) => Err(CliError::Config(format!(
            "{field}: PAM order must be at least 2, got {m}"
        ))),
        None => Ok(()),
    }
}

fn resolve_constellations(
    cfg: &Config,
    field: &str,
    specs: &[ConstellationSpec],
    c: &EnvelopeConstraintsF64,
) -> Result<Vec<(String, PamConstellationF64)>, CliError> {
    if specs.is_empty() {
        return Err(CliError::Config(format!(
            "{field}: at least one constellation is required"
        )));
    }
    let tol = cfg.tol_eta()?;
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let at = format!("{field}[{i}]");
            let p = match spec {
                ConstellationSpec::LowSnr => design_low_snr(c).map_err(|e| CliError::at(at, e))?,
                ConstellationSpec::Pam { order } => {
                    check_orders(&at, &[*order])?;
                    design_high_snr(c, *order, tol)
                        .map_err(|e| CliError::at(format!("{at} ({order}-PAM)"), e))?
                        .constellation
                }
                ConstellationSpec::File { path } => {
                    let f = File::open(path)
                        .map_err(|e| CliError::Config(format!("{at}: cannot open {}: {e}", path.display())))?;
                    PamConstellationF64::read_csv(BufReader::new(f))
                        .map_err(|e| CliError::Config(format!("{at}: {}: {e}", path.display())))?
                }
            };
            Ok((spec.label(), p))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// maxent
// ---------------------------------------------------------------------------

pub fn maxent(cfg: &Config) -> Result<Outcome, CliError> {
    let u = units(cfg);
    let tol = cfg.tol_eta()?;
    let (a, b) = (cfg.constraints.a_min, cfg.constraints.b_peak);
    let sigmas = if cfg.maxent.sigma_h.is_empty() {
        vec![cfg.sigma_h()?]
    } else {
        cfg.maxent.sigma_h.clone()
    };

    let solved = sigmas
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let c = EnvelopeConstraints::new(a, b, s)
                .map_err(|e| CliError::Config(format!("maxent.sigma_h[{i}] = {s}: {e}")))?;
            if !c.is_feasible() {
                return Ok((c, None));
            }
            let d = solve_max_entropy(&c, tol).map_err(|e| CliError::at(format!("sigma_h = {s}"), e))?;
            Ok((c, Some(d)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut table = Table::new(
        ["sigma_h", "nsp", "case", "eta_star", "mu_star"]
            .into_iter()
            .map(String::from)
            .chain([u.column("entropy"), "harmonic_mean".into()]),
    );
    let grid = linspace(a, b, cfg.cdf.points.max(2));
    let mut pdf = Table::new(
        std::iter::once("x".to_string()).chain(
            solved
                .iter()
                .filter(|(_, d)| d.is_some())
                .map(|(c, _)| format!("pdf_sigma_{}", c.sigma_h())),
        ),
    );
    let mut plot = Plot::new("Max-entropy densities", "x", "f(x)");
    let mut infeasible = 0;
    for (c, d) in &solved {
        match d {
            None => {
                infeasible += 1;
                table.push(vec![
                    c.sigma_h().into(),
                    Cell::Empty,
                    "infeasible".into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]);
            }
            Some(d) => {
                table.push(vec![
                    c.sigma_h().into(),
                    nsp_from_sigma(c).ok().into(),
                    d.case().label().into(),
                    d.eta_star().into(),
                    d.mu_star().into(),
                    u.convert(d.entropy()).into(),
                    d.harmonic_mean().into(),
                ]);
                plot.add(
                    format!("ς = {}", c.sigma_h()),
                    grid.iter().map(|&x| (x, d.pdf(x))).collect(),
                );
            }
        }
    }
    for &x in &grid {
        let mut row = vec![Cell::from(x)];
        row.extend(
            solved
                .iter()
                .filter_map(|(_, d)| d.as_ref())
                .map(|d| Cell::from(d.pdf(x))),
        );
        pdf.push(row);
    }
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                stem: "maxent".into(),
                table,
                plots: Vec::new(),
            },
            Artifact {
                stem: "maxent_pdf".into(),
                table: pdf,
                plots: vec![("maxent_pdf".into(), plot)],
            },
        ],
        points: sigmas.len(),
        infeasible,
    })
}

// ---------------------------------------------------------------------------
// pam
// ---------------------------------------------------------------------------

pub fn pam(cfg: &Config) -> Result<Outcome, CliError> {
    let u = units(cfg);
    let c = cfg.constraints()?;
    let tol = cfg.tol_eta()?;
    check_orders("pam.orders", &cfg.pam.orders)?;
    if cfg.pam.orders.is_empty() && !cfg.pam.low_snr {
        return Err(CliError::Config(
            "pam: no designs requested (empty `orders` and `low_snr = false`)".into(),
        ));
    }

    let mut designs: Vec<(String, String, Option<f64>, PamConstellationF64)> = Vec::new();
    if cfg.pam.low_snr {
        let v = max_variance(&c).map_err(|e| CliError::at("low-SNR design", e))?;
        let p = design_low_snr(&c).map_err(|e| CliError::at("low-SNR design", e))?;
        designs.push(("2pam_low_snr".into(), v.case.label().into(), None, p));
    }
    let high = cfg
        .pam
        .orders
        .par_iter()
        .map(|&m| design_high_snr(&c, m, tol).map_err(|e| CliError::at(format!("pam order {m}"), e)))
        .collect::<Result<Vec<_>, CliError>>()?;
    for (m, d) in cfg.pam.orders.iter().zip(high) {
        let case = match d.case {
            owisac_core::DiscreteCase::ConstraintInactive => "constraint_inactive",
            owisac_core::DiscreteCase::TradeOff => "trade_off",
        };
        designs.push((format!("{m}pam"), case.into(), Some(d.eta_hat), d.constellation));
    }

    let mut summary = Table::new(
        ["constellation", "order", "case", "eta_hat"]
            .into_iter()
            .map(String::from)
            .chain([
                u.column("entropy"),
                "mean".into(),
                "variance".into(),
                "harmonic_mean".into(),
            ]),
    );
    let mut artifacts = Vec::new();
    for (label, case, eta, p) in &designs {
        summary.push(vec![
            label.as_str().into(),
            p.order().into(),
            case.as_str().into(),
            (*eta).into(),
            u.convert(p.entropy()).into(),
            p.mean().into(),
            p.variance().into(),
            p.harmonic_mean().into(),
        ]);
        let mut t = Table::new(["level", "probability"]);
        for (&x, &q) in p.levels().iter().zip(p.probs()) {
            t.push(vec![x.into(), q.into()]);
        }
        let mut plot = Plot::new(format!("{label} probabilities"), "level", "probability");
        plot.add(
            label.clone(),
            p.levels().iter().copied().zip(p.probs().iter().copied()).collect(),
        );
        artifacts.push(Artifact {
            stem: format!("pam_{label}"),
            table: t,
            plots: vec![(format!("pam_{label}"), plot)],
        });
    }
    artifacts.insert(
        0,
        Artifact {
            stem: "pam".into(),
            table: summary,
            plots: Vec::new(),
        },
    );
    Ok(Outcome {
        artifacts,
        points: designs.len(),
        infeasible: 0,
    })
}

// ---------------------------------------------------------------------------
// cdf
// ---------------------------------------------------------------------------

pub fn cdf(cfg: &Config) -> Result<Outcome, CliError> {
    let c = cfg.constraints()?;
    let tol = cfg.tol_eta()?;
    check_orders("cdf.orders", &cfg.cdf.orders)?;
    if cfg.cdf.points < 2 {
        return Err(CliError::Config(format!(
            "cdf.points: need at least 2, got {}",
            cfg.cdf.points
        )));
    }
    let law = solve_max_entropy(&c, tol).map_err(|e| CliError::at(format!("sigma_h = {}", c.sigma_h()), e))?;
    let designs = cfg
        .cdf
        .orders
        .par_iter()
        .map(|&m| design_high_snr(&c, m, tol).map_err(|e| CliError::at(format!("cdf order {m}"), e)))
        .collect::<Result<Vec<_>, CliError>>()?;

    let grid = linspace(c.a_min(), c.b_peak(), cfg.cdf.points);
    let mut table = Table::new(
        std::iter::once("x".to_string())
            .chain(std::iter::once("maxent".to_string()))
            .chain(cfg.cdf.orders.iter().map(|m| format!("{m}pam"))),
    );
    for &x in &grid {
        let mut row = vec![Cell::from(x), Cell::from(law.cdf(x))];
        row.extend(designs.iter().map(|d| Cell::from(d.constellation.cdf(x))));
        table.push(row);
    }
    let mut plot = Plot::new(format!("CDFs, ς = {}", c.sigma_h()), "x", "F(x)");
    plot.add("max-entropy", grid.iter().map(|&x| (x, law.cdf(x))).collect());
    for (m, d) in cfg.cdf.orders.iter().zip(&designs) {
        table.results.push((
            format!("sup_distance_{m}pam"),
            cdf_sup_distance(&d.constellation, &law).to_string(),
        ));
        plot.add(
            format!("{m}-PAM"),
            grid.iter().map(|&x| (x, d.constellation.cdf(x))).collect(),
        );
    }
    Ok(Outcome {
        artifacts: vec![Artifact {
            stem: "cdf".into(),
            table,
            plots: vec![("cdf".into(), plot)],
        }],
        points: grid.len(),
        infeasible: 0,
    })
}

// ---------------------------------------------------------------------------
// capacity-curve
// ---------------------------------------------------------------------------

pub fn capacity_curve(cfg: &Config) -> Result<Outcome, CliError> {
    let u = units(cfg);
    let c = cfg.constraints()?;
    let grid = cfg.capacity.snr_db.points("capacity.snr_db")?;
    let consts = resolve_constellations(cfg, "capacity.constellations", &cfg.capacity.constellations, &c)?;
    let curve = build_capacity_curve(&c, &grid, &consts)
        .map_err(|e| CliError::at(format!("capacity curve (sigma_h = {})", c.sigma_h()), e))?;

    let mut cols: Vec<String> = vec!["snr_db".into(), "noise_sigma".into()];
    for name in ["lower", "upper_low", "upper_high"] {
        cols.push(u.column(name));
    }
    cols.push("upper_high_fallback".into());
    cols.push(u.column("asymptote_low"));
    cols.push(u.column("asymptote_high"));
    cols.extend(
        curve
            .achievable
            .iter()
            .map(|(label, _)| u.column(&format!("rate_{label}"))),
    );
    let mut table = Table::new(cols);
    for i in 0..grid.len() {
        let mut row: Vec<Cell> = vec![
            curve.snr_db[i].into(),
            curve.noise_sigma[i].into(),
            u.convert(curve.lower[i]).into(),
            u.convert(curve.upper_low[i]).into(),
            u.convert(curve.upper_high[i]).into(),
            curve.upper_high_fallback[i].into(),
            u.convert(curve.asymptote_low[i]).into(),
            u.convert(curve.asymptote_high[i]).into(),
        ];
        row.extend(curve.achievable.iter().map(|(_, r)| Cell::from(u.convert(r[i]))));
        table.push(row);
    }
    table.results.push(("eta_star".into(), curve.eta_star.to_string()));

    let mut plot = Plot::new(
        format!("Capacity bounds, ς = {}", c.sigma_h()),
        "(B-A)/σ (dB)",
        format!("rate ({})", u.name()),
    );
    let line = |v: &[f64]| grid.iter().zip(v).map(|(&x, &y)| (x, u.convert(y))).collect::<Vec<_>>();
    plot.add("lower (EPI)", line(&curve.lower));
    plot.add("upper, low SNR", line(&curve.upper_low));
    plot.add("upper, high SNR", line(&curve.upper_high));
    for (label, r) in &curve.achievable {
        plot.add(label.clone(), line(r));
    }
    Ok(Outcome {
        artifacts: vec![Artifact {
            stem: "capacity_curve".into(),
            table,
            plots: vec![("capacity_curve".into(), plot)],
        }],
        points: grid.len(),
        infeasible: 0,
    })
}

// ---------------------------------------------------------------------------
// trade-offs
// ---------------------------------------------------------------------------

type GridPoint = (f64, f64, f64, Option<EnvelopeConstraintsF64>);

/// `(A, B, χ)` grid in curve-major order, with the per-point constraints or
/// `None` when `χ > 1` pushes the threshold below `1/B`.
fn tradeoff_grid(cfg: &Config) -> Result<Vec<GridPoint>, CliError> {
    if cfg.tradeoff.bounds.is_empty() {
        return Err(CliError::Config(
            "tradeoff.bounds: at least one [A, B] pair is required".into(),
        ));
    }
    let nsp = cfg.tradeoff.nsp.points("tradeoff.nsp")?;
    let mut out = Vec::new();
    for (i, &[a, b]) in cfg.tradeoff.bounds.iter().enumerate() {
        for &chi in &nsp {
            if chi < 0.0 {
                return Err(CliError::Config(format!(
                    "tradeoff.nsp: NSP must be non-negative, got {chi}"
                )));
            }
            let c = if chi > 1.0 {
                None
            } else {
                Some(
                    EnvelopeConstraints::from_nsp(a, b, chi)
                        .map_err(|e| CliError::Config(format!("tradeoff.bounds[{i}] = [{a}, {b}]: {e}")))?,
                )
            };
            out.push((a, b, chi, c));
        }
    }
    Ok(out)
}

fn group_plot(plot: &mut Plot, rows: &[(f64, f64, f64, Option<f64>)]) {
    let mut i = 0;
    while i < rows.len() {
        let (a, b) = (rows[i].0, rows[i].1);
        let pts: Vec<(f64, f64)> = rows[i..]
            .iter()
            .take_while(|r| r.0 == a && r.1 == b)
            .map(|r| (r.2, r.3.unwrap_or(f64::NAN)))
            .collect();
        i += pts.len();
        plot.add(format!("A = {a}, B = {b}"), pts);
    }
}

pub fn tradeoff_high(cfg: &Config) -> Result<Outcome, CliError> {
    let u = units(cfg);
    let tol = cfg.tol_eta()?;
    let grid = tradeoff_grid(cfg)?;
    let solved = grid
        .par_iter()
        .map(|&(a, b, chi, c)| {
            let Some(c) = c else { return Ok(None) };
            let d =
                solve_max_entropy(&c, tol).map_err(|e| CliError::at(format!("A = {a}, B = {b}, nsp = {chi}"), e))?;
            Ok(Some((c.sigma_h(), d.eta_star(), asymptotic_gap(&c, d.eta_star()))))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut table = Table::new(
        ["a_min", "b_peak", "ratio", "nsp", "sigma_h", "eta_star"]
            .into_iter()
            .map(String::from)
            .chain([u.column("gap")]),
    );
    let mut rows = Vec::new();
    for (&(a, b, chi, _), r) in grid.iter().zip(&solved) {
        let mut row: Vec<Cell> = vec![a.into(), b.into(), (a / b).into(), chi.into()];
        match r {
            Some((s, eta, gap)) => row.extend([Cell::from(*s), Cell::from(*eta), Cell::from(u.convert(*gap))]),
            None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        table.push(row);
        rows.push((a, b, chi, r.map(|(_, _, g)| u.convert(g))));
    }
    let mut plot = Plot::new(
        "Asymptotic gap versus NSP (high SNR)",
        "NSP χ",
        format!("gap ({})", u.name()),
    );
    group_plot(&mut plot, &rows);
    let infeasible = solved.iter().filter(|r| r.is_none()).count();
    Ok(Outcome {
        artifacts: vec![Artifact {
            stem: "tradeoff_high".into(),
            table,
            plots: vec![("tradeoff_high".into(), plot)],
        }],
        points: grid.len(),
        infeasible,
    })
}

pub fn tradeoff_low(cfg: &Config) -> Result<Outcome, CliError> {
    let grid = tradeoff_grid(cfg)?;
    let solved = grid
        .iter()
        .map(|&(a, b, chi, c)| {
            let Some(c) = c else { return Ok(None) };
            let v = max_variance(&c).map_err(|e| CliError::at(format!("A = {a}, B = {b}, nsp = {chi}"), e))?;
            Ok(Some((c.sigma_h(), v)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut table = Table::new([
        "a_min",
        "b_peak",
        "ratio",
        "nsp",
        "sigma_h",
        "variance",
        "variance_over_b2",
        "case",
    ]);
    let mut rows = Vec::new();
    for (&(a, b, chi, _), r) in grid.iter().zip(&solved) {
        let mut row: Vec<Cell> = vec![a.into(), b.into(), (a / b).into(), chi.into()];
        match r {
            Some((s, v)) => row.extend([
                Cell::from(*s),
                Cell::from(v.variance),
                Cell::from(v.variance / (b * b)),
                v.case.label().into(),
            ]),
            None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, "infeasible".into()]),
        }
        table.push(row);
        rows.push((a, b, chi, r.map(|(_, v)| v.variance / (b * b))));
    }
    let mut plot = Plot::new("Maximum variance versus NSP (low SNR)", "NSP χ", "σ_X² / B²");
    group_plot(&mut plot, &rows);
    let infeasible = solved.iter().filter(|r| r.is_none()).count();
    Ok(Outcome {
        artifacts: vec![Artifact {
            stem: "tradeoff_low".into(),
            table,
            plots: vec![("tradeoff_low".into(), plot)],
        }],
        points: grid.len(),
        infeasible,
    })
}

// ---------------------------------------------------------------------------
// sensing
// ---------------------------------------------------------------------------

/// Which metric the sensing plot shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensingMetric {
    Mse,
    Rmse,
}

pub fn simulate(cfg: &Config, metric: SensingMetric) -> Result<Outcome, CliError> {
    let c = cfg.constraints()?;
    let fmcw = cfg.fmcw()?;
    let scenario = cfg.scenario()?;
    let trials = cfg.trials()?;
    let grid = cfg.sensing.snr_db.points("sensing.snr_db")?;
    let consts = resolve_constellations(cfg, "sensing.constellations", &cfg.sensing.constellations, &c)?;
    let (_, hs) = channel_gains(&scenario).map_err(|e| CliError::at("scenario", e))?;
    let opts = SensingOptions {
        estimator: cfg.estimator(),
        windows: None,
    };

    let mut table = Table::new([
        "snr_db",
        "constellation",
        "trials",
        "mse_beat",
        "rmse_range_m",
        "rmse_velocity_mps",
        "seed",
    ]);
    let (title, y_label, stem) = match metric {
        SensingMetric::Mse => ("Beat-recovery MSE", "MSE", "sensing_mse"),
        SensingMetric::Rmse => ("Range RMSE", "RMSE (m)", "sensing_rmse"),
    };
    let mut plot = Plot::new(title, "h_s/σ_s (dB)", y_label).log_y();
    let mut velocity = Plot::new("Velocity RMSE", "h_s/σ_s (dB)", "RMSE (m/s)").log_y();
    for (label, p) in &consts {
        let mut pts = Vec::new();
        let mut vpts = Vec::new();
        for &db in &grid {
            let noise = cfg.noise(sense_sigma_from_snr_db(hs, db))?;
            let r = monte_carlo_sensing_with(p, &scenario, &fmcw, &noise, trials, &opts)
                .map_err(|e| CliError::at(format!("{label} at {db} dB"), e))?;
            table.push(vec![
                db.into(),
                label.as_str().into(),
                r.trials.into(),
                r.mse_beat.into(),
                r.rmse_range_m.into(),
                r.rmse_velocity_mps.into(),
                noise.seed.into(),
            ]);
            pts.push((
                db,
                if metric == SensingMetric::Mse {
                    r.mse_beat
                } else {
                    r.rmse_range_m
                },
            ));
            vpts.push((db, r.rmse_velocity_mps));
        }
        plot.add(label.clone(), pts);
        velocity.add(label.clone(), vpts);
    }
    table.results.push(("h_s".into(), hs.to_string()));
    let mut plots = vec![(stem.to_string(), plot)];
    if metric == SensingMetric::Rmse {
        plots.push(("sensing_rmse_velocity".into(), velocity));
    }
    let artifacts = vec![Artifact {
        stem: stem.into(),
        table,
        plots,
    }];
    Ok(Outcome {
        artifacts,
        points: grid.len() * consts.len(),
        infeasible: 0,
    })
}
