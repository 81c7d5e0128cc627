use orbital_heat::graph::{
    absorbed_ray_return, build_star, decay_fit, discretise, doubling_constant, orbit_points, poincare_random,
    poincare_sup, quasi_isometry, sobolev_report, spectral_sweep, walk_depth, walk_kernel, Component, GfModel,
    RadialModel, WeightedGraph, DEPTHS,
};
use orbital_heat::heat::{
    chopped_integrals, gaussian_tail_check, injectivity_lower_bound, log_limit_estimate, sandwich_grid,
    stieltjes_check, upper_bound_table, CountingBound,
};
use orbital_heat::orbits::{enumerate_ball, load_group, EnumerationConfig, GroupPresentation, OrbitBall};
use orbital_heat::PointH3;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Analysis, Check, Command, Gf, Model, Options};
use crate::error::CliError;
use crate::output::Table;

pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    /// Extra files as `(suffix, contents)`.
    pub extra: Vec<(String, String)>,
    pub pass: bool,
}

impl Outcome {
    fn new(result: Value, table: Option<Table>, pass: bool) -> Self {
        Self { result, table, extra: Vec::new(), pass }
    }
}

pub fn run(command: &Command, o: &Options) -> Result<Outcome, CliError> {
    match command {
        Command::Count => count(o),
        Command::Verify { check } => verify(*check, o),
        Command::Graph { model, analysis } => graph(*model, *analysis, o),
        Command::Discretise => discretise_orbit(o),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Input(format!("--{name} must be positive and finite (got {v})")))
    }
}

fn group_ball(o: &Options, default_radius: f64) -> Result<(GroupPresentation, OrbitBall), CliError> {
    let group = load_group(&o.group)?;
    let radius = o.radius.unwrap_or(default_radius);
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(CliError::Input(format!("--radius must be nonnegative (got {radius})")));
    }
    let j = PointH3::basepoint();
    let config = EnumerationConfig { cap: o.cap, keep_words: false };
    let ball = enumerate_ball(&group, &j, &j, radius, &config)?;
    ball.require_complete()?;
    Ok((group, ball))
}

fn counting_bound(group: &GroupPresentation, radius: f64) -> Result<CountingBound, CliError> {
    let j = PointH3::basepoint();
    let inj = injectivity_lower_bound(group, &j, radius.clamp(1.0, 10.0))?;
    Ok(CountingBound::new(group, &j, &j, inj)?)
}

#[derive(Serialize)]
struct CountRow {
    rho_jump: f64,
    count: usize,
    averaged: f64,
}

fn count(o: &Options) -> Result<Outcome, CliError> {
    let (_, ball) = group_ball(o, 10.0)?;
    let rows: Vec<CountRow> = ball
        .distances
        .iter()
        .enumerate()
        .map(|(i, &d)| CountRow { rho_jump: d, count: i + 1, averaged: (i + 1) as f64 * (-2.0 * d).exp() })
        .collect();
    let exponent = ball.critical_exponent_estimate().ok();
    let rough = ball.rough_decrease_report(0.25 * ball.radius).ok();
    let result = json!({
        "radius": ball.radius,
        "elements": ball.len(),
        "complete": ball.complete,
        "critical_exponent": exponent.map(|e| json!({"value": e.value, "band": e.band, "rms": e.rms, "window": e.window})),
        "rough_decrease": rough.map(|r| json!({"ratio": r.ratio, "rho1": r.rho1, "rho2": r.rho2})),
    });
    Ok(Outcome::new(result, Some(Table::from_rows(&rows)?), true))
}

fn times(o: &Options, default: &str) -> Vec<f64> {
    o.time_grid.unwrap_or_else(|| default.parse().expect("valid default grid")).points()
}

#[derive(Serialize)]
struct RatioRow {
    rho: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct KernelRow {
    t: f64,
    p_gamma: f64,
    tail_bound: f64,
}

fn verify(check: Check, o: &Options) -> Result<Outcome, CliError> {
    match check {
        Check::Stieltjes => {
            let (_, ball) = group_ball(o, 10.0)?;
            let mut reports = Vec::new();
            for t in times(o, "1:4:4") {
                let r = stieltjes_check(&ball, positive("time-grid", t)?)?;
                reports.push(json!({"t": t, "stieltjes": r.stieltjes, "direct": r.direct, "residual": r.residual}));
            }
            let worst = reports.iter().map(|r| r["residual"].as_f64().unwrap_or(f64::NAN)).fold(0.0, f64::max);
            let pass = worst <= 1e-10;
            Ok(Outcome::new(json!({"rows": reports, "max_residual": worst, "tolerance": 1e-10}), None, pass))
        }
        Check::UpperBound => {
            let (group, ball) = group_ball(o, 10.0)?;
            let bound = counting_bound(&group, ball.radius)?;
            let hi = ball.radius.min(10.0);
            let rhos: Vec<f64> = (0..).map(|i| 4.0 + 0.25 * i as f64).take_while(|&r| r <= hi + 1e-12).collect();
            if rhos.is_empty() {
                return Err(CliError::Input("upper-bound needs --radius >= 4".into()));
            }
            let rows = upper_bound_table(&ball, &bound, &rhos)?;
            let sup = rows.last().map_or(0.0, |r| r.running_sup);
            let worst_tail = rows.iter().map(|r| r.kernel.tail_ratio()).fold(0.0, f64::max);
            let table: Vec<RatioRow> = rows.iter().map(|r| RatioRow { rho: r.rho, ratio: r.ratio }).collect();
            let pass = sup.is_finite();
            Ok(Outcome::new(
                json!({"rows": rows, "running_sup": sup, "max_tail_ratio": worst_tail}),
                Some(Table::from_rows(&table)?),
                pass,
            ))
        }
        Check::Sandwich => {
            let g = o.time_grid.unwrap_or_else(|| "2:200:100".parse().expect("valid default grid"));
            let r = sandwich_grid(g.a, g.b, g.n, 256)?;
            let pass = r.all_positive && r.c1.is_finite() && r.c2.is_finite();
            Ok(Outcome::new(serde_json::to_value(r)?, None, pass))
        }
        Check::Chop => {
            let ks = if o.k.is_empty() { vec![2.0, 4.0] } else { o.k.clone() };
            let alphas = if o.alpha.is_empty() { vec![0.0, 0.5, 1.5] } else { o.alpha.clone() };
            let ts = match o.time_grid {
                Some(g) => g.points(),
                None => (0..=12).map(|i| 10f64.powf(1.0 + 0.25 * i as f64)).collect(),
            };
            let mut rows = Vec::new();
            let mut skipped = Vec::new();
            for &alpha in &alphas {
                for &k in &ks {
                    for &t in &ts {
                        if k > t.sqrt() {
                            skipped.push(json!({"alpha": alpha, "k": k, "t": t}));
                            continue;
                        }
                        let c = chopped_integrals(&|_rho: f64| t.powf(-alpha), t, k, alpha)?;
                        rows.push(json!({"alpha": alpha, "chopped": c}));
                    }
                }
            }
            let max_of =
                |key: &str| rows.iter().map(|r| r["chopped"][key].as_f64().unwrap_or(f64::NAN)).fold(0.0, f64::max);
            let (r1, r3) = (max_of("r1"), max_of("r3"));
            let pass = r1.is_finite() && r3.is_finite() && !rows.is_empty();
            Ok(Outcome::new(json!({"rows": rows, "skipped": skipped, "max_r1": r1, "max_r3": r3}), None, pass))
        }
        Check::GaussianTail => {
            let ks = if o.k.is_empty() { vec![0.5, 1.0, 2.0, 4.0, 8.0] } else { o.k.clone() };
            let rows = ks.iter().map(|&k| gaussian_tail_check(k)).collect::<Result<Vec<_>, _>>()?;
            let pass = rows.iter().all(|r| r.pass);
            Ok(Outcome::new(json!({"rows": rows}), None, pass))
        }
        Check::LogLimit => {
            let (group, ball) = group_ball(o, 24.0)?;
            let bound = counting_bound(&group, ball.radius)?;
            let ts = times(o, "8:16:17");
            let est = log_limit_estimate(&ball, &bound, &ts)?;
            let table: Vec<KernelRow> =
                est.kernels.iter().map(|k| KernelRow { t: k.t, p_gamma: k.value, tail_bound: k.tail_bound }).collect();
            Ok(Outcome::new(serde_json::to_value(&est)?, Some(Table::from_rows(&table)?), est.slope.is_finite()))
        }
    }
}

fn gf_model(gf: Gf) -> GfModel {
    match gf {
        Gf::BinaryTree => GfModel::BinaryTree,
        Gf::WeightedRay => GfModel::WeightedRay,
    }
}

/// Depth of GF components in explicit graphs, where trees grow exponentially.
const EXPLICIT_GF_DEPTH: usize = 10;

#[derive(Serialize)]
struct SeriesRow {
    n: u64,
    p_n: f64,
}

#[derive(Serialize)]
struct SobolevCsv {
    radius: usize,
    bump: f64,
    random: f64,
}

#[derive(Serialize)]
struct DoublingRow {
    r: usize,
    ratio: f64,
}

#[derive(Serialize)]
struct VolumeRow {
    r: usize,
    volume: f64,
}

#[derive(Serialize)]
struct SpectrumRow {
    depth: usize,
    raw: f64,
    extrapolated: f64,
}

fn graph(model: Model, analysis: Analysis, o: &Options) -> Result<Outcome, CliError> {
    if model == Model::Absorbed && analysis != Analysis::Decay {
        return Err(CliError::Input("the absorbed model only supports `decay`".into()));
    }
    let d = o.d.unwrap_or(match model {
        Model::Star => 3,
        _ => 1,
    });
    let p = o.p.unwrap_or(1);
    let gf_depth = o.depth.unwrap_or(40);
    let gf = gf_model(o.gf);
    if d == 0 {
        return Err(CliError::Input("--d must be at least 1".into()));
    }
    let explicit = |depth: usize| -> Result<WeightedGraph, CliError> {
        Ok(match model {
            Model::Star => build_star(d, depth)?,
            _ => RadialModel::mixed(d, p, depth, gf, gf_depth.min(EXPLICIT_GF_DEPTH))?.explicit()?,
        })
    };
    match analysis {
        Analysis::Decay => {
            let n = o.n.map_or(1 << 14, |n| n.0);
            let (series, window) = match model {
                Model::Absorbed => (absorbed_ray_return(n)?.returns, (64, n as u64)),
                _ => {
                    let g = match model {
                        Model::Star => build_star(d, walk_depth(n))?,
                        _ => RadialModel::mixed(d, p, walk_depth(n), gf, gf_depth)?.lumped()?,
                    };
                    let s = walk_kernel(&g, 0, 0, n)?;
                    if s.warning {
                        eprintln!("warning: walk mass {:e} reached the truncation frontier", s.frontier_mass);
                    }
                    (s.values, (256, n as u64))
                }
            };
            let fit = decay_fit(&series, window)?;
            let rows: Vec<SeriesRow> = series.iter().map(|&(n, p_n)| SeriesRow { n, p_n }).collect();
            let result = json!({
                "alpha": fit.alpha,
                "intercept": fit.intercept,
                "rms": fit.rms,
                "window": [fit.window.0, fit.window.1],
                "points": fit.points,
            });
            Ok(Outcome::new(result, Some(Table::from_rows(&rows)?), true))
        }
        Analysis::Poincare => {
            let r = o.r.unwrap_or(16);
            let g = explicit(2 * r + 1)?;
            let rep = poincare_sup(&g, 0, r)?;
            let trials = o.trials.unwrap_or(1000);
            let random = poincare_random(&g, 0, r, trials, o.seed);
            let bound = (model == Model::Star).then(|| 2.0 * (d as f64).powi(3));
            let pass = random <= rep.value && bound.is_none_or(|b| rep.value <= b);
            let result = json!({"value": rep.value, "r": r, "support": rep.support, "random_max": random,
                "trials": trials, "bound": bound});
            Ok(Outcome::new(result, None, pass))
        }
        Analysis::Sobolev => {
            let r_max = o.r.unwrap_or(64).max(1);
            let radii: Vec<usize> = (0..).map(|j| 1usize << j).take_while(|&s| s <= r_max).collect();
            let g = explicit(2 * r_max + 2)?;
            let rep = sobolev_report(&g, 0, 2.0, 6.0, &radii, o.trials.unwrap_or(16), o.seed)?;
            let rows: Vec<SobolevCsv> =
                rep.rows.iter().map(|r| SobolevCsv { radius: r.radius, bump: r.bump, random: r.random }).collect();
            Ok(Outcome::new(serde_json::to_value(&rep)?, Some(Table::from_rows(&rows)?), rep.sup.is_finite()))
        }
        Analysis::Doubling => {
            let r_max = o.r.unwrap_or(64).max(1);
            let g = match model {
                Model::Star => build_star(d, 2 * r_max)?,
                _ => RadialModel::mixed(d, p, 2 * r_max, gf, gf_depth)?.lumped()?,
            };
            let vols = g.ball_measures(0, 2 * r_max);
            let rows: Vec<DoublingRow> = (1..=r_max).map(|r| DoublingRow { r, ratio: vols[2 * r] / vols[r] }).collect();
            let c = doubling_constant(&g, 0, r_max);
            Ok(Outcome::new(json!({"doubling_constant": c, "r_max": r_max}), Some(Table::from_rows(&rows)?), true))
        }
        Analysis::Spectrum => {
            let c = match model {
                Model::Star => Component::UnitRay,
                _ => gf.component(),
            };
            let sweep = spectral_sweep(c, &DEPTHS)?;
            let rows: Vec<SpectrumRow> = sweep
                .depths
                .iter()
                .zip(sweep.raw.iter().zip(&sweep.extrapolated))
                .map(|(&depth, (&raw, &extrapolated))| SpectrumRow { depth, raw, extrapolated })
                .collect();
            let pass = match model {
                Model::Star => true,
                _ => sweep.extrapolated.iter().all(|&x| x > 0.0) && sweep.spread() < 0.1,
            };
            let mut v = serde_json::to_value(&sweep)?;
            v["spread"] = json!(sweep.spread());
            Ok(Outcome::new(v, Some(Table::from_rows(&rows)?), pass))
        }
        Analysis::Volume => {
            let r_max = o.r.unwrap_or(64).max(1);
            let g = match model {
                Model::Star => build_star(d, r_max)?,
                _ => RadialModel::mixed(d, p, r_max, gf, gf_depth)?.lumped()?,
            };
            let vols = g.ball_measures(0, r_max);
            let rows: Vec<VolumeRow> = vols.iter().enumerate().map(|(r, &volume)| VolumeRow { r, volume }).collect();
            let (result, pass) = match model {
                Model::Star => {
                    let ok = (1..=r_max).all(|r| vols[r] >= r as f64 && vols[r] <= (d * r + 1) as f64);
                    (json!({"law": "r <= vol <= d r + 1", "holds": ok}), ok)
                }
                _ => {
                    // only the degenerate rays: GF components add mass near the root
                    let rays = RadialModel::mixed(d, 0, r_max, gf, 1)?.lumped()?.ball_measures(0, r_max);
                    let scaled: Vec<f64> = (3..=r_max).map(|r| rays[r] / (d as f64 * (r as f64).powi(3))).collect();
                    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = scaled.iter().copied().fold(0.0, f64::max);
                    let ok = scaled.is_empty() || (lo >= 0.25 && hi <= 3.0);
                    (
                        json!({"law": "r^3/4 <= vol/d <= 3 r^3 on the rays, r >= 3", "min_ratio": lo, "max_ratio": hi, "holds": ok}),
                        ok,
                    )
                }
            };
            Ok(Outcome::new(result, Some(Table::from_rows(&rows)?), pass))
        }
    }
}

fn discretise_orbit(o: &Options) -> Result<Outcome, CliError> {
    let (_, ball) = group_ball(o, 8.0)?;
    let eps = positive("eps", o.eps.unwrap_or(0.6))?;
    let net = discretise(&orbit_points(&ball), eps)?;
    let qi = quasi_isometry(&net);
    let result = json!({
        "eps": eps,
        "orbit_points": ball.len(),
        "quasi_isometry": qi,
        "diameter_ratio": if qi.hyperbolic_diameter > 0.0 { Some(qi.diameter_ratio()) } else { None },
    });
    let mut out = Outcome::new(result, None, true);
    out.extra.push(("graph.json".into(), net.graph.to_json_string()?));
    Ok(out)
}
