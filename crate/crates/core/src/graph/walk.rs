//! Lazy conductance walks and their decay exponents.
//!
//! From `u` the walk holds with probability 1/2 and otherwise moves to `v`
//! with probability `c(u,v) / pi(u)`, where `pi(u) = sum_v c(u,v)`. The walk
//! is reversible for `pi`, so kernels are reported as `p_n(x,y) / pi(y)`.

use serde::Serialize;

use super::weighted::WeightedGraph;
use crate::error::{Error, Result};
use crate::fit::linear_fit;

/// Frontier mass above which a truncated walk is flagged.
pub const FRONTIER_WARNING: f64 = 1e-9;

/// Ray depth that keeps an `n_max`-step walk away from the truncation.
pub fn walk_depth(n_max: usize) -> usize {
    (6.0 * (n_max as f64).sqrt()).ceil() as usize + 8
}

#[derive(Debug, Clone, Serialize)]
pub struct WalkSeries {
    /// `(n, p_n(x,y) / pi(y))` for `n = 1..=n_max`.
    pub values: Vec<(u64, f64)>,
    /// Largest mass seen on the truncation frontier.
    pub frontier_mass: f64,
    pub warning: bool,
}

/// One lazy step: `out = u P`.
fn step(g: &WeightedGraph, pi: &[f64], u: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        let mut acc = 0.5 * u[v];
        for &(w, c) in g.neighbors(v) {
            acc += 0.5 * u[w] * c / pi[w];
        }
        *o = acc;
    }
}

/// Law of the walk after `n` steps from `x`.
pub fn walk_distribution(g: &WeightedGraph, x: usize, n: usize) -> Vec<f64> {
    let pi: Vec<f64> = (0..g.len()).map(|v| g.stationary(v)).collect();
    let mut u = vec![0.0; g.len()];
    u[x] = 1.0;
    let mut next = vec![0.0; g.len()];
    for _ in 0..n {
        step(g, &pi, &u, &mut next);
        std::mem::swap(&mut u, &mut next);
    }
    u
}

/// `p_n(x, y) / pi(y)` for `n = 1..=n_max`.
pub fn walk_kernel(g: &WeightedGraph, x: usize, y: usize, n_max: usize) -> Result<WalkSeries> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    if x >= g.len() || y >= g.len() {
        return Err(Error::Domain(format!("vertex out of range (graph has {})", g.len())));
    }
    if g.len() == 1 {
        return Err(Error::Domain("a single vertex has no walk".into()));
    }
    let pi: Vec<f64> = (0..g.len()).map(|v| g.stationary(v)).collect();
    let mut u = vec![0.0; g.len()];
    u[x] = 1.0;
    let mut next = vec![0.0; g.len()];
    let mut values = Vec::with_capacity(n_max);
    let mut frontier_mass: f64 = 0.0;
    for n in 1..=n_max {
        step(g, &pi, &u, &mut next);
        std::mem::swap(&mut u, &mut next);
        values.push((n as u64, u[y] / pi[y]));
        frontier_mass = frontier_mass.max(g.frontier().iter().map(|&v| u[v]).sum());
    }
    Ok(WalkSeries { values, frontier_mass, warning: frontier_mass > FRONTIER_WARNING })
}

#[derive(Debug, Clone, Serialize)]
pub struct AbsorbedSeries {
    /// `(n, P_1[X_n = 1, not yet absorbed])`.
    pub returns: Vec<(u64, f64)>,
    /// `P_1[absorbed by time n]`.
    pub absorbed: Vec<f64>,
}

/// Lazy walk on `{0, 1, 2, ...}` started at 1 and killed at 0.
pub fn absorbed_ray_return(n_max: usize) -> Result<AbsorbedSeries> {
    if n_max < 8 {
        return Err(Error::Domain(format!("n_max must be at least 8 (got {n_max})")));
    }
    // u[k] = mass at site k; site k only matters while it can still reach 0
    let mut u = vec![0.0; n_max + 3];
    let mut next = u.clone();
    u[1] = 1.0;
    let mut absorbed = 0.0;
    let mut returns = Vec::with_capacity(n_max);
    let mut absorbed_series = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let reach = (n + 1).min(n_max - n + 2);
        absorbed += 0.25 * u[1];
        for k in 1..=reach {
            next[k] = 0.5 * u[k] + 0.25 * (if k > 1 { u[k - 1] } else { 0.0 }) + 0.25 * u[k + 1];
        }
        next[reach + 1] = 0.0;
        std::mem::swap(&mut u, &mut next);
        returns.push((n as u64, u[1]));
        absorbed_series.push(absorbed);
    }
    Ok(AbsorbedSeries { returns, absorbed: absorbed_series })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub alpha: f64,
    pub intercept: f64,
    pub rms: f64,
    pub window: (u64, u64),
    pub points: usize,
}

/// Fits `ln p = intercept - alpha ln n` on the dyadic `n` inside `window`.
pub fn decay_fit(series: &[(u64, f64)], window: (u64, u64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(n, _)| n.is_power_of_two() && *n >= window.0 && *n <= window.1)
        .map(|&(n, p)| (n as f64, p))
        .collect();
    if pts.len() < 5 {
        return Err(Error::TooFewPoints { needed: 5, have: pts.len() });
    }
    if let Some(&(n, p)) = pts.iter().find(|(_, p)| !(*p > 0.0)) {
        return Err(Error::Domain(format!("non-positive value {p} at n={n}")));
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(DecayFit { alpha: -fit.slope, intercept: fit.intercept, rms: fit.rms, window, points: pts.len() })
}

/// `n,p_n` rows.
pub fn series_csv(series: &[(u64, f64)]) -> String {
    use std::fmt::Write as _;
    let mut s = String::from("n,p_n\n");
    for (n, p) in series {
        let _ = writeln!(s, "{n},{p:e}");
    }
    s
}
