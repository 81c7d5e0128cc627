//! Doubling, Poincaré and Sobolev constants of weighted graphs.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::weighted::WeightedGraph;
use crate::error::{Error, Result};
use crate::par;
use crate::quad::integrate_relative;

/// `sqrt(sum_{y ~ x} (f(y) - f(x))^2)`.
pub fn delta_f(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    g.neighbors(x).iter().map(|&(y, _)| (f[y] - f[x]).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareReport {
    pub x: usize,
    pub r: usize,
    pub value: f64,
    /// Vertices in `B(x, 2r)`.
    pub support: usize,
}

/// Vertices of `B(x, 2r)` with the inner ball flagged, and the index map.
fn poincare_balls(g: &WeightedGraph, x: usize, r: usize) -> (Vec<usize>, Vec<bool>, HashMap<usize, usize>) {
    let dist = g.distances_from(x);
    let outer = g.ball(x, 2 * r);
    let inner = outer.iter().map(|&v| dist[v].is_some_and(|d| d <= r)).collect();
    let index = outer.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    (outer, inner, index)
}

/// Smallest `P` with `sum_B m (f - f_B)^2 <= P r^2 sum_{2B} m (delta f)^2`.
///
/// Functions live on `B(x, 2r)` and edges leaving it are dropped from the
/// energy. On trees this is the exact constant, elsewhere an upper bound.
pub fn poincare_sup(g: &WeightedGraph, x: usize, r: usize) -> Result<PoincareReport> {
    let (outer, inner, index) = poincare_balls(g, x, r);
    let n = outer.len();
    if r == 0 || n == 1 {
        return Ok(PoincareReport { x, r, value: 0.0, support: n });
    }
    let w: Vec<f64> = outer.iter().zip(&inner).map(|(&v, &b)| if b { g.weight(v) } else { 0.0 }).collect();
    let mass: f64 = w.iter().sum();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        a[(i, i)] += w[i];
        for j in 0..n {
            a[(i, j)] -= w[i] * w[j] / mass;
        }
    }
    let mut b = DMatrix::<f64>::zeros(n, n);
    for (i, &u) in outer.iter().enumerate() {
        for &(v, _) in g.neighbors(u) {
            if let Some(&j) = index.get(&v) {
                if i < j {
                    let c = g.weight(u) + g.weight(v);
                    b[(i, i)] += c;
                    b[(j, j)] += c;
                    b[(i, j)] -= c;
                    b[(j, i)] -= c;
                }
            }
        }
    }
    // constants are in the kernel of both forms; lift them out of B's kernel
    let lift = b.diagonal().max() / n as f64;
    b.add_scalar_mut(lift);
    let chol = b
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("energy form is not positive on mean-zero functions".into()))?;
    let l_inv = chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
    let c = &l_inv * a * l_inv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let top = SymmetricEigen::new(c).eigenvalues.max();
    Ok(PoincareReport { x, r, value: top.max(0.0) / (r * r) as f64, support: n })
}

/// Largest Poincaré quotient among `trials` random functions on `B(x, 2r)`.
pub fn poincare_random(g: &WeightedGraph, x: usize, r: usize, trials: usize, seed: u64) -> f64 {
    let (outer, inner, index) = poincare_balls(g, x, r);
    if r == 0 || outer.len() == 1 {
        return 0.0;
    }
    let quotients = par::map_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let f: Vec<f64> = (0..outer.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (mut mass, mut first) = (0.0, 0.0);
        for (i, &v) in outer.iter().enumerate() {
            if inner[i] {
                mass += g.weight(v);
                first += g.weight(v) * f[i];
            }
        }
        let mean = first / mass;
        let var: f64 = outer
            .iter()
            .enumerate()
            .filter(|(i, _)| inner[*i])
            .map(|(i, &v)| g.weight(v) * (f[i] - mean).powi(2))
            .sum();
        let mut energy = 0.0;
        for (i, &v) in outer.iter().enumerate() {
            let d2: f64 = g.neighbors(v).iter().filter_map(|(y, _)| index.get(y)).map(|&j| (f[j] - f[i]).powi(2)).sum();
            energy += g.weight(v) * d2;
        }
        var / ((r * r) as f64 * energy)
    });
    quotients.into_iter().fold(0.0, f64::max)
}

/// `max_{1 <= r <= r_max} mu(B(x,2r)) / mu(B(x,r))`.
pub fn doubling_constant(g: &WeightedGraph, x: usize, r_max: usize) -> f64 {
    let vols = g.ball_measures(x, 2 * r_max);
    (1..=r_max).map(|r| vols[2 * r] / vols[r]).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevRow {
    pub radius: usize,
    pub bump: f64,
    pub random: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevReport {
    pub q: f64,
    pub p: f64,
    pub rows: Vec<SobolevRow>,
    pub sup: f64,
}

fn sobolev_quotient(g: &WeightedGraph, f: &[f64], q: f64, p: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for v in 0..g.len() {
        num += g.weight(v) * f[v].abs().powf(p);
        den += g.weight(v) * delta_f(g, f, v).powf(q);
    }
    num.powf(1.0 / p) / den.powf(1.0 / q)
}

/// `||f||_p / ||delta f||_q` over bumps centred at `x` with the given support radii.
///
/// Each radius tries the indicator of the ball, a linear tent, and `trials`
/// random functions supported in the ball.
pub fn sobolev_report(
    g: &WeightedGraph,
    x: usize,
    q: f64,
    p: f64,
    radii: &[usize],
    trials: usize,
    seed: u64,
) -> Result<SobolevReport> {
    if !(q >= 1.0 && p >= 1.0) {
        return Err(Error::Domain(format!("Sobolev exponents must be >= 1 (q={q}, p={p})")));
    }
    let dist = g.distances_from(x);
    let rows = par::map(radii, |&s| {
        let inside: Vec<usize> = (0..g.len()).filter(|&v| dist[v].is_some_and(|d| d <= s)).collect();
        let mut f = vec![0.0; g.len()];
        for &v in &inside {
            f[v] = 1.0;
        }
        let mut bump = sobolev_quotient(g, &f, q, p);
        if s > 0 {
            for &v in &inside {
                f[v] = 1.0 - dist[v].unwrap_or(0) as f64 / (s + 1) as f64;
            }
            bump = bump.max(sobolev_quotient(g, &f, q, p));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ s as u64);
        let mut random: f64 = 0.0;
        for _ in 0..trials {
            for &v in &inside {
                f[v] = rng.gen_range(0.0..1.0);
            }
            random = random.max(sobolev_quotient(g, &f, q, p));
        }
        SobolevRow { radius: s, bump, random }
    });
    let sup = rows.iter().map(|r| r.bump.max(r.random)).fold(0.0, f64::max);
    Ok(SobolevReport { q, p, rows, sup })
}

/// A radial profile supported in `[a, b]` with its derivative.
pub struct RadialProfile {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
    kinks: Vec<f64>,
}

impl RadialProfile {
    pub fn new<F, D>(f: F, df: D, support: (f64, f64), kinks: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { f: Box::new(f), df: Box::new(df), support, kinks }
    }

    /// `h - |r - c|` clipped at zero.
    pub fn tent(c: f64, h: f64) -> Self {
        Self::new(
            move |r| (h - (r - c).abs()).max(0.0),
            move |r| {
                if (r - c).abs() >= h {
                    0.0
                } else if r < c {
                    1.0
                } else {
                    -1.0
                }
            },
            (c - h, c + h),
            vec![c],
        )
    }

    /// `cos^2` bump of half-width `h` centred at `c`.
    pub fn smooth_bump(c: f64, h: f64) -> Self {
        use std::f64::consts::FRAC_PI_2;
        Self::new(
            move |r| if (r - c).abs() < h { (FRAC_PI_2 * (r - c) / h).cos().powi(2) } else { 0.0 },
            move |r| {
                if (r - c).abs() < h {
                    -(FRAC_PI_2 / h) * (std::f64::consts::PI * (r - c) / h).sin()
                } else {
                    0.0
                }
            },
            (c - h, c + h),
            vec![c],
        )
    }

    /// `r -> f(r / lambda)`.
    pub fn dilate(self, lambda: f64) -> Self {
        let Self { f, df, support, kinks } = self;
        Self {
            f: Box::new(move |r| f(r / lambda)),
            df: Box::new(move |r| df(r / lambda) / lambda),
            support: (support.0 * lambda, support.1 * lambda),
            kinks: kinks.into_iter().map(|k| k * lambda).collect(),
        }
    }

    /// `(4 pi)^{1/6} ||f||_{L^6(r^2 dr)} / (2 sqrt(pi) ||f'||_{L^2(r^2 dr)})`.
    pub fn ratio(&self, tol: f64) -> Result<f64> {
        let (a, b) = self.support;
        if !(a >= 1.0 && b.is_finite() && b > a) {
            return Err(Error::Domain(format!("support [{a}, {b}] is not a compact subset of [1, inf)")));
        }
        let mut breaks = vec![a];
        breaks.extend(self.kinks.iter().copied().filter(|&k| k > a && k < b));
        breaks.push(b);
        let f6 = integrate_relative(&|r: f64| (self.f)(r).powi(6) * r * r, &breaks, tol)?.value;
        let d2 = integrate_relative(&|r: f64| (self.df)(r).powi(2) * r * r, &breaks, tol)?.value;
        if !(f6 > 0.0 && d2 > 0.0) {
            return Err(Error::Domain("profile vanishes identically".into()));
        }
        let pi = std::f64::consts::PI;
        Ok((4.0 * pi).powf(1.0 / 6.0) * f6.powf(1.0 / 6.0) / (2.0 * pi.sqrt() * d2.sqrt()))
    }
}

/// Largest radial Sobolev ratio over the family.
pub fn radial_sobolev_check(family: &[RadialProfile], tol: f64) -> Result<f64> {
    let ratios = par::map(family, |p| p.ratio(tol));
    ratios.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}
