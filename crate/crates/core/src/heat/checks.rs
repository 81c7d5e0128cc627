//! Numerical checks of the heat-kernel inequalities behind the counting bounds.

use super::kernel::{neg_dp3_raw, p3_raw, p5, rho_coth_minus_one};
use crate::error::{Error, Result};
use crate::par;
use crate::quad;

/// Worst relative deviations over a `(rho, t)` grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DerivativeReport {
    pub dp3_max_rel: f64,
    pub p5_max_rel: f64,
    pub points: usize,
}

/// Compares `dp3_drho` with centred differences of `p3` (step `h`) and `p5`
/// with the recurrence applied to those differences, on an `n x n` grid over
/// `rho in [0.05, 10]`, `t in [0.1, 10]`.
pub fn derivative_grid_check(n: usize, h: f64) -> DerivativeReport {
    let axis = |i: usize, lo: f64, hi: f64| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64);
    let rows = par::map_range(n, |i| {
        let rho = axis(i, 0.05, 10.0);
        let mut worst = (0.0f64, 0.0f64);
        for k in 0..n {
            let t = axis(k, 0.1, 10.0);
            let fd = (p3_raw(rho + h, t) - p3_raw(rho - h, t)) / (2.0 * h);
            let analytic = -neg_dp3_raw(rho, t);
            worst.0 = worst.0.max(((analytic - fd) / analytic).abs());
            let rec = -(-3.0 * t).exp() / (2.0 * std::f64::consts::PI * rho.sinh()) * fd;
            let direct = p5(rho, t).expect("grid inside the domain");
            worst.1 = worst.1.max(((direct - rec) / direct).abs());
        }
        worst
    });
    let (a, b) = rows.iter().fold((0.0f64, 0.0f64), |acc, w| (acc.0.max(w.0), acc.1.max(w.1)));
    DerivativeReport { dp3_max_rel: a, p5_max_rel: b, points: n * n }
}

/// `-e^{2 rho} dp3 / (t^{-1/2} e^{-t - rho^2/4t + rho})`, in closed form:
/// `(4 pi)^{-3/2} t^{-1} (2 / (1 - e^{-2 rho})) (rho coth rho - 1 + rho^2/2t)`.
pub fn sandwich_ratio(t: f64, rho: f64) -> f64 {
    let bracket = rho_coth_minus_one(rho) + rho * rho / (2.0 * t);
    (4.0 * std::f64::consts::PI).powf(-1.5) / t * 2.0 / (-(-2.0 * rho).exp_m1()) * bracket
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SandwichReport {
    pub c1: f64,
    pub c2: f64,
    pub argmin: (f64, f64),
    pub argmax: (f64, f64),
    pub all_positive: bool,
}

/// Extremes of [`sandwich_ratio`] on `t in [t_lo, t_hi]`, `rho in (t, 3t)`,
/// sampled on `n_t x n_rho` interior points.
pub fn sandwich_grid(t_lo: f64, t_hi: f64, n_t: usize, n_rho: usize) -> Result<SandwichReport> {
    if !(t_lo > 1.0 && t_hi >= t_lo) || n_t < 1 || n_rho < 1 {
        return Err(Error::Domain("sandwich grid needs 1 < t_lo <= t_hi and nonempty axes".into()));
    }
    let mut rep =
        SandwichReport { c1: f64::INFINITY, c2: 0.0, argmin: (0.0, 0.0), argmax: (0.0, 0.0), all_positive: true };
    for i in 0..n_t {
        let t = if n_t == 1 { t_lo } else { t_lo + (t_hi - t_lo) * i as f64 / (n_t - 1) as f64 };
        for k in 0..n_rho {
            // interior points of (t, 3t)
            let rho = t + 2.0 * t * (k as f64 + 0.5) / n_rho as f64;
            let r = sandwich_ratio(t, rho);
            rep.all_positive &= r > 0.0;
            if r < rep.c1 {
                rep.c1 = r;
                rep.argmin = (t, rho);
            }
            if r > rep.c2 {
                rep.c2 = r;
                rep.argmax = (t, rho);
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Chopped {
    pub t: f64,
    pub k: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `I1 t^alpha / e^{-k^2/4}`.
    pub r1: f64,
    /// `I3 t^alpha / e^{-k^2/4}`.
    pub r3: f64,
}

/// The three pieces of `int_t^{3t} Ntilde(rho) t^{-1/2} e^{-t - rho^2/4t + rho} drho`
/// split at `2t -+ k sqrt(t)`. With `u = (rho - 2t) / (2 sqrt t)` the
/// integrand becomes `2 Ntilde e^{-u^2} du`.
pub fn chopped_integrals<F>(profile: &F, t: f64, k: f64, alpha: f64) -> Result<Chopped>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if !(t > 0.0 && k > 0.0) {
        return Err(Error::Domain(format!("need t > 0 and k > 0, got t={t}, k={k}")));
    }
    if k > t.sqrt() {
        return Err(Error::Domain(format!("k = {k} exceeds sqrt(t) = {}: 2t -+ k sqrt(t) leaves [t, 3t]", t.sqrt())));
    }
    let s = t.sqrt();
    let g = |u: f64| 2.0 * profile(2.0 * t + 2.0 * s * u) * (-u * u).exp();
    let u_lo = -0.5 * s;
    let u_hi = 0.5 * s;
    let piece = |a: f64, b: f64| -> Result<f64> {
        let mut breaks = vec![a];
        // keep panels short where the Gaussian lives
        let mut x = a;
        while x + 1.0 < b {
            x += 1.0;
            breaks.push(x);
        }
        breaks.push(b);
        Ok(quad::integrate_relative(&g, &breaks, 1e-11)?.value)
    };
    let i1 = piece(u_lo, -0.5 * k)?;
    let i2 = piece(-0.5 * k, 0.5 * k)?;
    let i3 = piece(0.5 * k, u_hi)?;
    let scale = t.powf(alpha) / (-k * k / 4.0).exp();
    Ok(Chopped { t, k, i1, i2, i3, r1: i1 * scale, r3: i3 * scale })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianTail {
    pub k: f64,
    /// Certified upper bound on `int_{k/2}^inf e^{-u^2} du`.
    pub upper: f64,
    /// Certified lower bound.
    pub lower: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Certifies `int_{k/2}^inf e^{-u^2} du <= e^{-k^2/4}`.
///
/// On `[k/2, U]` the integrand is concave below `1/sqrt 2` and convex above,
/// so midpoint sums bound the concave part from above and trapezoid sums the
/// convex part (and the other rule bounds each from below). The remainder
/// beyond `U` lies in `[0, e^{-U^2} / 2U]`.
pub fn gaussian_tail_check(k: f64) -> Result<GaussianTail> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("k must be positive, got {k}")));
    }
    let a = 0.5 * k;
    let big_u = a.max(1.0) + 8.0;
    let f = |u: f64| (-u * u).exp();
    let knee = std::f64::consts::FRAC_1_SQRT_2;
    const PANELS: usize = 1 << 16;
    let rules = |lo: f64, hi: f64, concave: bool| -> (f64, f64) {
        if hi <= lo {
            return (0.0, 0.0);
        }
        let h = (hi - lo) / PANELS as f64;
        let mut mid = 0.0;
        let mut trap = 0.0;
        for i in 0..PANELS {
            let x0 = lo + h * i as f64;
            let x1 = x0 + h;
            mid += f(0.5 * (x0 + x1)) * h;
            trap += 0.5 * (f(x0) + f(x1)) * h;
        }
        if concave {
            (mid, trap)
        } else {
            (trap, mid)
        }
    };
    let (up1, lo1) = rules(a, knee.max(a), true);
    let (up2, lo2) = rules(knee.max(a), big_u, false);
    // one ulp-scale allowance per summand for rounding
    let rounding = 4.0 * PANELS as f64 * f64::EPSILON;
    let remainder = (-big_u * big_u).exp() / (2.0 * big_u);
    let upper = (up1 + up2) * (1.0 + rounding) + remainder;
    let lower = (lo1 + lo2) * (1.0 - rounding);
    let bound = (-k * k / 4.0).exp();
    Ok(GaussianTail { k, upper, lower, bound, pass: upper <= bound })
}
