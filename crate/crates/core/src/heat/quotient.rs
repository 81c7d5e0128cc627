//! The quotient heat kernel `p_G(x, y, t) = sum_g p3(d(x, g y), t)` with a
//! certified bound on the part of the sum beyond the enumerated radius.

use super::kernel::{self, ln_neg_dp3_raw, p3_raw};
use crate::error::{Error, Result};
use crate::fit::{least_squares, linear_fit};
use crate::hyperbolic::{dist, ln_ball_volume, PointH3};
use crate::orbits::{enumerate_ball, EnumerationConfig, GroupPresentation, OrbitBall};
use crate::quad;

/// A kernel value with a bound on the neglected remainder.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HeatValue {
    pub value: f64,
    pub tail_bound: f64,
    pub t: f64,
    /// `d(x, y)`.
    pub rho: f64,
}

impl HeatValue {
    pub fn tail_ratio(&self) -> f64 {
        self.tail_bound / self.value
    }

    /// Fails with [`Error::InadequateTail`] unless `tail_bound / value < limit`.
    pub fn require_tail(self, limit: f64) -> Result<Self> {
        let ratio = self.tail_ratio();
        if ratio < limit {
            Ok(self)
        } else {
            Err(Error::InadequateTail { t: self.t, ratio, limit })
        }
    }
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct WordGrowth {
    entry: f64,
    gap: f64,
    letters: f64,
}

/// Upper bounds on `N(x, y, rho)` for radii beyond an enumerated ball.
///
/// * packing: `vol(rho + d(x,y) + r0) / vol(r0)` when the balls of radius `r0`
///   about the orbit of `y` are disjoint;
/// * word growth: with a ping-pong certificate, only reduced words of length
///   `n` with `entry + (n-1) gap <= rho + d(x,j) + d(y,j)` can contribute;
/// * trivial groups have `N = 1`.
///
/// The pointwise minimum of the available bounds is used.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingBound {
    dxy: f64,
    shift: f64,
    inj_lower: f64,
    words: Option<WordGrowth>,
    trivial: bool,
}

impl CountingBound {
    /// Bound for orbit counts of `group` between `x` and `y`; `inj_lower` must
    /// not exceed half the least displacement of `y` by a nontrivial element.
    pub fn new(group: &GroupPresentation, x: &PointH3, y: &PointH3, inj_lower: f64) -> Result<Self> {
        if !(inj_lower > 0.0 && inj_lower.is_finite()) {
            return Err(Error::Domain(format!("injectivity lower bound must be positive, got {inj_lower}")));
        }
        let j = PointH3::basepoint();
        let trivial = group.letters().iter().all(|l| l.matrix.projective_distance(&crate::Isometry::IDENTITY) <= 1e-12);
        let words = group.pingpong().map(|pp| WordGrowth {
            entry: pp.entry(),
            gap: pp.gap(),
            letters: group.letters().len() as f64,
        });
        Ok(Self { dxy: dist(x, y), shift: dist(x, &j) + dist(y, &j), inj_lower, words, trivial })
    }

    /// Packing bound only.
    pub fn packing(x: &PointH3, y: &PointH3, inj_lower: f64) -> Self {
        Self { dxy: dist(x, y), shift: 0.0, inj_lower, words: None, trivial: false }
    }

    pub fn ln_packing(&self, rho: f64) -> f64 {
        ln_ball_volume(rho + self.dxy + self.inj_lower) - ln_ball_volume(self.inj_lower)
    }

    /// First radius at which the word-growth bound steps up, and the spacing of later steps.
    fn word_steps(&self) -> Option<(f64, f64)> {
        self.words.map(|w| (w.entry - self.shift, w.gap))
    }

    pub fn ln_word_growth(&self, rho: f64) -> Option<f64> {
        let w = self.words?;
        let rho_j = rho + self.shift;
        if rho_j < w.entry {
            return Some(0.0);
        }
        let n = 1.0 + ((rho_j - w.entry) / w.gap).floor();
        let l = w.letters;
        Some(if l <= 2.0 {
            (1.0 + 2.0 * n).ln()
        } else {
            // 1 + L((L-1)^n - 1)/(L-2)
            let ln_pow = n * (l - 1.0).ln();
            if ln_pow < 600.0 {
                (1.0 + l * (ln_pow.exp() - 1.0) / (l - 2.0)).ln()
            } else {
                (l / (l - 2.0)).ln() + ln_pow
            }
        })
    }

    /// `ln` of the counting bound at `rho`.
    pub fn ln_bound(&self, rho: f64) -> f64 {
        if self.trivial {
            return 0.0;
        }
        let p = self.ln_packing(rho);
        match self.ln_word_growth(rho) {
            Some(w) => p.min(w),
            None => p,
        }
    }

    /// Bound on `sum_{d_i > R} p3(d_i, t)` given `N(R) = n_r`:
    /// `int_R^inf (Nbar - N(R))^+ (-dp3) drho`.
    pub fn tail(&self, radius: f64, t: f64, n_r: usize) -> Result<f64> {
        if self.trivial {
            return Ok(0.0);
        }
        let ln_nr = (n_r.max(1) as f64).ln();
        let f = |rho: f64| -> f64 {
            let ln_b = self.ln_bound(rho);
            if ln_b <= ln_nr || rho <= 0.0 {
                return 0.0;
            }
            let excess = -(ln_nr - ln_b).exp_m1();
            (ln_b + ln_neg_dp3_raw(rho, t)).exp() * excess
        };
        let end = radius.max(2.0 * t) + 2.0 * (300.0 * t).sqrt() + 60.0;
        let mut breaks = vec![radius];
        let width = t.sqrt().max(0.5);
        let mut steps = Vec::new();
        if let Some((first, gap)) = self.word_steps() {
            let mut s = first;
            if s < radius {
                s += ((radius - s) / gap).ceil() * gap;
            }
            while s < end {
                steps.push(s);
                s += gap;
            }
        }
        let mut k = 0;
        let mut b = radius;
        while b < end {
            let next_regular = b + width;
            while k < steps.len() && steps[k] <= b {
                k += 1;
            }
            b = if k < steps.len() && steps[k] < next_regular { steps[k] } else { next_regular.min(end) };
            breaks.push(b);
        }
        let q = quad::integrate_relative(&f, &breaks, 1e-7)?;
        Ok(q.value + q.error)
    }
}

/// Half the least displacement of `y` found within `search`; every
/// nontrivial element moving `y` further than that is covered by `search / 2`.
pub fn injectivity_lower_bound(group: &GroupPresentation, y: &PointH3, search: f64) -> Result<f64> {
    let ball = enumerate_ball(group, y, y, search, &EnumerationConfig::default())?;
    ball.require_complete()?;
    let least = ball.distances.iter().copied().find(|&d| d > 1e-9).unwrap_or(search);
    Ok(0.5 * least.min(search))
}

/// `p_G(x, y, t)` from a complete ball, with the tail bounded by `bound`.
pub fn quotient_kernel(ball: &OrbitBall, t: f64, bound: &CountingBound) -> Result<HeatValue> {
    ball.require_complete()?;
    kernel::p3(0.0, t)?;
    let value = neumaier_sum(ball.distances.iter().map(|&d| p3_raw(d, t)));
    let tail_bound = bound.tail(ball.radius, t, ball.len())?;
    Ok(HeatValue { value, tail_bound, t, rho: dist(&ball.x, &ball.y) })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StieltjesReport {
    /// `-int_0^R N dp3 + N(R) p3(R)` by telescoping between jumps.
    pub stieltjes: f64,
    /// Direct sum over the ball.
    pub direct: f64,
    pub residual: f64,
}

/// Checks `sum_i p3(d_i) = -int_0^R N(rho) dp3 drho + N(R) p3(R)` on the ball.
pub fn stieltjes_check(ball: &OrbitBall, t: f64) -> Result<StieltjesReport> {
    ball.require_complete()?;
    kernel::p3(0.0, t)?;
    let d = &ball.distances;
    let mut pieces = Vec::with_capacity(d.len() + 1);
    let mut i = 0;
    while i < d.len() {
        let start = d[i];
        while i < d.len() && d[i] == start {
            i += 1;
        }
        let end = if i < d.len() { d[i] } else { ball.radius };
        // N = i on [start, end)
        pieces.push(i as f64 * (p3_raw(start, t) - p3_raw(end, t)));
    }
    pieces.push(d.len() as f64 * p3_raw(ball.radius, t));
    let stieltjes = neumaier_sum(pieces);
    let direct = neumaier_sum(d.iter().map(|&r| p3_raw(r, t)));
    Ok(StieltjesReport { stieltjes, direct, residual: (stieltjes - direct).abs() / direct })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct UpperBoundRow {
    pub rho: f64,
    pub count: usize,
    pub kernel: HeatValue,
    pub ratio: f64,
    pub running_sup: f64,
}

/// `N(rho) e^{-2 rho} / (sqrt(rho) p_G(x, y, rho/2))`.
pub fn upper_bound_ratio(ball: &OrbitBall, bound: &CountingBound, rho: f64) -> Result<(f64, HeatValue)> {
    if !(rho > 1.0) {
        return Err(Error::Domain(format!("ratio needs rho > 1, got {rho}")));
    }
    let count = ball.orbital_count(rho)?;
    let kernel = quotient_kernel(ball, 0.5 * rho, bound)?.require_tail(1e-2)?;
    let ratio = count as f64 * (-2.0 * rho).exp() / (rho.sqrt() * kernel.value);
    Ok((ratio, kernel))
}

pub fn upper_bound_table(ball: &OrbitBall, bound: &CountingBound, rhos: &[f64]) -> Result<Vec<UpperBoundRow>> {
    let mut sup = 0.0f64;
    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let (ratio, kernel) = upper_bound_ratio(ball, bound, rho)?;
        sup = sup.max(ratio);
        rows.push(UpperBoundRow { rho, count: ball.count_unchecked(rho), kernel, ratio, running_sup: sup });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LogLimit {
    /// `lambda` in `ln p = a + lambda t + c ln t` over the window.
    pub slope: f64,
    /// Coefficient of `ln t`.
    pub power: f64,
    /// Plain least-squares slope of `ln p` against `t` over the window.
    pub plain_slope: f64,
    pub rms: f64,
    pub window: (f64, f64),
    pub kernels: Vec<HeatValue>,
}

/// Exponential decay rate of `p_G(x, x, t)` over the top dyadic window of `times`.
pub fn log_limit_estimate(ball: &OrbitBall, bound: &CountingBound, times: &[f64]) -> Result<LogLimit> {
    let t_max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let window: Vec<f64> = times.iter().copied().filter(|&t| t >= 0.5 * t_max).collect();
    if window.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, have: window.len() });
    }
    let kernels =
        window.iter().map(|&t| quotient_kernel(ball, t, bound)?.require_tail(1e-3)).collect::<Result<Vec<_>>>()?;
    let lnp: Vec<f64> = kernels.iter().map(|k| k.value.ln()).collect();
    let ones = vec![1.0; window.len()];
    let lnt: Vec<f64> = window.iter().map(|t| t.ln()).collect();
    let (c, rms) = least_squares(&[ones, window.clone(), lnt], &lnp)?;
    let plain = linear_fit(&window, &lnp)?;
    Ok(LogLimit {
        slope: c[1],
        power: c[2],
        plain_slope: plain.slope,
        rms,
        window: (window[0].min(0.5 * t_max), t_max),
        kernels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::Builtin;

    fn ball(b: Builtin, r: f64) -> (GroupPresentation, OrbitBall) {
        let g = b.presentation().unwrap();
        let j = PointH3::basepoint();
        let ball = enumerate_ball(&g, &j, &j, r, &EnumerationConfig::default()).unwrap();
        (g, ball)
    }

    #[test]
    fn trivial_group_kernel() {
        let (g, b) = ball(Builtin::Trivial, 3.0);
        let j = PointH3::basepoint();
        let bound = CountingBound::new(&g, &j, &j, 1.0).unwrap();
        let k = quotient_kernel(&b, 1.5, &bound).unwrap();
        assert_eq!(k.value, p3_raw(0.0, 1.5));
        assert_eq!(k.tail_bound, 0.0);
        assert!(stieltjes_check(&b, 1.5).unwrap().residual < 1e-14);
    }

    #[test]
    fn cyclic_matches_direct_sum() {
        // sum_{|n| <= 200} p3(|n|, 1), extended precision
        const ORACLE: f64 = 0.023_122_274_356_298_4;
        let (g, b) = ball(Builtin::Cyclic { length: 1.0 }, 30.0);
        let j = PointH3::basepoint();
        let bound = CountingBound::new(&g, &j, &j, 0.5).unwrap();
        let k = quotient_kernel(&b, 1.0, &bound).unwrap();
        assert!((k.value - ORACLE).abs() < 1e-12 * ORACLE);
        assert!(k.tail_bound < 1e-12 * k.value);
        let direct = neumaier_sum((-200i32..=200).map(|n| p3_raw(n.abs() as f64, 1.0)));
        assert!((direct - ORACLE).abs() < 1e-15);
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let (g, big) = ball(Builtin::Schottky { length: 3.0 }, 16.0);
        let j = PointH3::basepoint();
        let bound = CountingBound::new(&g, &j, &j, 0.5 * 3.0).unwrap();
        for r in [6.0, 8.0, 10.0] {
            let small = big.restrict_radius(r).unwrap();
            for t in [1.0, 2.0, 4.0] {
                let k = quotient_kernel(&small, t, &bound).unwrap();
                let truth = neumaier_sum(big.distances.iter().filter(|&&d| d > r).map(|&d| p3_raw(d, t)));
                assert!(k.tail_bound >= truth, "r={r} t={t}: {} < {truth}", k.tail_bound);
            }
        }
    }

    #[test]
    fn schottky_tail_is_small() {
        let (g, b) = ball(Builtin::Schottky { length: 3.0 }, 10.0);
        let j = PointH3::basepoint();
        let inj = injectivity_lower_bound(&g, &j, 10.0).unwrap();
        let bound = CountingBound::new(&g, &j, &j, inj).unwrap();
        let k = quotient_kernel(&b, 2.0, &bound).unwrap();
        assert!(k.tail_ratio() < 1e-3, "{}", k.tail_ratio());
    }

    #[test]
    fn word_bound_counts_reduced_words() {
        let (g, b) = ball(Builtin::Schottky { length: 3.0 }, 12.0);
        let j = PointH3::basepoint();
        let bound = CountingBound::new(&g, &j, &j, 1.0).unwrap();
        for r in [0.5, 2.0, 5.0, 9.0, 12.0] {
            let n = b.orbital_count(r).unwrap() as f64;
            assert!(bound.ln_word_growth(r).unwrap() >= n.ln() - 1e-12);
            assert!(bound.ln_packing(r) >= n.ln());
        }
    }

    #[test]
    fn stieltjes_residuals() {
        for bi in [Builtin::Cyclic { length: 1.0 }, Builtin::Schottky { length: 3.0 }] {
            let (_, b) = ball(bi, 12.0);
            for t in [1.0, 2.0, 4.0] {
                let r = stieltjes_check(&b, t).unwrap();
                assert!(r.residual <= 1e-12, "{bi:?} t={t}: {}", r.residual);
            }
        }
    }

    #[test]
    fn trivial_upper_bound_ratio() {
        let (g, b) = ball(Builtin::Trivial, 10.0);
        let j = PointH3::basepoint();
        let bound = CountingBound::new(&g, &j, &j, 1.0).unwrap();
        let (ratio, _) = upper_bound_ratio(&b, &bound, 4.0).unwrap();
        let expect = (-8f64).exp() / (2.0 * p3_raw(0.0, 2.0));
        assert!((ratio - expect).abs() < 1e-15 * expect);
    }

    #[test]
    fn log_limits() {
        let times: Vec<f64> = (0..=16).map(|i| 8.0 + 0.5 * i as f64).collect();
        let (g, b) = ball(Builtin::Trivial, 5.0);
        let j = PointH3::basepoint();
        let bound = CountingBound::new(&g, &j, &j, 1.0).unwrap();
        let l = log_limit_estimate(&b, &bound, &times).unwrap();
        assert!((l.slope + 1.0).abs() < 1e-9 && (l.power + 1.5).abs() < 1e-8);
        let (g, b) = ball(Builtin::Cyclic { length: 1.0 }, 40.0);
        let bound = CountingBound::new(&g, &j, &j, 0.5).unwrap();
        let l = log_limit_estimate(&b, &bound, &times).unwrap();
        assert!((l.slope + 1.0).abs() < 0.05, "{l:?}");
    }
}
