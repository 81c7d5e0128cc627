//! Adaptive quadrature on finite intervals.
//!
//! Backed by the double-exponential rule of the `quadrature` crate, with
//! recursive bisection whenever a panel misses its share of the tolerance.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Summed error estimate over all accepted panels.
    pub error: f64,
    pub evaluations: u64,
}

impl Quadrature {
    fn zero() -> Self {
        Self { value: 0.0, error: 0.0, evaluations: 0 }
    }

    fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

const MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature::zero());
    }
    if b < a {
        let q = integrate(f, b, a, tol)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    bisect(f, a, b, tol.max(f64::MIN_POSITIVE), 0)
}

fn bisect<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    let out = quadrature::integrate(f, a, b, tol);
    let here = Quadrature {
        value: out.integral,
        error: out.error_estimate,
        evaluations: u64::from(out.num_function_evaluations),
    };
    if here.error <= tol {
        return Ok(here);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!(
            "panel [{a}, {b}] error {:e} above {tol:e} at depth {depth}",
            here.error
        )));
    }
    let mid = 0.5 * (a + b);
    let left = bisect(f, a, mid, 0.5 * tol, depth + 1)?;
    let right = bisect(f, mid, b, 0.5 * tol, depth + 1)?;
    Ok(left.add(right))
}

/// Integrates over consecutive panels `[breaks[i], breaks[i+1]]`, splitting the
/// tolerance evenly. Use this at kinks or sharp peaks of the integrand.
pub fn integrate_panels<F>(f: &F, breaks: &[f64], tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    if breaks.len() < 2 {
        return Ok(Quadrature::zero());
    }
    let share = tol / (breaks.len() - 1) as f64;
    breaks.windows(2).try_fold(Quadrature::zero(), |acc, w| Ok(acc.add(integrate(f, w[0], w[1], share)?)))
}

/// Integrates with a tolerance relative to a first coarse estimate of the
/// integral's magnitude.
pub fn integrate_relative<F>(f: &F, breaks: &[f64], rel: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    let coarse = integrate_panels(f, breaks, f64::MAX)?;
    let scale = coarse.value.abs().max(f64::MIN_POSITIVE);
    integrate_panels(f, breaks, rel * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let q = integrate(&|x: f64| x.exp(), 1.0, 0.0, 1e-12).unwrap();
        assert!((q.value + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn sharp_gaussian_via_panels() {
        let w = 1e-3;
        let f = |x: f64| (-(x - 0.3) * (x - 0.3) / (w * w)).exp();
        let q = integrate_panels(&f, &[0.0, 0.29, 0.3, 0.31, 1.0], 1e-14).unwrap();
        let exact = w * std::f64::consts::PI.sqrt();
        assert!((q.value - exact).abs() < 1e-12, "{} vs {}", q.value, exact);
    }
}
