//! The heat kernel of H3 and its radial derivative.
//!
//! `p3(rho, t) = (4 pi t)^{-3/2} (rho / sinh rho) e^{-t - rho^2/(4t)}`, and
//! the five-dimensional kernel from the recurrence
//! `p5 = -e^{-3t} / (2 pi sinh rho) d/drho p3`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;

/// Below this radius `rho / sinh rho` comes from its Taylor series.
pub const SERIES_CUTOFF: f64 = 1e-6;
/// Below this radius `rho coth rho - 1` comes from its Taylor series.
const COTH_SERIES_CUTOFF: f64 = 0.05;

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive and finite, got {t}")))
    }
}

fn check_rho(rho: f64, allow_zero: bool) -> Result<()> {
    let ok = rho.is_finite() && if allow_zero { rho >= 0.0 } else { rho > 0.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius out of range: {rho}")))
    }
}

/// `rho / sinh rho`.
pub fn rho_over_sinh(rho: f64) -> f64 {
    if rho < SERIES_CUTOFF {
        let r2 = rho * rho;
        1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0
    } else if rho < 20.0 {
        rho / rho.sinh()
    } else {
        2.0 * rho * (-rho).exp() / (1.0 - (-2.0 * rho).exp())
    }
}

/// `ln(rho / sinh rho)`.
pub fn ln_rho_over_sinh(rho: f64) -> f64 {
    if rho < 20.0 {
        rho_over_sinh(rho).ln()
    } else {
        (2.0 * rho).ln() - rho - (-(-2.0 * rho).exp()).ln_1p()
    }
}

/// `ln sinh rho` for `rho > 0`.
pub fn ln_sinh(rho: f64) -> f64 {
    if rho < 20.0 {
        rho.sinh().ln()
    } else {
        rho - std::f64::consts::LN_2 + (-(-2.0 * rho).exp()).ln_1p()
    }
}

/// `rho coth rho - 1`, nonnegative and `~ rho^2/3` near zero.
pub fn rho_coth_minus_one(rho: f64) -> f64 {
    if rho < COTH_SERIES_CUTOFF {
        let r2 = rho * rho;
        r2 * (1.0 / 3.0 - r2 * (1.0 / 45.0 - r2 * (2.0 / 945.0 - r2 / 4725.0)))
    } else {
        rho / rho.tanh() - 1.0
    }
}

fn prefactor(t: f64) -> f64 {
    (4.0 * PI * t).powf(-1.5)
}

pub(crate) fn p3_raw(rho: f64, t: f64) -> f64 {
    if rho < 700.0 {
        prefactor(t) * rho_over_sinh(rho) * (-t - rho * rho / (4.0 * t)).exp()
    } else {
        ln_p3_raw(rho, t).exp()
    }
}

pub(crate) fn ln_p3_raw(rho: f64, t: f64) -> f64 {
    -1.5 * (4.0 * PI * t).ln() + ln_rho_over_sinh(rho) - t - rho * rho / (4.0 * t)
}

/// `-d/drho p3`, which is `>= 0`; zero at `rho = 0`.
pub(crate) fn neg_dp3_raw(rho: f64, t: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    if rho < 700.0 {
        let bracket = rho_coth_minus_one(rho) / rho + rho / (2.0 * t);
        prefactor(t) * rho_over_sinh(rho) * (-t - rho * rho / (4.0 * t)).exp() * bracket
    } else {
        ln_neg_dp3_raw(rho, t).exp()
    }
}

pub(crate) fn ln_neg_dp3_raw(rho: f64, t: f64) -> f64 {
    let bracket = rho_coth_minus_one(rho) / rho + rho / (2.0 * t);
    ln_p3_raw(rho, t) + bracket.ln()
}

/// Heat kernel of H3 at distance `rho` and time `t`.
pub fn p3(rho: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    check_rho(rho, true)?;
    Ok(p3_raw(rho, t))
}

/// `ln p3`, finite where `p3` underflows.
pub fn ln_p3(rho: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    check_rho(rho, true)?;
    Ok(ln_p3_raw(rho, t))
}

/// `d/drho p3(rho, t)` for `rho > 0`.
pub fn dp3_drho(rho: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    check_rho(rho, false)?;
    Ok(-neg_dp3_raw(rho, t))
}

/// Heat kernel of H5 from the dimension recurrence.
pub fn p5(rho: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    check_rho(rho, false)?;
    // e^{-3t}/(2 pi sinh rho) * (-dp3), with 1/sinh folded into rho/sinh / rho
    let ratio = rho_over_sinh(rho) / rho;
    Ok((-3.0 * t).exp() / (2.0 * PI) * ratio * neg_dp3_raw(rho, t))
}

/// Radius beyond which `p3(rho, t) * sinh(rho)^2` is below `e^{-margin}` of its peak.
pub(crate) fn gaussian_reach(t: f64, margin: f64) -> f64 {
    // the log-density is about rho - (rho - 2t)^2 / 4t; go margin units past the peak
    2.0 * t + 2.0 * (t * margin).sqrt() + 2.0 * margin.sqrt() + 10.0
}

/// `int_0^inf p3(rho, t) 4 pi sinh^2 rho drho`, which should be 1.
pub fn total_mass(t: f64, tol: f64) -> Result<quad::Quadrature> {
    check_t(t)?;
    let f = |rho: f64| {
        if rho == 0.0 {
            0.0
        } else {
            4.0 * PI * (ln_p3_raw(rho, t) + 2.0 * ln_sinh(rho)).exp()
        }
    };
    let end = gaussian_reach(t, 800.0);
    let peak = 2.0 * t + 1.0;
    let mut breaks = vec![0.0, 0.5 * peak, peak];
    let w = 2.0 * t.sqrt() + 1.0;
    let mut b = peak;
    while b + w < end {
        b += w;
        breaks.push(b);
    }
    breaks.push(end);
    quad::integrate_panels(&f, &breaks, tol)
}

/// Relative defect of the semigroup identity
/// `int p3(d(x,z), s) p3(d(z,y), t) dz = p3(d(x,y), s + t)` at `d(x,y) = dxy`.
///
/// Polar coordinates about `x` reduce the angular integral to
/// `2 pi / (sinh r sinh D) int_{|r-D|}^{r+D} p3(u, t) sinh u du`.
pub fn semigroup_defect(dxy: f64, s: f64, t: f64, tol: f64) -> Result<f64> {
    check_t(s)?;
    check_t(t)?;
    check_rho(dxy, true)?;
    let target = p3_raw(dxy, s + t);
    let inner = |r: f64| -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        if dxy < 1e-8 {
            return 4.0 * PI * p3_raw(r, t) * (ln_sinh(r) * 2.0).exp();
        }
        let g = |u: f64| if u == 0.0 { 0.0 } else { (ln_p3_raw(u, t) + ln_sinh(u)).exp() };
        let lo = (r - dxy).abs();
        let hi = r + dxy;
        let q = quad::integrate(&g, lo, hi, tol * 1e-3 * target).map(|q| q.value).unwrap_or(f64::NAN);
        2.0 * PI * q * (ln_sinh(r) * 2.0 - ln_sinh(r) - ln_sinh(dxy)).exp()
    };
    let outer = |r: f64| p3_raw(r, s) * inner(r);
    let end = gaussian_reach(s.max(t), 200.0) + dxy;
    let breaks: Vec<f64> = (0..=16).map(|i| end * i as f64 / 16.0).collect();
    let q = quad::integrate_panels(&outer, &breaks, tol * target)?;
    if !q.value.is_finite() {
        return Err(Error::Quadrature("inner integral failed".into()));
    }
    Ok((q.value - target).abs() / target)
}
