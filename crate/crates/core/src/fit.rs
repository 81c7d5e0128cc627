//! Least-squares fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
    /// Standard error of the slope (0 for an exact fit or two points).
    pub slope_stderr: f64,
    pub points: usize,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::Domain("fit abscissae and ordinates differ in length".into()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, have: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(u, v)| (v - intercept - slope * u).powi(2)).sum();
    let slope_stderr = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(LinearFit { slope, intercept, rms: (sse / nf).sqrt(), slope_stderr, points: n })
}

/// Least squares for `y ~ columns * coeffs`; returns the coefficients and
/// the RMS residual. `columns[k][i]` is regressor `k` at sample `i`.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let k = columns.len();
    if n < k || k == 0 {
        return Err(Error::TooFewPoints { needed: k.max(1), have: n });
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Domain("regressor length mismatch".into()));
    }
    let a = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let coeffs = svd.solve(&b, 1e-12).map_err(|e| Error::LinearAlgebra(e.to_string()))?;
    let resid = &a * &coeffs - &b;
    Ok((coeffs.iter().copied().collect(), (resid.norm_squared() / n as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 - 2.0 * v).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-14 && (f.intercept - 0.5).abs() < 1e-14);
        assert!(f.rms < 1e-14);
    }

    #[test]
    fn too_few() {
        assert!(matches!(linear_fit(&[1.0], &[2.0]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn three_regressors() {
        let t: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|v| 1.0 - 0.7 * v + 1.5 * v.ln()).collect();
        let ones = vec![1.0; t.len()];
        let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
        let (c, rms) = least_squares(&[ones, t.clone(), lt], &y).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-10 && (c[1] + 0.7).abs() < 1e-10 && (c[2] - 1.5).abs() < 1e-10);
        assert!(rms < 1e-10);
    }
}
