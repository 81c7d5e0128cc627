//! Bottom of the spectrum of radial model components.
//!
//! The Rayleigh quotient is `sum_x m(x) (delta f(x))^2 / sum_x m(x) f(x)^2`,
//! which equals `2 sum_{edges} c (f(u) - f(v))^2 / sum m f^2` for the
//! conductance `c = (m(u) + m(v)) / 2`. Depth `L` truncations keep the root
//! free and put a Dirichlet condition at depth `L + 1`. The ground state is
//! radial, so the truncation is solved on the lumped path.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::models::Component;
use super::weighted::WeightedGraph;
use crate::error::{Error, Result};
use crate::par;

/// Depths used for the default sweep.
pub const DEPTHS: [usize; 3] = [16, 32, 64];

/// Smallest Dirichlet eigenvalue of the depth-`l` truncation of `c`.
pub fn spectral_bottom(c: Component, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain("truncation depth must be at least 1".into()));
    }
    let n = l + 1;
    let scale: Vec<f64> = (0..n).map(|k| if k == 0 { 1.0 } else { c.level_weight(k) }.sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let cond = 2.0 * c.level_conductance(k);
        s[(k, k)] += cond / (scale[k] * scale[k]);
        if k + 1 < n {
            s[(k + 1, k + 1)] += cond / (scale[k + 1] * scale[k + 1]);
            let off = -cond / (scale[k] * scale[k + 1]);
            s[(k, k + 1)] = off;
            s[(k + 1, k)] = off;
        }
    }
    Ok(SymmetricEigen::new(s).eigenvalues.min())
}

/// Same quotient on an arbitrary finite graph with Dirichlet vertices removed.
pub fn dirichlet_bottom(g: &WeightedGraph, dirichlet: &[usize]) -> Result<f64> {
    let keep: Vec<usize> = (0..g.len()).filter(|v| !dirichlet.contains(v)).collect();
    let pos = |v: usize| keep.iter().position(|&k| k == v);
    let n = keep.len();
    if n == 0 {
        return Err(Error::Domain("every vertex is Dirichlet".into()));
    }
    let mut s = DMatrix::<f64>::zeros(n, n);
    for (u, v, c) in g.edges() {
        let (pu, pv) = (pos(u), pos(v));
        for p in [pu, pv].into_iter().flatten() {
            s[(p, p)] += 2.0 * c;
        }
        if let (Some(a), Some(b)) = (pu, pv) {
            s[(a, b)] -= 2.0 * c;
            s[(b, a)] -= 2.0 * c;
        }
    }
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] /= (g.weight(keep[i]) * g.weight(keep[j])).sqrt();
        }
    }
    Ok(SymmetricEigen::new(s).eigenvalues.min())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralSweep {
    pub component: Component,
    pub depths: Vec<usize>,
    pub raw: Vec<f64>,
    /// `(4 lambda(L) - lambda(L/2)) / 3`, removing an `L^-2` correction.
    pub extrapolated: Vec<f64>,
}

impl SpectralSweep {
    /// Largest relative spread of the extrapolated values.
    pub fn spread(&self) -> f64 {
        let lo = self.extrapolated.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.extrapolated.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo) / lo.abs()
    }
}

pub fn spectral_sweep(c: Component, depths: &[usize]) -> Result<SpectralSweep> {
    if depths.iter().any(|&l| l < 2) {
        return Err(Error::Domain("sweep depths must be at least 2".into()));
    }
    let raw = par::map(depths, |&l| spectral_bottom(c, l)).into_iter().collect::<Result<Vec<_>>>()?;
    let half = par::map(depths, |&l| spectral_bottom(c, l / 2)).into_iter().collect::<Result<Vec<_>>>()?;
    let extrapolated = raw.iter().zip(&half).map(|(a, b)| (4.0 * a - b) / 3.0).collect();
    Ok(SpectralSweep { component: c, depths: depths.to_vec(), raw, extrapolated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::models::{Part, RadialModel};

    #[test]
    fn lumped_matches_explicit_tree() {
        for (c, l) in [(Component::BinaryTree, 6), (Component::ExpRay, 8), (Component::UnitRay, 9)] {
            // explicit depth l+1 graph with the last level Dirichlet
            let m = RadialModel { parts: vec![Part { component: c, copies: 1, depth: l + 1 }] };
            let g = m.explicit().unwrap();
            let last: Vec<usize> = g
                .labels()
                .unwrap()
                .iter()
                .enumerate()
                .filter(|(_, lab)| lab.depth as usize == l + 1)
                .map(|(v, _)| v)
                .collect();
            let a = dirichlet_bottom(&g, &last).unwrap();
            let b = spectral_bottom(c, l).unwrap();
            assert!((a - b).abs() < 1e-10 * a.max(1e-3), "{c:?}: {a} vs {b}");
        }
    }

    #[test]
    fn unit_ray_decays_like_inverse_square() {
        let vals: Vec<f64> = DEPTHS.iter().map(|&l| spectral_bottom(Component::UnitRay, l).unwrap()).collect();
        for w in vals.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
        }
        // free at 0, zero at L+1: lambda = 2 * 4 sin^2(pi / (4 (L+1) + 2)) exactly
        for &l in &DEPTHS {
            let exact = 8.0 * (std::f64::consts::PI / (4.0 * (l + 1) as f64 + 2.0)).sin().powi(2);
            let got = spectral_bottom(Component::UnitRay, l).unwrap();
            assert!((got - exact).abs() < 1e-12, "{l}: {got} vs {exact}");
        }
    }

    #[test]
    fn gf_components_have_positive_stable_bottom() {
        for c in [Component::BinaryTree, Component::ExpRay] {
            let s = spectral_sweep(c, &DEPTHS).unwrap();
            assert!(s.extrapolated.iter().all(|&x| x > 0.0), "{s:?}");
            assert!(s.spread() < 0.1, "{s:?}");
        }
    }
}
