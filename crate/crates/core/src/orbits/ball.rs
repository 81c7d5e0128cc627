//! The orbital step function `rho -> N(x, y, rho)` and its diagnostics.

use std::fmt::Write as _;

use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::hyperbolic::{Isometry, PointH3};

/// Sorted distances `d(x, g y) <= radius`, one per group element.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitBall {
    pub x: PointH3,
    pub y: PointH3,
    pub radius: f64,
    pub distances: Vec<f64>,
    /// Elements parallel to `distances`.
    pub elements: Vec<Isometry>,
    /// One reduced word per element, as letter indices.
    pub words: Option<Vec<Vec<u16>>>,
    /// Every element within `radius` is present.
    pub complete: bool,
    /// Letter labels the words refer to.
    pub letters: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentEstimate {
    pub value: f64,
    /// Two standard errors of the slope.
    pub band: f64,
    pub rms: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughDecrease {
    /// `sup Ñ(rho2) / Ñ(rho1)` over `rho0 <= rho1 <= rho2 <= R`.
    pub ratio: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl OrbitBall {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        x: PointH3,
        y: PointH3,
        radius: f64,
        distances: Vec<f64>,
        elements: Vec<Isometry>,
        words: Option<Vec<Vec<u16>>>,
        complete: bool,
        letters: Vec<String>,
    ) -> Self {
        Self { x, y, radius, distances, elements, words, complete, letters }
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::IncompleteBall { elements: self.len() })
        }
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        self.require_complete()?;
        if rho.is_nan() || rho > self.radius {
            return Err(Error::RadiusOutOfRange { rho, radius: self.radius });
        }
        Ok(())
    }

    /// Number of entries `<= rho`.
    pub fn orbital_count(&self, rho: f64) -> Result<usize> {
        self.check_rho(rho)?;
        Ok(self.count_unchecked(rho))
    }

    pub(crate) fn count_unchecked(&self, rho: f64) -> usize {
        self.distances.partition_point(|&d| d <= rho)
    }

    /// `N(rho) e^{-2 rho}`.
    pub fn averaged_orbital(&self, rho: f64) -> Result<f64> {
        Ok(self.orbital_count(rho)? as f64 * (-2.0 * rho).exp())
    }

    /// The sub-ball of radius `rho <= radius`.
    pub fn restrict_radius(&self, rho: f64) -> Result<Self> {
        if rho.is_nan() || rho > self.radius {
            return Err(Error::RadiusOutOfRange { rho, radius: self.radius });
        }
        let n = self.count_unchecked(rho);
        Ok(Self {
            x: self.x,
            y: self.y,
            radius: rho,
            distances: self.distances[..n].to_vec(),
            elements: self.elements[..n].to_vec(),
            words: self.words.as_ref().map(|w| w[..n].to_vec()),
            complete: self.complete,
            letters: self.letters.clone(),
        })
    }

    /// Slope of `ln N` against `rho` on a 65-point grid over `[R/2, R]`.
    pub fn critical_exponent_estimate(&self) -> Result<ExponentEstimate> {
        self.require_complete()?;
        if self.is_empty() || !(self.radius > 0.0) {
            return Err(Error::TooFewPoints { needed: 2, have: self.len() });
        }
        let lo = 0.5 * self.radius;
        let first = self.distances[0];
        let lo = lo.max(first);
        if !(self.radius - lo > 0.0) {
            return Err(Error::TooFewPoints { needed: 2, have: 1 });
        }
        const GRID: usize = 65;
        let rho: Vec<f64> = (0..GRID).map(|i| lo + (self.radius - lo) * i as f64 / (GRID - 1) as f64).collect();
        let ln_n: Vec<f64> = rho.iter().map(|&r| (self.count_unchecked(r) as f64).ln()).collect();
        let fit = linear_fit(&rho, &ln_n)?;
        Ok(ExponentEstimate { value: fit.slope, band: 2.0 * fit.slope_stderr, rms: fit.rms, window: (lo, self.radius) })
    }

    /// Largest increase of `Ñ` over the jump grid beyond `rho0`.
    pub fn rough_decrease_report(&self, rho0: f64) -> Result<RoughDecrease> {
        self.check_rho(rho0)?;
        let tilde = |count: usize, rho: f64| count as f64 * (-2.0 * rho).exp();
        let mut best = RoughDecrease { ratio: 1.0, rho1: rho0, rho2: rho0 };
        let mut count = self.count_unchecked(rho0);
        let mut min_val = tilde(count, rho0);
        let mut min_at = rho0;
        let mut i = count;
        while i < self.len() {
            let d = self.distances[i];
            // left limit just before the jump
            let before = tilde(count, d);
            if before < min_val {
                min_val = before;
                min_at = d;
            }
            while i < self.len() && self.distances[i] == d {
                i += 1;
            }
            count = i;
            let after = tilde(count, d);
            if min_val > 0.0 && after / min_val > best.ratio {
                best = RoughDecrease { ratio: after / min_val, rho1: min_at, rho2: d };
            }
        }
        Ok(best)
    }

    /// Elements whose word lies in the kernel of the group's homomorphism.
    pub fn kernel_restrict(&self, group: &GroupPresentation) -> Result<Self> {
        let words = self.words.as_ref().ok_or(Error::MissingWords)?;
        let letters = group.letters();
        if letters.len() != self.letters.len() || letters.iter().zip(&self.letters).any(|(l, s)| &l.label != s) {
            return Err(Error::InvalidPresentation("presentation letters differ from the ball's".into()));
        }
        let rank =
            group.hom_rank().ok_or_else(|| Error::InvalidPresentation("presentation has no homomorphism".into()))?;
        let keep: Vec<bool> = words
            .iter()
            .map(|w| {
                let mut v = vec![0i64; rank];
                for &s in w {
                    let h = letters[s as usize].hom.as_ref().expect("hom on every letter");
                    for (acc, e) in v.iter_mut().zip(h) {
                        *acc += e;
                    }
                }
                v.iter().all(|&e| e == 0)
            })
            .collect();
        let pick = |i: &usize| keep[*i];
        let idx: Vec<usize> = (0..self.len()).filter(pick).collect();
        Ok(Self {
            x: self.x,
            y: self.y,
            radius: self.radius,
            distances: idx.iter().map(|&i| self.distances[i]).collect(),
            elements: idx.iter().map(|&i| self.elements[i]).collect(),
            words: Some(idx.iter().map(|&i| words[i].clone()).collect()),
            complete: self.complete,
            letters: self.letters.clone(),
        })
    }

    /// `rho_jump,count` rows, one per element.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rho_jump,count\n");
        for (i, d) in self.distances.iter().enumerate() {
            let _ = writeln!(s, "{d},{}", i + 1);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::enumerate::{enumerate_ball, EnumerationConfig};
    use crate::orbits::presentation::Builtin;
    use std::collections::BTreeMap;

    fn cyclic_ball(r: f64) -> OrbitBall {
        let g = Builtin::Cyclic { length: 1.0 }.presentation().unwrap();
        let j = PointH3::basepoint();
        enumerate_ball(&g, &j, &j, r, &EnumerationConfig::default().with_words()).unwrap()
    }

    #[test]
    fn counting_examples() {
        let b = cyclic_ball(5.5);
        assert_eq!(b.orbital_count(2.5).unwrap(), 5);
        assert_eq!(b.orbital_count(0.0).unwrap(), 1);
        assert!(matches!(b.orbital_count(6.0), Err(Error::RadiusOutOfRange { .. })));
        assert!((b.averaged_orbital(5.0).unwrap() - 11.0 * (-10f64).exp()).abs() < 1e-18);
        assert_eq!(b.averaged_orbital(0.0).unwrap(), 1.0);
    }

    #[test]
    fn cyclic_exponent_near_zero() {
        let e = cyclic_ball(20.0).critical_exponent_estimate().unwrap();
        assert!(e.value.abs() <= 0.15, "{e:?}");
        let t = Builtin::Trivial.presentation().unwrap();
        let j = PointH3::basepoint();
        let b = enumerate_ball(&t, &j, &j, 20.0, &EnumerationConfig::default()).unwrap();
        assert_eq!(b.critical_exponent_estimate().unwrap().value, 0.0);
    }

    #[test]
    fn rough_decrease_matches_pair_scan() {
        let b = cyclic_ball(8.0);
        let rho0 = 1.0;
        let rep = b.rough_decrease_report(rho0).unwrap();
        // exhaustive scan over jump points and their left limits
        let mut pts = vec![rho0];
        for &d in &b.distances {
            if d - 1e-12 >= rho0 {
                pts.push(d);
                pts.push(d - 1e-12);
            }
        }
        let nt = |r: f64| b.count_unchecked(r) as f64 * (-2.0 * r).exp();
        let mut sup: f64 = 1.0;
        for &p in &pts {
            for &q in &pts {
                if p <= q {
                    sup = sup.max(nt(q) / nt(p));
                }
            }
        }
        assert!((rep.ratio - sup).abs() < 1e-9 * sup, "{} vs {}", rep.ratio, sup);
        // flat windows only decrease
        let t = Builtin::Trivial.presentation().unwrap();
        let j = PointH3::basepoint();
        let flat = enumerate_ball(&t, &j, &j, 4.0, &EnumerationConfig::default()).unwrap();
        assert_eq!(flat.rough_decrease_report(0.0).unwrap().ratio, 1.0);
    }

    #[test]
    fn kernel_of_cyclic_hom_is_identity() {
        let g = Builtin::Cyclic { length: 1.0 }.presentation().unwrap();
        let b = cyclic_ball(6.0);
        let hom: BTreeMap<String, Vec<i64>> = [("a".to_string(), vec![1])].into();
        let k = b.kernel_restrict(&g.with_hom(hom).unwrap()).unwrap();
        assert_eq!(k.distances, vec![0.0]);
        let zero: BTreeMap<String, Vec<i64>> = [("a".to_string(), vec![0])].into();
        assert_eq!(b.kernel_restrict(&g.with_hom(zero).unwrap()).unwrap().len(), b.len());
    }

    #[test]
    fn free_group_kernel_matches_word_filter() {
        let g = Builtin::Schottky { length: 3.0 }.presentation().unwrap();
        let j = PointH3::basepoint();
        let b = enumerate_ball(&g, &j, &j, 10.0, &EnumerationConfig::default().with_words()).unwrap();
        let hom: BTreeMap<String, Vec<i64>> = [("a".to_string(), vec![1]), ("b".to_string(), vec![0])].into();
        let k = b.kernel_restrict(&g.with_hom(hom).unwrap()).unwrap();
        // a-exponent sum by label
        let expected = b
            .words
            .as_ref()
            .unwrap()
            .iter()
            .filter(|w| {
                let s: i64 = w
                    .iter()
                    .map(|&l| match b.letters[l as usize].as_str() {
                        "a" => 1,
                        "a^-1" => -1,
                        _ => 0,
                    })
                    .sum();
                s == 0
            })
            .count();
        assert_eq!(k.len(), expected);
        assert!(k.len() > 1);
        assert!(cyclic_ball(2.0).restrict_radius(1.0).unwrap().kernel_restrict(&g).is_err());
    }

    #[test]
    fn csv_has_one_row_per_element() {
        let b = cyclic_ball(10.0);
        assert_eq!(b.to_csv().lines().count(), 22);
    }
}
