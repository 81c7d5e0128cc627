//! Ping-pong certificates for Schottky-type presentations.
//!
//! Each letter `s` owns a closed boundary disk `D_s`; the disks are pairwise
//! disjoint and `s` maps the complement of `D_{s^-1}` onto `D_s`. Writing
//! `H_s` for the closed half-space over `D_s`, every reduced word starting
//! with `s` moves the basepoint `j` into `H_s`, and reduced words nest these
//! half-spaces. Two consequences are used:
//!
//! * every descendant of `w s` in the word tree moves `j` into `w H_s`, which
//!   bounds the whole subtree from below;
//! * a reduced word of length `n >= 1` satisfies
//!   `d(j, w j) >= entry + (n - 1) gap`, where `entry = min_s d(j, H_s)` and
//!   `gap` is the least distance between the planes `dH_s` and `s dH_{s'}`.

use num_complex::Complex64;

use super::presentation::Letter;
use crate::error::{Error, Result};
use crate::hyperbolic::{BoundaryDisk, Isometry, PointH3};

const CIRCLE_MATCH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PingPong {
    disks: Vec<BoundaryDisk>,
    gap: f64,
    entry: f64,
    letters: usize,
}

impl PingPong {
    /// Uncertified disks in letter order; [`PingPong::certify`] fills in the constants.
    pub fn new(disks: Vec<BoundaryDisk>) -> Result<Self> {
        if disks.iter().any(|d| !(d.radius > 0.0 && d.radius.is_finite())) {
            return Err(Error::InvalidCertificate("disk radii must be positive".into()));
        }
        let letters = disks.len();
        Ok(Self { disks, gap: f64::NAN, entry: f64::NAN, letters })
    }

    /// Disks for `diag(e^{l/2}, e^{-l/2})` with letters `[a, a^-1]`.
    pub fn cyclic_axial(length: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(vec![
            BoundaryDisk::exterior(zero, (0.5 * length).exp()),
            BoundaryDisk::interior(zero, (-0.5 * length).exp()),
        ])
        .expect("positive radii")
    }

    /// Disks for the builtin Schottky group, letters `[a, b, a^-1, b^-1]`
    /// with `b = rot a rot^-1`.
    pub fn schottky(length: f64, rot: &Isometry) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let da = BoundaryDisk::exterior(zero, (0.5 * length).exp());
        let da_inv = BoundaryDisk::interior(zero, (-0.5 * length).exp());
        let db = da.image(rot).ok_or_else(|| Error::InvalidCertificate("rotated disk is a half-plane".into()))?;
        let db_inv =
            da_inv.image(rot).ok_or_else(|| Error::InvalidCertificate("rotated disk is a half-plane".into()))?;
        Self::new(vec![da, db, da_inv, db_inv])
    }

    pub fn disks(&self) -> &[BoundaryDisk] {
        &self.disks
    }

    /// Least plane-to-plane distance between consecutive nested half-spaces.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// `min_s d(j, H_s)`.
    pub fn entry(&self) -> f64 {
        self.entry
    }

    /// Checks the ping-pong conditions against `letters` and computes the
    /// gap and entry constants.
    pub fn certify(mut self, letters: &[Letter]) -> Result<Self> {
        if self.disks.len() != letters.len() {
            return Err(Error::InvalidCertificate(format!("{} disks for {} letters", self.disks.len(), letters.len())));
        }
        for i in 0..self.disks.len() {
            for k in (i + 1)..self.disks.len() {
                if !closed_disjoint(&self.disks[i], &self.disks[k]) {
                    return Err(Error::InvalidCertificate(format!(
                        "disks of {} and {} overlap",
                        letters[i].label, letters[k].label
                    )));
                }
            }
        }
        let j = PointH3::basepoint();
        for (s, letter) in letters.iter().enumerate() {
            let inv = letter.inverse;
            let image = self.disks[inv]
                .image(&letter.matrix)
                .ok_or_else(|| Error::InvalidCertificate(format!("{} maps a disk to a half-plane", letter.label)))?;
            let target = self.disks[s];
            let same_circle = (image.center - target.center).norm() <= CIRCLE_MATCH * (1.0 + target.radius)
                && (image.radius - target.radius).abs() <= CIRCLE_MATCH * (1.0 + target.radius);
            if !same_circle || image.exterior == target.exterior {
                return Err(Error::InvalidCertificate(format!(
                    "{} does not map the complement of its inverse disk onto its own disk",
                    letter.label
                )));
            }
            if self.disks[s].half_space_contains(&j) {
                return Err(Error::InvalidCertificate(format!("basepoint lies over the disk of {}", letter.label)));
            }
        }

        let mut gap = f64::INFINITY;
        for (s, letter) in letters.iter().enumerate() {
            for (t, _) in letters.iter().enumerate() {
                if t == letter.inverse {
                    continue;
                }
                let nested = self.disks[t].image(&letter.matrix).ok_or_else(|| {
                    Error::InvalidCertificate(format!("{} maps a disk to a half-plane", letter.label))
                })?;
                let d = self.disks[s]
                    .plane_distance(&nested)
                    .ok_or_else(|| Error::InvalidCertificate(format!("nested planes of {} intersect", letter.label)))?;
                gap = gap.min(d);
            }
        }
        if !(gap > 0.0) {
            return Err(Error::InvalidCertificate("zero gap between nested half-spaces".into()));
        }
        self.gap = gap;
        self.entry = self.disks.iter().map(|d| d.half_space_distance(&j)).fold(f64::INFINITY, f64::min);
        self.letters = letters.len();
        Ok(self)
    }

    /// Whether `p` lies outside every closed half-space `H_s`.
    pub fn outside_all(&self, p: &PointH3) -> bool {
        self.disks.iter().all(|d| !d.half_space_contains(p))
    }

    /// Longest reduced word length `n` whose lower bound
    /// `entry + (n-1) gap` does not exceed `rho_j`; `None` if no nonempty word fits.
    pub fn max_word_length(&self, rho_j: f64) -> Option<u64> {
        if rho_j < self.entry {
            None
        } else {
            Some(1 + ((rho_j - self.entry) / self.gap).floor() as u64)
        }
    }

    /// Lower bound on `d(j, w j)` over reduced words of length `n >= 1`.
    pub fn displacement_floor(&self, n: u64) -> f64 {
        self.entry + (n.saturating_sub(1)) as f64 * self.gap
    }

    /// Natural log of the number of reduced words of length `n`.
    pub fn ln_words_of_length(&self, n: u64) -> f64 {
        let l = self.letters as f64;
        match n {
            0 => 0.0,
            _ if self.letters <= 1 => 0.0,
            _ => l.ln() + (n - 1) as f64 * (l - 1.0).ln(),
        }
    }
}

fn closed_disjoint(p: &BoundaryDisk, q: &BoundaryDisk) -> bool {
    let sep = (p.center - q.center).norm();
    match (p.exterior, q.exterior) {
        (false, false) => sep > p.radius + q.radius,
        (false, true) => sep + p.radius < q.radius,
        (true, false) => sep + q.radius < p.radius,
        (true, true) => false,
    }
}
