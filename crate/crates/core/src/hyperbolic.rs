//! Upper half-space model of H3.
//!
//! Points are `(x1, x2, h)` with `h > 0`; orientation-preserving isometries are
//! unit-determinant 2x2 complex matrices acting by the quaternionic extension
//! of the Möbius action on the boundary plane.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Determinant drift tolerated after composition.
pub const DET_TOLERANCE: f64 = 1e-10;
/// Entries below this modulus are skipped when fixing the projective sign.
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// `acosh(1 + u)` for `u >= 0` without cancellation near zero.
#[inline]
pub fn acosh1p(u: f64) -> f64 {
    let u = u.max(0.0);
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}

/// Volume of a hyperbolic ball of radius `r` in H3: `pi (sinh 2r - 2r)`.
pub fn ball_volume(r: f64) -> f64 {
    if r < 1e-3 {
        // sinh(2r) - 2r = (2r)^3/6 + (2r)^5/120 + ...
        let s = 2.0 * r;
        std::f64::consts::PI * s.powi(3) / 6.0 * (1.0 + s * s / 20.0 + s.powi(4) / 840.0)
    } else {
        std::f64::consts::PI * ((2.0 * r).sinh() - 2.0 * r)
    }
}

/// Natural log of [`ball_volume`], finite for radii where the volume overflows.
pub fn ln_ball_volume(r: f64) -> f64 {
    if r < 20.0 {
        ball_volume(r).ln()
    } else {
        // pi/2 e^{2r} (1 - e^{-4r} - 4r e^{-2r})
        std::f64::consts::PI.ln() - std::f64::consts::LN_2
            + 2.0 * r
            + (-(-4.0 * r).exp() - 4.0 * r * (-2.0 * r).exp()).ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointH3 {
    pub x1: f64,
    pub x2: f64,
    pub h: f64,
}

impl PointH3 {
    pub fn new(x1: f64, x2: f64, h: f64) -> Result<Self> {
        if !(x1.is_finite() && x2.is_finite() && h.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinates ({x1}, {x2}, {h})")));
        }
        if h <= 0.0 {
            return Err(Error::InvalidPoint(format!("height must be positive, got {h}")));
        }
        Ok(Self { x1, x2, h })
    }

    /// The basepoint `j = (0, 0, 1)`.
    pub const fn basepoint() -> Self {
        Self { x1: 0.0, x2: 0.0, h: 1.0 }
    }

    fn horizontal(&self) -> Complex64 {
        Complex64::new(self.x1, self.x2)
    }
}

impl fmt::Display for PointH3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.h)
    }
}

/// Hyperbolic distance in the upper half-space model.
pub fn dist(p: &PointH3, q: &PointH3) -> f64 {
    let dx = p.x1 - q.x1;
    let dy = p.x2 - q.x2;
    let dh = p.h - q.h;
    acosh1p((dx * dx + dy * dy + dh * dh) / (2.0 * p.h * q.h))
}

/// A unit-determinant complex matrix `[[a, b], [c, d]]` in canonical sign form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Isometry {
    pub const IDENTITY: Self = Self {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };

    /// Builds an isometry from raw entries, rescaling to unit determinant and
    /// fixing the sign.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let entries = [a, b, c, d];
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidIsometry("non-finite entry".into()));
        }
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::InvalidIsometry("singular matrix".into()));
        }
        Ok(Self { a, b, c, d }.normalized())
    }

    /// Real-entry convenience constructor.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// Loxodromic `diag(e^{l/2}, e^{-l/2})` translating along the vertical axis by `l`.
    pub fn axial_translation(length: f64) -> Self {
        let s = (0.5 * length).exp();
        Self {
            a: Complex64::new(s, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0 / s, 0.0),
        }
        .canonical()
    }

    /// Rotation by `angle` about the vertical axis through the origin.
    pub fn axial_rotation(angle: f64) -> Self {
        let half = Complex64::from_polar(1.0, 0.5 * angle);
        Self { a: half, b: Complex64::new(0.0, 0.0), c: Complex64::new(0.0, 0.0), d: half.conj() }.canonical()
    }

    /// Parabolic `z -> z + tau`.
    pub fn parabolic(tau: Complex64) -> Self {
        Self { a: Complex64::new(1.0, 0.0), b: tau, c: Complex64::new(0.0, 0.0), d: Complex64::new(1.0, 0.0) }
            .canonical()
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn scale(self, k: Complex64) -> Self {
        Self { a: self.a * k, b: self.b * k, c: self.c * k, d: self.d * k }
    }

    /// Divides by a square root of the determinant, then canonicalizes.
    pub fn normalized(self) -> Self {
        let det = self.det();
        let unit = (det - Complex64::new(1.0, 0.0)).norm() <= 1e-15;
        let g = if unit { self } else { self.scale(det.sqrt().inv()) };
        g.canonical()
    }

    /// Fixes the projective sign: the first entry of modulus above
    /// [`SIGN_THRESHOLD`] gets argument in `(-pi/2, pi/2]`.
    pub fn canonical(self) -> Self {
        for z in self.entries() {
            if z.norm() > SIGN_THRESHOLD {
                let right_half = z.re > 0.0 || (z.re == 0.0 && z.im > 0.0);
                return if right_half { self } else { self.scale(Complex64::new(-1.0, 0.0)) };
            }
        }
        self
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    /// Product `self * other`, re-normalized.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .normalized()
    }

    pub fn conjugate_by(&self, m: &Self) -> Self {
        m.compose(self).compose(&m.inverse())
    }

    /// Möbius action on H3.
    pub fn apply(&self, p: &PointH3) -> PointH3 {
        let z = p.horizontal();
        let w = self.c * z + self.d;
        let h2 = p.h * p.h;
        let denom = w.norm_sqr() + self.c.norm_sqr() * h2;
        let num = (self.a * z + self.b) * w.conj() + self.a * self.c.conj() * h2;
        let z_new = num / denom;
        PointH3 { x1: z_new.re, x2: z_new.im, h: p.h / denom }
    }

    /// Möbius action on the boundary plane. Returns `None` for the point at infinity.
    pub fn apply_boundary(&self, z: Complex64) -> Option<Complex64> {
        let w = self.c * z + self.d;
        if w.norm() < 1e-300 {
            None
        } else {
            Some((self.a * z + self.b) / w)
        }
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sqr(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `d(j, g j)` with `j = (0,0,1)`, from `cosh d = |g|_F^2 / 2`.
    ///
    /// Uses `|g|_F^2 - 2 = |a - conj d|^2 + |b + conj c|^2`, valid for unit
    /// determinant, which avoids cancellation near the identity and is exactly
    /// symmetric under inversion.
    pub fn displacement(&self) -> f64 {
        let u = (self.a - self.d.conj()).norm_sqr() + (self.b + self.c.conj()).norm_sqr();
        acosh1p(0.5 * u)
    }

    /// Largest entry modulus difference to `other`, up to the projective sign.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let plus = self.entries().iter().zip(other.entries()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        let minus = self.entries().iter().zip(other.entries()).map(|(p, q)| (p + q).norm()).fold(0.0, f64::max);
        plus.min(minus)
    }

    /// Lexicographic order on `(a.re, a.im, b.re, ..., d.im)`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for (p, q) in self.entries().iter().zip(other.entries()) {
            let o = p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

/// `d(j, g j)`.
pub fn displacement(g: &Isometry) -> f64 {
    g.displacement()
}

/// A round disk on the boundary sphere: the interior of a circle, or its
/// exterior together with the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDisk {
    pub center: Complex64,
    pub radius: f64,
    pub exterior: bool,
}

impl BoundaryDisk {
    pub fn interior(center: Complex64, radius: f64) -> Self {
        Self { center, radius, exterior: false }
    }

    pub fn exterior(center: Complex64, radius: f64) -> Self {
        Self { center, radius, exterior: true }
    }

    /// Whether the boundary point `z` (finite) lies in the closed disk.
    pub fn contains_boundary(&self, z: Complex64) -> bool {
        let r = (z - self.center).norm();
        if self.exterior {
            r >= self.radius
        } else {
            r <= self.radius
        }
    }

    fn signed_power(&self, p: &PointH3) -> f64 {
        let dz = p.horizontal() - self.center;
        dz.norm_sqr() + p.h * p.h - self.radius * self.radius
    }

    /// Whether `p` lies in the closed half-space bounded by the hemisphere over
    /// this disk's circle, on the disk's side.
    pub fn half_space_contains(&self, p: &PointH3) -> bool {
        let s = self.signed_power(p);
        if self.exterior {
            s >= 0.0
        } else {
            s <= 0.0
        }
    }

    /// Hyperbolic distance from `p` to the closed half-space over this disk.
    pub fn half_space_distance(&self, p: &PointH3) -> f64 {
        if self.half_space_contains(p) {
            0.0
        } else {
            (self.signed_power(p).abs() / (2.0 * self.radius * p.h)).asinh()
        }
    }

    /// Distance between the bounding planes of two disks with disjoint circles.
    /// Returns `None` when the circles intersect.
    pub fn plane_distance(&self, other: &Self) -> Option<f64> {
        let (r1, r2) = (self.radius, other.radius);
        let c = (self.center - other.center).norm_sqr();
        let inversive = (r1 * r1 + r2 * r2 - c).abs() / (2.0 * r1 * r2);
        if inversive < 1.0 {
            None
        } else {
            Some(inversive.acosh())
        }
    }

    /// Image of the disk under a Möbius map, when the image circle is finite.
    pub fn image(&self, g: &Isometry) -> Option<Self> {
        let c = self.center;
        let r = self.radius;
        let on = [c + Complex64::new(r, 0.0), c + Complex64::new(0.0, r), c - Complex64::new(r, 0.0)];
        let imgs = [g.apply_boundary(on[0])?, g.apply_boundary(on[1])?, g.apply_boundary(on[2])?];
        let (center, radius) = circumcircle(imgs[0], imgs[1], imgs[2])?;
        // Decide the side by following a point inside the source disk.
        let probe = if self.exterior { c + Complex64::new(2.0 * r + 1.0, 0.0) } else { c };
        let image_probe = g.apply_boundary(probe);
        let inside_image = match image_probe {
            None => false,
            Some(w) => (w - center).norm() < radius,
        };
        Some(Self { center, radius, exterior: !inside_image })
    }
}

fn circumcircle(p: Complex64, q: Complex64, r: Complex64) -> Option<(Complex64, f64)> {
    let (ax, ay) = (p.re, p.im);
    let (bx, by) = (q.re, q.im);
    let (cx, cy) = (r.re, r.im);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let scale = (p - q).norm().max((q - r).norm()).max(1.0);
    if d.abs() < 1e-14 * scale * scale {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = Complex64::new(ux, uy);
    Some((center, (p - center).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn point_invariants() {
        assert!(PointH3::new(0.0, 0.0, 0.0).is_err());
        assert!(PointH3::new(0.0, f64::NAN, 1.0).is_err());
        assert!(PointH3::new(1.0, 2.0, 0.5).is_ok());
    }

    #[test]
    fn compose_laws() {
        let t = Isometry::real(1.0, 1.0, 0.0, 1.0).unwrap();
        let g = Isometry::new(
            Complex64::new(1.2, 0.3),
            Complex64::new(-0.4, 2.0),
            Complex64::new(0.1, -0.7),
            Complex64::new(0.9, 0.2),
        )
        .unwrap();
        assert!(Isometry::IDENTITY.compose(&g).projective_distance(&g) < 1e-14);
        assert!(g.compose(&g.inverse()).projective_distance(&Isometry::IDENTITY) < 1e-13);
        let t2 = t.compose(&t);
        assert_eq!(t2, Isometry::real(1.0, 2.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn apply_examples() {
        let p = PointH3::new(0.3, -0.2, 0.7).unwrap();
        assert_eq!(Isometry::IDENTITY.apply(&p), p);
        let q = Isometry::axial_translation(1.0).apply(&PointH3::basepoint());
        assert!(close(q.h, std::f64::consts::E, 1e-15) && q.x1 == 0.0 && q.x2 == 0.0);
        let t = Isometry::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(t.apply(&PointH3::basepoint()), PointH3::new(1.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn dist_examples() {
        let j = PointH3::basepoint();
        assert_eq!(dist(&j, &j), 0.0);
        let e = PointH3::new(0.0, 0.0, std::f64::consts::E).unwrap();
        assert!(close(dist(&j, &e), 1.0, 1e-15));
        // extended-precision value of acosh(3/2)
        let side = PointH3::new(1.0, 0.0, 1.0).unwrap();
        assert!(close(dist(&j, &side), 0.962_423_650_119_206_9, 1e-15));
    }

    #[test]
    fn displacement_examples() {
        assert_eq!(Isometry::IDENTITY.displacement(), 0.0);
        assert!(close(Isometry::axial_translation(1.0).displacement(), 1.0, 1e-15));
        let t = Isometry::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(close(t.displacement(), 0.962_423_650_119_206_9, 1e-15));
        let j = PointH3::basepoint();
        assert!(close(t.displacement(), dist(&j, &t.apply(&j)), 1e-15));
    }

    #[test]
    fn canonical_sign_rule() {
        let g = Isometry { a: Complex64::new(-1.0, 0.0), ..Isometry::IDENTITY };
        let g = Isometry { d: Complex64::new(-1.0, 0.0), ..g }.canonical();
        assert_eq!(g, Isometry::IDENTITY);
        // first significant entry purely imaginary: positive imaginary part kept
        let h = Isometry {
            a: Complex64::new(0.0, -1.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(0.0, 1.0),
        }
        .canonical();
        assert_eq!(h.a, Complex64::new(0.0, 1.0));
        assert!(h.is_canonical());
    }

    #[test]
    fn half_space_distance_concentric() {
        let disk = BoundaryDisk::interior(Complex64::new(0.0, 0.0), 0.5);
        let j = PointH3::basepoint();
        assert!(close(disk.half_space_distance(&j), 2f64.ln(), 1e-15));
        let outer = BoundaryDisk::exterior(Complex64::new(0.0, 0.0), 4.0);
        assert!(close(outer.half_space_distance(&j), 4f64.ln(), 1e-15));
        assert!(close(disk.plane_distance(&outer).unwrap(), 8f64.ln(), 1e-14));
    }

    #[test]
    fn disk_image_under_dilation() {
        let g = Isometry::axial_translation(2.0);
        let disk = BoundaryDisk::exterior(Complex64::new(0.0, 0.0), 1.0);
        let img = disk.image(&g).unwrap();
        assert!(img.exterior);
        assert!(close(img.radius, 2f64.exp(), 1e-12));
        assert!(img.center.norm() < 1e-12);
    }

    #[test]
    fn ball_volume_branches_agree() {
        let r = 1e-3;
        let series = ball_volume(r * (1.0 - 1e-12));
        let direct = std::f64::consts::PI * ((2.0 * r).sinh() - 2.0 * r);
        assert!(((series - direct) / direct).abs() < 1e-6);
        assert!(close(ball_volume(20.0).ln(), ln_ball_volume(20.0), 1e-12));
    }
}
