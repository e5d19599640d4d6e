//! Quaternion arithmetic and the sphere/slice geometry of ℍ.
//!
//! A quaternion `q = w + x i + y j + z k` determines the 2-sphere
//! `[q] = Re(q) + S |Im(q)|`. Spheres are handled through their image under
//! `psi(q) = (Re q, |Im q|)` in the closed upper half-plane, so every
//! sphere-level computation reduces to planar geometry.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One element of ℍ. Serialized as `[w, x, y, z]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Quaternion::real(r)
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion {
        w: 0.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const ONE: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const I: Quaternion = Quaternion {
        w: 0.0,
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const J: Quaternion = Quaternion {
        w: 0.0,
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const K: Quaternion = Quaternion {
        w: 0.0,
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(r: f64) -> Self {
        Quaternion {
            w: r,
            x: 0.0,
            y: 0.0,
            z: 0.0,
        }
    }

    /// Splits `q = alpha + beta j` with `alpha, beta` in the slice ℂ_i.
    pub fn to_complex_pair(self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.w, self.x),
            Complex64::new(self.y, self.z),
        )
    }

    /// Inverse of [`Quaternion::to_complex_pair`].
    pub fn from_complex_pair(alpha: Complex64, beta: Complex64) -> Self {
        Quaternion::new(alpha.re, alpha.im, beta.re, beta.im)
    }

    /// Embeds `a + b i` from ℂ_i.
    pub fn from_complex(z: Complex64) -> Self {
        Quaternion::new(z.re, z.im, 0.0, 0.0)
    }

    pub fn re(self) -> f64 {
        self.w
    }

    pub fn im(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn is_real(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    /// `q⁻¹ = q̄ / |q|²`.
    pub fn inv(self) -> Result<Quaternion> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::Domain("zero quaternion".into()));
        }
        Ok(self.conj() * (1.0 / n2))
    }

    /// Unit imaginary direction `I_q`; `None` for real quaternions.
    pub fn imaginary_unit(self) -> Option<SliceUnit> {
        let r = self.im_norm();
        if r == 0.0 {
            None
        } else {
            Some(SliceUnit {
                x: self.x / r,
                y: self.y / r,
                z: self.z / r,
            })
        }
    }

    /// `h q h⁻¹`, a point of the same sphere `[q]`.
    pub fn conjugate_by(self, h: Quaternion) -> Result<Quaternion> {
        Ok(h * self * h.inv()?)
    }

    pub fn powi(self, k: u32) -> Quaternion {
        (0..k).fold(Quaternion::ONE, |acc, _| acc * self)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:+.6}{:+.6}i{:+.6}j{:+.6}k",
            self.w, self.x, self.y, self.z
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: f64) -> Quaternion {
        Quaternion::new(self.w * r, self.x * r, self.y * r, self.z * r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, r: f64) -> Quaternion {
        self * (1.0 / r)
    }
}

pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn qnormsq(q: Quaternion) -> f64 {
    q.norm_sqr()
}

pub fn qinv(q: Quaternion) -> Result<Quaternion> {
    q.inv()
}

/// Canonical coordinates `(u, v) = (Re q, |Im q|)` of a sphere `[q]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub u: f64,
    pub v: f64,
}

impl SpherePoint {
    /// Builds a point, folding a negative `v` back into the half-plane.
    pub fn new(u: f64, v: f64) -> Self {
        SpherePoint { u, v: v.abs() }
    }

    pub fn is_real(&self) -> bool {
        self.v == 0.0
    }

    /// Canonical representative `u + i v` as an element of ℂ_i.
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    /// Canonical representative `u + i v` in ℍ.
    pub fn canonical(&self) -> Quaternion {
        Quaternion::new(self.u, self.v, 0.0, 0.0)
    }

    /// Planar distance between the two Ψ-images.
    pub fn planar_distance(&self, other: &SpherePoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.9}, {:.9})", self.u, self.v)
    }
}

/// A unit purely imaginary quaternion `I ∈ S`, fixing the slice ℂ_I = ℝ + Iℝ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceUnit {
    x: f64,
    y: f64,
    z: f64,
}

impl Default for SliceUnit {
    fn default() -> Self {
        SliceUnit::I
    }
}

impl SliceUnit {
    pub const I: SliceUnit = SliceUnit {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const J: SliceUnit = SliceUnit {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const K: SliceUnit = SliceUnit {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes `(x, y, z)`; fails on the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(
                "slice unit needs a nonzero finite imaginary part".into(),
            ));
        }
        Ok(SliceUnit {
            x: x / r,
            y: y / r,
            z: z / r,
        })
    }

    pub fn as_quaternion(&self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    /// Maps `a + b i ∈ ℂ` to `a + b I ∈ ℂ_I`.
    pub fn embed(&self, z: Complex64) -> Quaternion {
        Quaternion::new(z.re, z.im * self.x, z.im * self.y, z.im * self.z)
    }
}

pub fn psi(q: Quaternion) -> SpherePoint {
    SpherePoint {
        u: q.re(),
        v: q.im_norm(),
    }
}

/// `u + I v`; `psi(slice_embed(p, I)) == p`.
pub fn slice_embed(p: SpherePoint, slice: SliceUnit) -> Quaternion {
    slice.embed(Complex64::new(p.u, p.v))
}

/// Distance between the spheres `[a]` and `[b]` as subsets of ℍ.
///
/// Evaluated as the minimum over the four slice representatives
/// `u_a ± i v_a`, `u_b ± i v_b`.
pub fn sphere_distance(a: SpherePoint, b: SpherePoint) -> f64 {
    let mut best = f64::INFINITY;
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            let d = (a.u - b.u).hypot(sa * a.v - sb * b.v);
            best = best.min(d);
        }
    }
    best
}

pub fn same_sphere(p: Quaternion, q: Quaternion, tol: f64) -> bool {
    psi(p).planar_distance(&psi(q)) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn hamilton_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(k * i, j);
        assert_eq!(i * k, -j);
        assert_eq!(j * k, i);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(i * j * k, -Quaternion::ONE);
    }

    #[test]
    fn products_and_identity() {
        let q = Quaternion::new(2.0, 3.0, -1.0, 0.5);
        assert_eq!(q * Quaternion::ONE, q);
        let a = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let b = Quaternion::new(1.0, -1.0, 0.0, 0.0);
        assert_eq!(a * b, Quaternion::real(2.0));
    }

    #[test]
    fn conj_and_inverse() {
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(q.conj(), Quaternion::new(1.0, -1.0, -1.0, -1.0));
        assert_eq!(Quaternion::J.inv().unwrap(), -Quaternion::J);
        let q = Quaternion::new(2.0, 3.0, 0.0, -1.0);
        assert!(close(q.inv().unwrap() * q, Quaternion::ONE, 1e-15));
        assert!(close(q * q.inv().unwrap(), Quaternion::ONE, 1e-15));
        assert!(matches!(Quaternion::ZERO.inv(), Err(Error::Domain(_))));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(
            psi(Quaternion::new(1.0, 2.0, 2.0, 1.0)),
            SpherePoint { u: 1.0, v: 3.0 }
        );
        assert_eq!(psi(Quaternion::real(5.0)), SpherePoint { u: 5.0, v: 0.0 });
        assert_eq!(psi(Quaternion::J), SpherePoint { u: 0.0, v: 1.0 });
    }

    #[test]
    fn slice_embedding() {
        assert_eq!(
            slice_embed(SpherePoint::new(0.0, 1.0), SliceUnit::J),
            Quaternion::J
        );
        assert_eq!(
            slice_embed(SpherePoint::new(1.0, 3.0), SliceUnit::I),
            Quaternion::new(1.0, 3.0, 0.0, 0.0)
        );
        let unit = SliceUnit::new(1.0, -2.0, 0.5).unwrap();
        let p = SpherePoint::new(-0.3, 1.7);
        let back = psi(slice_embed(p, unit));
        assert!((back.u - p.u).abs() < 1e-15 && (back.v - p.v).abs() < 1e-15);
        let iq = unit.as_quaternion();
        assert!((iq.norm() - 1.0).abs() < 1e-14 && iq.re() == 0.0);
        assert!(SliceUnit::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn distances() {
        let d = |a: (f64, f64), b: (f64, f64)| {
            sphere_distance(SpherePoint::new(a.0, a.1), SpherePoint::new(b.0, b.1))
        };
        assert_eq!(d((0.0, 1.0), (0.0, 2.0)), 1.0);
        assert_eq!(d((0.0, 0.0), (3.0, 4.0)), 5.0);
        assert_eq!(d((1.0, 1.0), (1.0, 1.0)), 0.0);
    }

    #[test]
    fn sphere_membership() {
        assert!(same_sphere(Quaternion::I, Quaternion::J, 1e-12));
        assert!(!same_sphere(Quaternion::I, Quaternion::I * 2.0, 1e-12));
        // h i h⁻¹ with h = 1 + 2j, computed by hand: h i = i + 2ji = i - 2k,
        // h⁻¹ = (1 - 2j)/5, (i - 2k)(1 - 2j) = i - 2ij - 2k + 4kj = i - 2k - 2k - 4i.
        let h = Quaternion::new(1.0, 0.0, 2.0, 0.0);
        let rotated = Quaternion::I.conjugate_by(h).unwrap();
        assert!(close(
            rotated,
            Quaternion::new(0.0, -3.0, 0.0, -4.0) / 5.0,
            1e-15
        ));
        assert!(same_sphere(rotated, Quaternion::I, 1e-10));
    }
}
