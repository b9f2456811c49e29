//! Linear algebra of G₃¹ built around the degenerate scalar product, plus
//! the six-parameter motion group.
//!
//! The scalar product and cross product only need ring operations, so they
//! work over exact scalars as well as floats.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Num, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A vector (or point) of G₃¹. `x` is the absolute coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Taxonomy of vectors under the motion group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorKind {
    NonIsotropic,
    Spacelike,
    Timelike,
    /// `y = ±z`, including the zero vector.
    Lightlike,
}

/// A sign in {+1, −1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn of<T: Num + PartialOrd>(v: &T) -> Sign {
        if *v < T::zero() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn apply<T: Num + Neg<Output = T>>(self, v: T) -> T {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl<T> GVector<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }
}

impl<T: Num + Copy> GVector<T> {
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// An isotropic vector `(0, y, z)`.
    pub fn isotropic(y: T, z: T) -> Self {
        Self::new(T::zero(), y, z)
    }

    pub fn is_isotropic(&self) -> bool {
        self.x.is_zero()
    }

    /// The pseudo-Galilean scalar product `g(self, other)`.
    ///
    /// Uses `x₁x₂` unless both absolute coordinates are exactly zero, in
    /// which case it falls back to the Lorentzian product `y₁y₂ − z₁z₂`.
    pub fn dot(&self, other: &Self) -> T {
        if !self.x.is_zero() || !other.x.is_zero() {
            self.x * other.x
        } else {
            self.y * other.y - self.z * other.z
        }
    }

    /// Cofactor expansion of the determinant with first row `(0, −e₂, e₃)`.
    /// The result is always isotropic.
    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            T::zero(),
            self.x * other.z - self.z * other.x,
            self.x * other.y - self.y * other.x,
        )
    }

    /// `y² − z²`, the Lorentzian square of the isotropic part.
    pub fn lorentz_square(&self) -> T {
        self.y * self.y - self.z * self.z
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Num + Copy + PartialOrd + Signed> GVector<T> {
    /// Exact taxonomy (no tolerance).
    pub fn kind(&self) -> VectorKind {
        self.kind_with_tol(T::zero())
    }

    /// Taxonomy with tolerance `tol` on the absolute coordinate and on
    /// `|y² − z²|` relative to `y² + z²`.
    pub fn kind_with_tol(&self, tol: T) -> VectorKind {
        if self.x.abs() > tol {
            return VectorKind::NonIsotropic;
        }
        let d = self.lorentz_square();
        let scale = self.y * self.y + self.z * self.z;
        if d.abs() <= tol * scale || d.is_zero() {
            VectorKind::Lightlike
        } else if d > T::zero() {
            VectorKind::Spacelike
        } else {
            VectorKind::Timelike
        }
    }
}

impl<T: Real> GVector<T> {
    /// Pseudo-Galilean length: `|x|` for non-isotropic vectors,
    /// `sqrt|y² − z²|` for isotropic ones.
    pub fn norm(&self) -> T {
        if self.x != T::zero() {
            self.x.abs()
        } else {
            self.lorentz_square().abs().sqrt()
        }
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Real>(&self) -> GVector<U> {
        GVector::new(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
        )
    }
}

/// The free-function spelling of [`GVector::dot`].
pub fn scalar_product<T: Num + Copy>(u: &GVector<T>, v: &GVector<T>) -> T {
    u.dot(v)
}

pub fn cross_product<T: Num + Copy>(u: &GVector<T>, v: &GVector<T>) -> GVector<T> {
    u.cross(v)
}

pub fn norm<T: Real>(v: &GVector<T>) -> T {
    v.norm()
}

/// Taxonomy of a numerically computed vector; `iso_eps` as in [`GVector::kind_with_tol`].
pub fn classify_vector<T: Real + Signed>(v: &GVector<T>, iso_eps: T) -> VectorKind {
    v.kind_with_tol(iso_eps)
}

/// Ordinary 3×3 determinant with rows `u`, `v`, `w`.
pub fn det3<T: Num + Copy>(u: &GVector<T>, v: &GVector<T>, w: &GVector<T>) -> T {
    u.x * (v.y * w.z - v.z * w.y) - u.y * (v.x * w.z - v.z * w.x) + u.z * (v.x * w.y - v.y * w.x)
}

impl<T: Num + Copy> Add for GVector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Num + Copy> Sub for GVector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Num + Copy + Neg<Output = T>> Neg for GVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Num + Copy> Mul<T> for GVector<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

impl<T: Num + Copy> Div<T> for GVector<T> {
    type Output = Self;
    fn div(self, k: T) -> Self {
        Self::new(self.x / k, self.y / k, self.z / k)
    }
}

impl<T: Num + Copy> Zero for GVector<T> {
    fn zero() -> Self {
        GVector::zero()
    }
    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }
}

/// An element of the six-parameter motion group:
///
/// ```text
/// x̄ = a + x
/// ȳ = b + c·x + y·cosh φ + z·sinh φ
/// z̄ = d + e·x + y·sinh φ + z·cosh φ
/// ```
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Motion<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub phi: T,
}

impl<T: Real> Motion<T> {
    pub fn identity() -> Self {
        Self {
            a: T::zero(),
            b: T::zero(),
            c: T::zero(),
            d: T::zero(),
            e: T::zero(),
            phi: T::zero(),
        }
    }

    /// Action on points.
    pub fn apply(&self, p: &GVector<T>) -> GVector<T> {
        let v = self.apply_vector(p);
        GVector::new(self.a + v.x, self.b + v.y, self.d + v.z)
    }

    /// Induced action on difference vectors (translations a, b, d dropped).
    pub fn apply_vector(&self, v: &GVector<T>) -> GVector<T> {
        let (sh, ch) = (self.phi.sinh(), self.phi.cosh());
        GVector::new(
            v.x,
            self.c * v.x + v.y * ch + v.z * sh,
            self.e * v.x + v.y * sh + v.z * ch,
        )
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Self {
        let (sh, ch) = (self.phi.sinh(), self.phi.cosh());
        Self {
            a: self.a + first.a,
            b: self.b + self.c * first.a + ch * first.b + sh * first.d,
            c: self.c + ch * first.c + sh * first.e,
            d: self.d + self.e * first.a + sh * first.b + ch * first.d,
            e: self.e + sh * first.c + ch * first.e,
            phi: self.phi + first.phi,
        }
    }
}

/// The locus `g(u − center, u − center) = sign · r2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PGSphere<T> {
    pub center: GVector<T>,
    pub r2: T,
    pub sign: Sign,
}

impl<T: Num + Copy + Neg<Output = T>> PGSphere<T> {
    /// Zero exactly on the sphere.
    pub fn residual(&self, p: &GVector<T>) -> T {
        let d = *p - self.center;
        d.dot(&d) - self.sign.apply(self.r2)
    }
}

pub fn apply_motion<T: Real>(m: &Motion<T>, p: &GVector<T>) -> GVector<T> {
    m.apply(p)
}

pub fn sphere_residual<T: Num + Copy + Neg<Output = T>>(s: &PGSphere<T>, p: &GVector<T>) -> T {
    s.residual(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    fn v(x: f64, y: f64, z: f64) -> GVector<f64> {
        GVector::new(x, y, z)
    }

    #[test]
    fn scalar_product_branches() {
        assert_eq!(v(1., 2., 3.).dot(&v(2., 5., 7.)), 2.0);
        assert_eq!(v(0., 3., 1.).dot(&v(0., 2., 2.)), 4.0);
        assert_eq!(v(0., 1., 1.).dot(&v(0., 1., -1.)), 2.0);
        // one non-isotropic factor is enough for the first branch
        assert_eq!(v(0., 3., 1.).dot(&v(2., 2., 2.)), 0.0);
    }

    #[test]
    fn exact_rational_branch_table() {
        let a = GVector::new(q(0), Q::new(3, 2), Q::new(1, 3));
        let b = GVector::new(q(0), Q::new(2, 5), q(6));
        assert_eq!(a.dot(&b), Q::new(3, 5) - q(2));
        let c = GVector::new(Q::new(1, 7), q(9), q(9));
        assert_eq!(c.dot(&a), q(0));
        assert_eq!(c.dot(&c), Q::new(1, 49));
        assert_eq!(GVector::new(q(0), q(2), q(1)).kind(), VectorKind::Spacelike);
        assert_eq!(GVector::new(q(0), q(1), q(-1)).kind(), VectorKind::Lightlike);
        assert_eq!(c.kind(), VectorKind::NonIsotropic);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(v(5., 1., 9.).norm(), 5.0);
        assert_eq!(v(-5., 1., 9.).norm(), 5.0);
        assert_eq!(v(0., 5., 3.).norm(), 4.0);
        assert_eq!(v(0., 2., 2.).norm(), 0.0);
        assert_eq!(v(0., 3., 5.).norm(), 4.0);
    }

    #[test]
    fn cross_examples() {
        assert_eq!(v(1., 0., 0.).cross(&v(0., 1., 0.)), v(0., 0., 1.));
        assert_eq!(v(1., 0., 0.).cross(&v(0., 0., 1.)), v(0., 1., 0.));
        assert_eq!(v(0., 2., 3.).cross(&v(0., -4., 7.)), v(0., 0., 0.));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_vector(&v(1., 2., 3.), 1e-12), VectorKind::NonIsotropic);
        assert_eq!(classify_vector(&v(0., 2., 1.), 1e-12), VectorKind::Spacelike);
        assert_eq!(classify_vector(&v(0., 1., 2.), 1e-12), VectorKind::Timelike);
        assert_eq!(classify_vector(&v(0., 1., 1.), 1e-12), VectorKind::Lightlike);
        assert_eq!(classify_vector(&v(0., 0., 0.), 1e-12), VectorKind::Lightlike);
        // rounding residue in x is absorbed by iso_eps, but not by the exact kind
        let noisy = v(1e-15, 2., 1.);
        assert_eq!(classify_vector(&noisy, 1e-12), VectorKind::Spacelike);
        assert_eq!(noisy.kind(), VectorKind::NonIsotropic);
    }

    #[test]
    fn motion_examples() {
        let p = v(0.3, -1.2, 2.5);
        assert_eq!(Motion::identity().apply(&p), p);
        let m = Motion { a: 1.0, ..Motion::identity() };
        assert_eq!(m.apply(&v(0., 1., 2.)), v(1., 1., 2.));
    }

    #[test]
    fn motion_composition_matches_sequential_application() {
        let m1 = Motion { a: 0.5, b: -1.0, c: 0.3, d: 2.0, e: -0.7, phi: 0.4 };
        let m2 = Motion { a: -1.5, b: 0.2, c: 1.1, d: 0.0, e: 0.25, phi: -1.3 };
        let p = v(0.7, 1.9, -0.4);
        let seq = m2.apply(&m1.apply(&p));
        let comp = m2.compose(&m1).apply(&p);
        assert!((seq - comp).max_abs() < 1e-12);
        assert_eq!(Motion::<f64>::identity().compose(&m1), m1);
    }

    #[test]
    fn sphere_examples() {
        let plus = PGSphere { center: v(0., 0., 0.), r2: 4.0, sign: Sign::Plus };
        let minus = PGSphere { sign: Sign::Minus, ..plus };
        assert_eq!(plus.residual(&v(0., 2., 0.)), 0.0);
        assert_eq!(minus.residual(&v(0., 0., 2.)), 0.0);
        assert_eq!(plus.residual(&v(0., 3., 0.)), 5.0);
    }

    #[test]
    fn determinant_of_frame_like_rows() {
        let t = v(1., 0.3, -0.2);
        let n = v(0., 0.0, 1.0);
        let b = v(0., -1.0, 0.0);
        assert_eq!(det3(&t, &n, &b), 1.0);
    }
}
