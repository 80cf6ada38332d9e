//! Real quaternions and their 2×2 complex matrix representation.
//!
//! A quaternion `a + b·i₁ + c·i₂ + d·i₃` maps to
//!
//! ```text
//! [  λ   ω ]      λ = a + b·i
//! [ -ω̄   λ̄ ]      ω = c + d·i
//! ```
//!
//! and the map is an injective ring homomorphism, so products, conjugates and
//! norms can be computed on either side.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance on the quaternion-shape residual in
/// [`Complex2x2::to_quaternion`].
pub const DEFAULT_SHAPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const I2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const I3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// A real quaternion `a·1`.
    pub const fn real(a: f64) -> Self {
        Self::new(a, 0.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// True when the imaginary coefficients are all exactly zero.
    pub fn is_real(self) -> bool {
        self.b == 0.0 && self.c == 0.0 && self.d == 0.0
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn to_complex(self) -> Complex2x2 {
        Complex2x2::new(
            Complex64::new(self.a, self.b),
            Complex64::new(self.c, self.d),
            Complex64::new(-self.c, self.d),
            Complex64::new(self.a, -self.b),
        )
    }

    /// Left inverse of [`Quaternion::to_complex`].
    pub fn from_complex(m: &Complex2x2, tol: f64) -> Result<Self> {
        m.to_quaternion(tol)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, y: Quaternion) -> Quaternion {
        let x = self;
        Quaternion::new(
            x.a * y.a - x.b * y.b - x.c * y.c - x.d * y.d,
            x.a * y.b + x.b * y.a + x.c * y.d - x.d * y.c,
            x.a * y.c - x.b * y.d + x.c * y.a + x.d * y.b,
            x.a * y.d + x.b * y.c - x.c * y.b + x.d * y.a,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, y: Quaternion) -> Quaternion {
        Quaternion::new(self.a + y.a, self.b + y.b, self.c + y.c, self.d + y.d)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, y: Quaternion) {
        *self = *self + y;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, y: Quaternion) -> Quaternion {
        Quaternion::new(self.a - y.a, self.b - y.b, self.c - y.c, self.d - y.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.a)?;
        for (v, unit) in [(self.b, "i₁"), (self.c, "i₂"), (self.d, "i₃")] {
            let sign = if v.is_sign_negative() { '-' } else { '+' };
            write!(f, " {sign} {}{unit}", v.abs())?;
        }
        Ok(())
    }
}

/// A 2×2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex2x2(pub [[Complex64; 2]; 2]);

impl Complex2x2 {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self([[m11, m12], [m21, m22]])
    }

    pub fn zero() -> Self {
        Self::scalar(Complex64::new(0.0, 0.0))
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    /// `t·I₂`.
    pub fn scalar(t: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(t, z, z, t)
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self::new(
            m[0][0].into(),
            m[0][1].into(),
            m[1][0].into(),
            m[1][1].into(),
        )
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    /// Classical adjugate `[[m22, -m12], [-m21, m11]]`.
    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        Self::new(m[1][1], -m[0][1], -m[1][0], m[0][0])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Deviation from the `[[λ, ω], [-ω̄, λ̄]]` shape.
    pub fn quaternion_residual(&self) -> f64 {
        let m = &self.0;
        let r1 = (m[0][0] - m[1][1].conj()).norm();
        let r2 = (m[0][1] + m[1][0].conj()).norm();
        r1.max(r2)
    }

    pub fn to_quaternion(&self, tol: f64) -> Result<Quaternion> {
        let residual = self.quaternion_residual();
        if !(residual <= tol) {
            return Err(Error::Shape { residual, tol });
        }
        let m = &self.0;
        let lambda = (m[0][0] + m[1][1].conj()) * 0.5;
        let omega = (m[0][1] - m[1][0].conj()) * 0.5;
        Ok(Quaternion::new(lambda.re, lambda.im, omega.re, omega.im))
    }
}

impl Mul for Complex2x2 {
    type Output = Complex2x2;

    fn mul(self, y: Complex2x2) -> Complex2x2 {
        let (a, b) = (&self.0, &y.0);
        Complex2x2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Complex2x2 {
    type Output = Complex2x2;

    fn add(self, y: Complex2x2) -> Complex2x2 {
        let (a, b) = (&self.0, &y.0);
        Complex2x2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Complex2x2 {
    type Output = Complex2x2;

    fn sub(self, y: Complex2x2) -> Complex2x2 {
        let (a, b) = (&self.0, &y.0);
        Complex2x2::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Neg for Complex2x2 {
    type Output = Complex2x2;

    fn neg(self) -> Complex2x2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
