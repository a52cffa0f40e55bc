//! Quaternion scalars and the Cayley–Dickson split over the complex numbers.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QbtError, Result};

/// q = a + b·i + c·j + d·k
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// q = z1 + j·z2 with z1 = a + bi, z2 = c − di.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexPair {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    #[inline]
    pub const fn real(a: f64) -> Self {
        Quaternion::new(a, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    #[inline]
    pub fn from_array(v: [f64; 4]) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }

    #[inline]
    pub fn conj(self) -> Self {
        qconj(self)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        qnorm_sq(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        qnorm_sq(self).sqrt()
    }

    pub fn inv(self) -> Result<Self> {
        qinv(self)
    }

    /// Largest absolute component, handy for tolerance checks.
    pub fn max_abs(self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Embeds z = x + yi as x + y·i.
    #[inline]
    pub fn from_complex_i(z: Complex64) -> Self {
        Quaternion::new(z.re, z.im, 0.0, 0.0)
    }

    /// Embeds z = x + yi as x + y·j.
    #[inline]
    pub fn from_complex_j(z: Complex64) -> Self {
        Quaternion::new(z.re, 0.0, z.im, 0.0)
    }

    /// e^{iθ}
    #[inline]
    pub fn exp_i(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Quaternion::new(c, s, 0.0, 0.0)
    }

    /// e^{jθ}
    #[inline]
    pub fn exp_j(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Quaternion::new(c, 0.0, s, 0.0)
    }
}

/// Hamilton product in coordinates.
#[inline]
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion {
        a: p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        b: p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        c: p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        d: p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    }
}

#[inline]
pub fn qconj(q: Quaternion) -> Quaternion {
    Quaternion::new(q.a, -q.b, -q.c, -q.d)
}

#[inline]
pub fn qnorm_sq(q: Quaternion) -> f64 {
    q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d
}

pub fn qinv(q: Quaternion) -> Result<Quaternion> {
    let n = qnorm_sq(q);
    if n == 0.0 {
        return Err(QbtError::ZeroDivisor);
    }
    Ok(qconj(q) * (1.0 / n))
}

#[inline]
pub fn cd_split(q: Quaternion) -> ComplexPair {
    ComplexPair {
        z1: Complex64::new(q.a, q.b),
        z2: Complex64::new(q.c, -q.d),
    }
}

#[inline]
pub fn cd_join(p: ComplexPair) -> Quaternion {
    Quaternion::new(p.z1.re, p.z1.im, p.z2.re, -p.z2.im)
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, o: Quaternion) -> Quaternion {
        qmul(self, o)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, s: f64) -> Quaternion {
        self * (1.0 / s)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl MulAssign<f64> for Quaternion {
    #[inline]
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |acc, q| acc + q)
    }
}

impl std::fmt::Display for Quaternion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Left multiplication by p as a 4x4 real matrix acting on (a, b, c, d).
    fn left_matrix(p: Quaternion) -> [[f64; 4]; 4] {
        let (a, b, c, d) = (p.a, p.b, p.c, p.d);
        [
            [a, -b, -c, -d],
            [b, a, -d, c],
            [c, d, a, -b],
            [d, -c, b, a],
        ]
    }

    fn matrix_product(p: Quaternion, q: Quaternion) -> Quaternion {
        let m = left_matrix(p);
        let v = q.to_array();
        let mut out = [0.0; 4];
        for r in 0..4 {
            for k in 0..4 {
                out[r] += m[r][k] * v[k];
            }
        }
        Quaternion::from_array(out)
    }

    #[test]
    fn basis_products() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        for u in [Quaternion::I, Quaternion::J, Quaternion::K] {
            assert_eq!(u * u, -Quaternion::ONE);
        }
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, -Quaternion::ONE);
    }

    #[test]
    fn product_matches_matrix_oracle() {
        let p = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        let q = Quaternion::new(5.0, 6.0, 7.0, 8.0);
        // (1+2i+3j+4k)(5+6i+7j+8k) = -60 + 12i + 30j + 24k
        assert_eq!(p * q, Quaternion::new(-60.0, 12.0, 30.0, 24.0));
        assert_eq!(p * q, matrix_product(p, q));
    }

    #[test]
    fn identity_and_conj() {
        let q = Quaternion::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(Quaternion::ONE * q, q);
        assert_eq!(q * Quaternion::ONE, q);
        assert_eq!(
            qconj(Quaternion::new(1.0, 1.0, 1.0, 1.0)),
            Quaternion::new(1.0, -1.0, -1.0, -1.0)
        );
        assert_eq!(qconj(qconj(q)), q);
    }

    #[test]
    fn norms() {
        assert_eq!(qnorm_sq(Quaternion::I * Quaternion::J), 1.0);
        assert_eq!(qnorm_sq(Quaternion::ZERO), 0.0);
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!((q * q.conj()).a, 30.0);
    }

    #[test]
    fn inverses() {
        assert_eq!(qinv(Quaternion::J).unwrap(), -Quaternion::J);
        assert_eq!(qinv(Quaternion::real(2.0)).unwrap(), Quaternion::real(0.5));
        assert!(matches!(qinv(Quaternion::ZERO), Err(QbtError::ZeroDivisor)));
    }

    #[test]
    fn split_convention() {
        let p = cd_split(Quaternion::new(1.0, 2.0, 3.0, 4.0));
        assert_eq!(p.z1, Complex64::new(1.0, 2.0));
        assert_eq!(p.z2, Complex64::new(3.0, -4.0));
        let pj = cd_split(Quaternion::J);
        assert_eq!(pj.z1, Complex64::new(0.0, 0.0));
        assert_eq!(pj.z2, Complex64::new(1.0, 0.0));
        // z1 + j z2 rebuilt with the Hamilton product
        let q = Quaternion::new(-0.4, 1.5, 2.25, -3.0);
        let s = cd_split(q);
        let rebuilt = Quaternion::from_complex_i(s.z1) + Quaternion::J * Quaternion::from_complex_i(s.z2);
        assert_eq!(rebuilt, q);
        assert_eq!(cd_join(s), q);
    }
}
