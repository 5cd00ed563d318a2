//! Plane vectors and 2×2 matrices over an exact [`Scalar`].

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vec2<K> {
    pub x: K,
    pub y: K,
}

impl<K: Scalar> Vec2<K> {
    pub fn new(x: K, y: K) -> Self {
        Vec2 { x, y }
    }
    pub fn zero() -> Self {
        Vec2 { x: K::zero(), y: K::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        Vec2 { x: self.x.clone() + &o.x, y: self.y.clone() + &o.y }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Vec2 { x: self.x.clone() - &o.x, y: self.y.clone() - &o.y }
    }
    pub fn neg(&self) -> Self {
        Vec2 { x: -self.x.clone(), y: -self.y.clone() }
    }
    pub fn scale(&self, k: &K) -> Self {
        Vec2 { x: self.x.clone() * k, y: self.y.clone() * k }
    }
    pub fn cross(&self, o: &Self) -> K {
        self.x.clone() * &o.y - self.y.clone() * &o.x
    }
    pub fn dot(&self, o: &Self) -> K {
        self.x.clone() * &o.x + self.y.clone() * &o.y
    }
    pub fn norm2(&self) -> K {
        self.dot(self)
    }
    /// Same direction (positive multiple), for nonzero vectors.
    pub fn same_direction(&self, o: &Self) -> bool {
        self.cross(o).is_zero() && self.dot(o).sign() > 0
    }
    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// `u` lies in the half-open sector swept counterclockwise from `d1` to `d2`
/// (`d1` included, `d2` excluded), where the sector angle is in `(0, π)`.
pub fn in_sector<K: Scalar>(d1: &Vec2<K>, d2: &Vec2<K>, u: &Vec2<K>) -> bool {
    if d1.same_direction(u) {
        return true;
    }
    d1.cross(u).sign() > 0 && u.cross(d2).sign() > 0
}

/// Row-major `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2<K> {
    pub a: K,
    pub b: K,
    pub c: K,
    pub d: K,
}

impl<K: Scalar> Mat2<K> {
    pub fn new(a: K, b: K, c: K, d: K) -> Self {
        Mat2 { a, b, c, d }
    }
    pub fn identity() -> Self {
        Self::diag(K::one(), K::one())
    }
    pub fn diag(a: K, d: K) -> Self {
        Mat2 { a, b: K::zero(), c: K::zero(), d }
    }
    pub fn minus_identity() -> Self {
        Self::diag(-K::one(), -K::one())
    }
    /// Horizontal shear `[[1, s], [0, 1]]`.
    pub fn shear(s: K) -> Self {
        Mat2 { a: K::one(), b: s, c: K::zero(), d: K::one() }
    }
    pub fn det(&self) -> K {
        self.a.clone() * &self.d - self.b.clone() * &self.c
    }
    pub fn apply(&self, v: &Vec2<K>) -> Vec2<K> {
        Vec2 {
            x: self.a.clone() * &v.x + self.b.clone() * &v.y,
            y: self.c.clone() * &v.x + self.d.clone() * &v.y,
        }
    }
    pub fn mul(&self, o: &Self) -> Self {
        Mat2 {
            a: self.a.clone() * &o.a + self.b.clone() * &o.c,
            b: self.a.clone() * &o.b + self.b.clone() * &o.d,
            c: self.c.clone() * &o.a + self.d.clone() * &o.c,
            d: self.c.clone() * &o.b + self.d.clone() * &o.d,
        }
    }
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        Some(Mat2 {
            a: self.d.clone() / &det,
            b: -self.b.clone() / &det,
            c: -self.c.clone() / &det,
            d: self.a.clone() / &det,
        })
    }
}
