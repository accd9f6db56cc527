//! Exact planar vectors and 2×2 matrices over Q(√D).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::qfield::{QuadNum, Rat, Sign};

/// A point or vector with QuadNum coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct V2 {
    pub x: QuadNum,
    pub y: QuadNum,
}

impl V2 {
    pub fn new(x: QuadNum, y: QuadNum) -> Self {
        assert_eq!(x.d_param(), y.d_param());
        V2 { x, y }
    }

    pub fn zero(d: u64) -> Self {
        V2::new(QuadNum::zero(d), QuadNum::zero(d))
    }

    pub fn d_param(&self) -> u64 {
        self.x.d_param()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// z-component of the cross product self × other.
    pub fn cross(&self, other: &V2) -> QuadNum {
        &(&self.x * &other.y) - &(&self.y * &other.x)
    }

    pub fn dot(&self, other: &V2) -> QuadNum {
        &(&self.x * &other.x) + &(&self.y * &other.y)
    }

    pub fn scale(&self, r: &Rat) -> V2 {
        V2::new(self.x.scale(r), self.y.scale(r))
    }

    /// True when both are nonzero and positively parallel.
    pub fn same_direction(&self, other: &V2) -> bool {
        !self.is_zero()
            && !other.is_zero()
            && self.cross(other).is_zero()
            && self.dot(other).sign() == Sign::Positive
    }
}

impl Add for &V2 {
    type Output = V2;
    fn add(self, rhs: &V2) -> V2 {
        V2::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub for &V2 {
    type Output = V2;
    fn sub(self, rhs: &V2) -> V2 {
        V2::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Neg for &V2 {
    type Output = V2;
    fn neg(self) -> V2 {
        V2::new(-&self.x, -&self.y)
    }
}

impl fmt::Debug for V2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for V2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Row-major 2×2 matrix over Q(√D).
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub a: QuadNum,
    pub b: QuadNum,
    pub c: QuadNum,
    pub d: QuadNum,
}

impl Mat2 {
    pub fn new(a: QuadNum, b: QuadNum, c: QuadNum, d: QuadNum) -> Self {
        assert_eq!(a.d_param(), b.d_param());
        assert_eq!(a.d_param(), c.d_param());
        assert_eq!(a.d_param(), d.d_param());
        Mat2 { a, b, c, d }
    }

    pub fn identity(d_param: u64) -> Self {
        Mat2::new(
            QuadNum::one(d_param),
            QuadNum::zero(d_param),
            QuadNum::zero(d_param),
            QuadNum::one(d_param),
        )
    }

    pub fn diag(x: QuadNum, y: QuadNum) -> Self {
        let d = x.d_param();
        Mat2::new(x, QuadNum::zero(d), QuadNum::zero(d), y)
    }

    pub fn d_param(&self) -> u64 {
        self.a.d_param()
    }

    pub fn det(&self) -> QuadNum {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn apply(&self, v: &V2) -> V2 {
        V2::new(
            &(&self.a * &v.x) + &(&self.b * &v.y),
            &(&self.c * &v.x) + &(&self.d * &v.y),
        )
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let inv = det.try_inv().ok()?;
        Some(Mat2::new(
            &self.d * &inv,
            -&(&self.b * &inv),
            -&(&self.c * &inv),
            &self.a * &inv,
        ))
    }

    pub fn mul_mat(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &(&self.a * &rhs.a) + &(&self.b * &rhs.c),
            &(&self.a * &rhs.b) + &(&self.b * &rhs.d),
            &(&self.c * &rhs.a) + &(&self.d * &rhs.c),
            &(&self.c * &rhs.b) + &(&self.d * &rhs.d),
        )
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        self.mul_mat(rhs)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Orientation of the triangle (a, b, c): sign of the cross product
/// (b − a) × (c − a). Exact.
pub fn orient(a: &V2, b: &V2, c: &V2) -> Sign {
    (&(b - a)).cross(&(c - a)).sign()
}

/// True when p lies on the closed segment [a, b].
pub fn on_segment(a: &V2, b: &V2, p: &V2) -> bool {
    let ab = b - a;
    let ap = p - a;
    if !ab.cross(&ap).is_zero() {
        return false;
    }
    let t = ab.dot(&ap);
    let len2 = ab.dot(&ab);
    t.sign() != Sign::Negative && (&len2 - &t).sign() != Sign::Negative
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::rat;

    fn qi(d: u64, n: i64) -> QuadNum {
        QuadNum::from_int(d, n)
    }

    #[test]
    fn matrix_inverse_roundtrip() {
        let d = 17;
        let m = Mat2::new(qi(d, 2), qi(d, 1), qi(d, 1), qi(d, 1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul_mat(&inv), Mat2::identity(d));
        let v = V2::new(crate::qfield::lambda(d, -3), qi(d, 4));
        assert_eq!(inv.apply(&m.apply(&v)), v);
    }

    #[test]
    fn segment_predicate() {
        let d = 5;
        let a = V2::new(qi(d, 0), qi(d, 0));
        let b = V2::new(qi(d, 4), qi(d, 2));
        let mid = V2::new(qi(d, 2), qi(d, 1));
        let off = V2::new(qi(d, 2), qi(d, 2));
        assert!(on_segment(&a, &b, &mid));
        assert!(on_segment(&a, &b, &a));
        assert!(!on_segment(&a, &b, &off));
        let beyond = V2::new(qi(d, 6), qi(d, 3));
        assert!(!on_segment(&a, &b, &beyond));
        let _ = rat(0);
    }
}
