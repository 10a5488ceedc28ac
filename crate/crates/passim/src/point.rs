use crate::scalar::{Cx, Scalar};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    /// `r (cos t, sin t)`.
    pub fn polar(r: T, t: T) -> Self {
        let (s, c) = t.sin_cos();
        Point2 { x: r * c, y: r * s }
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn norm_sqr(self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    /// Polar angle in `(-pi, pi]`.
    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Counter-clockwise rotation by `t`.
    pub fn rotate(self, t: T) -> Self {
        let (s, c) = t.sin_cos();
        Point2 { x: c * self.x - s * self.y, y: s * self.x + c * self.y }
    }

    pub fn to_complex(self) -> Cx<T> {
        Cx::new(self.x, self.y)
    }

    pub fn cast<U: Scalar>(self) -> Point2<U> {
        Point2 { x: U::lit(self.x.f64()), y: U::lit(self.y.f64()) }
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point2 { x: self.x * s, y: self.y * s }
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point2 { x: -self.x, y: -self.y }
    }
}
