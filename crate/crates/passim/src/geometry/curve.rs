use crate::error::{Error, Result};
use crate::point::Point2;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Kite from Colton & Kress, *Inverse Acoustic and Electromagnetic
/// Scattering Theory*: `(cos t + A cos 2t - A, B sin t)`.
pub const KITE_A: f64 = 0.65;
pub const KITE_B: f64 = 1.5;

/// Shape family with its pre-scaling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Kite,
}

/// Smooth closed curve `x(t) = center + R(rotation) scale (shape(t) - offset)`,
/// `t` in `[0, 2 pi)`, traversed counter-clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve<T> {
    pub shape: Shape,
    pub center: Point2<T>,
    pub rotation: T,
    scale: T,
    offset: Point2<T>,
}

/// Position and first two parameter derivatives at one parameter value.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint<T> {
    pub x: Point2<T>,
    pub dx: Point2<T>,
    pub ddx: Point2<T>,
}

fn raw<T: Scalar>(shape: Shape, t: T) -> [Point2<T>; 3] {
    let (s, c) = t.sin_cos();
    match shape {
        Shape::Disk { radius } => {
            let r = T::lit(radius);
            [Point2::new(r * c, r * s), Point2::new(-r * s, r * c), Point2::new(-r * c, -r * s)]
        }
        Shape::Ellipse { a, b } => {
            let (a, b) = (T::lit(a), T::lit(b));
            [Point2::new(a * c, b * s), Point2::new(-a * s, b * c), Point2::new(-a * c, -b * s)]
        }
        Shape::Kite => {
            let (ka, kb) = (T::lit(KITE_A), T::lit(KITE_B));
            let two = T::lit(2.0);
            let (s2, c2) = (two * t).sin_cos();
            [
                Point2::new(c + ka * c2 - ka, kb * s),
                Point2::new(-s - two * ka * s2, kb * c),
                Point2::new(-c - T::lit(4.0) * ka * c2, -kb * s),
            ]
        }
    }
}

fn validate(shape: Shape) -> Result<()> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    match shape {
        Shape::Disk { radius } if !ok(radius) => Err(Error::Geometry(format!("disk radius {radius}"))),
        Shape::Ellipse { a, b } if !ok(a) || !ok(b) => Err(Error::Geometry(format!("ellipse axes {a}, {b}"))),
        _ => Ok(()),
    }
}

/// Diameter (largest pairwise distance) of the unscaled shape.
fn raw_diameter(shape: Shape) -> f64 {
    match shape {
        Shape::Disk { radius } => 2.0 * radius,
        Shape::Ellipse { a, b } => 2.0 * a.max(b),
        Shape::Kite => numeric_diameter(|t| raw::<f64>(shape, t)[0]),
    }
}

/// Max pairwise distance: coarse scan, then alternating golden-section
/// refinement of both parameters.
pub(crate) fn numeric_diameter(f: impl Fn(f64) -> Point2<f64>) -> f64 {
    let n = 256;
    let h = std::f64::consts::TAU / n as f64;
    let pts: Vec<_> = (0..n).map(|i| f(i as f64 * h)).collect();
    let mut best = (0.0, 0, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pts[i].dist(pts[j]);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (mut s, mut t) = (best.1 as f64 * h, best.2 as f64 * h);
    let golden = |other: f64, c: f64| {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (c - h, c + h);
        let phi = |u: f64| -f(u).dist(f(other));
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (phi(x1), phi(x2));
        for _ in 0..80 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = phi(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = phi(x2);
            }
        }
        0.5 * (a + b)
    };
    for _ in 0..20 {
        s = golden(t, s);
        t = golden(s, t);
    }
    f(s).dist(f(t))
}

/// Area centroid of the unscaled shape.
fn raw_centroid(shape: Shape) -> Point2<f64> {
    match shape {
        Shape::Disk { .. } | Shape::Ellipse { .. } => Point2::new(0.0, 0.0),
        Shape::Kite => {
            let n = 2048;
            let h = std::f64::consts::TAU / n as f64;
            let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
            for i in 0..n {
                let [p, d, _] = raw::<f64>(shape, i as f64 * h);
                let w = p.cross(d) * h;
                a += 0.5 * w;
                cx += p.x * w / 3.0;
                cy += p.y * w / 3.0;
            }
            Point2::new(cx / a, cy / a)
        }
    }
}

/// Builds a curve whose diameter equals `size` (when given) and whose area
/// centroid sits at `center`.
pub fn make_curve<T: Scalar>(shape: Shape, center: Point2<T>, rotation: T, size: Option<T>) -> Result<BoundaryCurve<T>> {
    validate(shape)?;
    let scale = match size {
        Some(s) if !(s > T::zero()) || !s.is_finite() => {
            return Err(Error::Geometry(format!("non-positive size {s:?}")));
        }
        Some(s) => s / T::lit(raw_diameter(shape)),
        None => T::one(),
    };
    Ok(BoundaryCurve { shape, center, rotation, scale, offset: raw_centroid(shape).cast() })
}

impl<T: Scalar> BoundaryCurve<T> {
    pub fn eval(&self, t: T) -> CurvePoint<T> {
        let [p, d, dd] = raw(self.shape, t);
        let map = |v: Point2<T>| v.rotate(self.rotation) * self.scale;
        CurvePoint { x: self.center + map(p - self.offset), dx: map(d), ddx: map(dd) }
    }

    /// Uniform scale applied to the raw shape.
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn diameter(&self) -> T {
        T::lit(raw_diameter(self.shape)) * self.scale
    }

    /// Same curve rescaled to diameter `size`, keeping center and rotation.
    pub fn rescaled(&self, size: T) -> Result<Self> {
        make_curve(self.shape, self.center, self.rotation, Some(size))
    }

    /// Polygon through `n` equispaced parameter values.
    pub fn polygon(&self, n: usize) -> Vec<Point2<T>> {
        let h = T::lit(std::f64::consts::TAU / n as f64);
        (0..n).map(|i| self.eval(T::int(i as i64) * h).x).collect()
    }

    /// Enclosed area (exact for the trapezoid rule up to rounding).
    pub fn area(&self) -> T {
        let n = 1024;
        let h = T::lit(std::f64::consts::TAU / n as f64);
        (0..n)
            .map(|i| {
                let c = self.eval(T::int(i as i64) * h);
                c.x.cross(c.dx)
            })
            .sum::<T>()
            * h
            / T::lit(2.0)
    }
}
