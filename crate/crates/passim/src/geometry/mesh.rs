use super::curve::BoundaryCurve;
use crate::error::{Error, Result};
use crate::point::Point2;
use crate::scalar::Scalar;

/// Equispaced-parameter discretisation of a [`BoundaryCurve`].
#[derive(Clone, Debug)]
pub struct BoundaryMesh<T> {
    pub curve: BoundaryCurve<T>,
    pub nodes: Vec<Point2<T>>,
    /// Parameter derivative `x'(t_j)`.
    pub tangents: Vec<Point2<T>>,
    /// Second parameter derivative `x''(t_j)`.
    pub second: Vec<Point2<T>>,
    /// Unit outward normals.
    pub normals: Vec<Point2<T>>,
    /// `|x'(t_j)|`.
    pub speeds: Vec<T>,
    /// Trapezoid weights `2 pi |x'(t_j)| / M`.
    pub weights: Vec<T>,
}

/// Samples `curve` at `t_j = 2 pi j / m`.
pub fn discretize<T: Scalar>(curve: &BoundaryCurve<T>, m: usize) -> Result<BoundaryMesh<T>> {
    if m < 8 {
        return Err(Error::Resolution(format!("{m} boundary nodes, need at least 8")));
    }
    let h = T::lit(std::f64::consts::TAU / m as f64);
    let mut mesh = BoundaryMesh {
        curve: curve.clone(),
        nodes: Vec::with_capacity(m),
        tangents: Vec::with_capacity(m),
        second: Vec::with_capacity(m),
        normals: Vec::with_capacity(m),
        speeds: Vec::with_capacity(m),
        weights: Vec::with_capacity(m),
    };
    for j in 0..m {
        let c = curve.eval(T::int(j as i64) * h);
        let s = c.dx.norm();
        mesh.nodes.push(c.x);
        mesh.tangents.push(c.dx);
        mesh.second.push(c.ddx);
        mesh.normals.push(Point2::new(c.dx.y / s, -c.dx.x / s));
        mesh.speeds.push(s);
        mesh.weights.push(s * h);
    }
    Ok(mesh)
}

impl<T: Scalar> BoundaryMesh<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn perimeter(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Largest distance between neighbouring nodes.
    pub fn spacing(&self) -> T {
        let n = self.len();
        (0..n).map(|i| self.nodes[i].dist(self.nodes[(i + 1) % n])).fold(T::zero(), T::max)
    }

    /// Points halfway (in parameter) between consecutive nodes.
    pub fn midpoints(&self) -> Vec<Point2<T>> {
        let n = self.len();
        let h = T::lit(std::f64::consts::TAU / n as f64);
        (0..n).map(|j| self.curve.eval((T::int(j as i64) + T::lit(0.5)) * h).x).collect()
    }

    /// Distance from `p` to the node set.
    pub fn node_distance(&self, p: Point2<T>) -> T {
        self.nodes.iter().map(|q| q.dist(p)).fold(T::infinity(), T::min)
    }
}
