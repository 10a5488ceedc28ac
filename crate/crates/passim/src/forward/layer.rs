use crate::error::{Error, Result};
use crate::geometry::BoundaryMesh;
use crate::linalg::CMatrix;
use crate::point::Point2;
use crate::scalar::{cx, Cx, Scalar};
use crate::specfun::hankel01;
use rayon::prelude::*;

/// Boundary potential represented by a [`LayerMatrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `int phi(x, y) g(y) ds(y)`.
    SingleLayer,
    /// `int [d phi(x, y)/d nu(y) - i eta phi(x, y)] g(y) ds(y)`.
    Combined,
}

/// Where a layer potential is evaluated.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a, T> {
    /// The source mesh itself (boundary operator, log-singular quadrature).
    SameMesh,
    /// Another, disjoint mesh.
    Mesh(&'a BoundaryMesh<T>),
    Points(&'a [Point2<T>]),
}

/// Dense discretisation of a layer operator, quadrature weights included.
/// Rows are targets, columns source nodes.
#[derive(Clone, Debug)]
pub struct LayerMatrix<T> {
    pub entries: CMatrix<T>,
    pub kind: KernelKind,
    pub source_nodes: usize,
    pub target_nodes: usize,
}

/// Weight `R(s)` of the periodic log-quadrature on `m` nodes, `s = t - t_j`.
fn log_weight<T: Scalar>(m: usize, s: T) -> T {
    let two_pi = T::lit(std::f64::consts::TAU);
    if m % 2 == 0 {
        let n = m / 2;
        let nn = T::int(n as i64);
        let mut acc = T::zero();
        for q in 1..n {
            acc = acc + (T::int(q as i64) * s).cos() / T::int(q as i64);
        }
        -two_pi / nn * acc - T::PI() / (nn * nn) * (nn * s).cos()
    } else {
        let n = (m - 1) / 2;
        let mut acc = T::zero();
        for q in 1..=n {
            acc = acc + (T::int(q as i64) * s).cos() / T::int(q as i64);
        }
        -T::lit(2.0) * two_pi / T::int(m as i64) * acc
    }
}

/// Weights `R_j` of the periodic log-quadrature
/// `int_0^{2pi} ln(4 sin^2((t - s)/2)) f(s) ds ~ sum_j R_{|i-j|} f(t_j)`.
pub fn log_weights<T: Scalar>(m: usize) -> Vec<T> {
    let h = T::lit(std::f64::consts::TAU) / T::int(m as i64);
    (0..m).map(|j| log_weight(m, h * T::int(j as i64))).collect()
}

/// Trigonometric interpolation weight of node `t_j` at `t`, `s = t - t_j`.
pub(crate) fn interp_weight<T: Scalar>(m: usize, s: T) -> T {
    let n = m / 2;
    let mut acc = T::one();
    let top = if m % 2 == 0 { n - 1 } else { n };
    for q in 1..=top {
        acc = acc + T::lit(2.0) * (T::int(q as i64) * s).cos();
    }
    if m % 2 == 0 {
        acc = acc + (T::int(n as i64) * s).cos();
    }
    acc / T::int(m as i64)
}

/// Kernel split pieces `(K1, K2)` of the Kress decomposition
/// `K(t, s) = K1(t, s) ln(4 sin^2((t - s)/2)) + K2(t, s)` for the combined
/// kernel `L + i eta M` (Colton & Kress scaling, factor 2 included) or,
/// with `eta = None`, for `M` alone.
fn split_kernel<T: Scalar>(mesh: &BoundaryMesh<T>, i: usize, j: usize, k: T, eta: Option<T>) -> Result<(Cx<T>, Cx<T>)> {
    if i == j {
        return Ok(diag_kernel(mesh, i, k, eta));
    }
    let t = T::lit(std::f64::consts::TAU) * T::int(i as i64 - j as i64) / T::int(mesh.len() as i64);
    split_at(mesh, mesh.nodes[i], t, j, k, eta)
}

fn diag_kernel<T: Scalar>(mesh: &BoundaryMesh<T>, i: usize, k: T, eta: Option<T>) -> (Cx<T>, Cx<T>) {
    let two_pi = T::lit(std::f64::consts::TAU);
    let sp = mesh.speeds[i];
    let dx = mesh.tangents[i];
    let m1 = cx(-sp / two_pi, T::zero());
    let m2 = cx(-T::euler_gamma() / T::PI() - (k * sp / T::lit(2.0)).ln() / T::PI(), T::lit(0.5)) * sp;
    match eta {
        None => (m1, m2),
        Some(eta) => {
            let l2 = dx.cross(mesh.second[i]) / (two_pi * sp * sp);
            let ie = cx(T::zero(), eta);
            (ie * m1, cx(l2, T::zero()) + ie * m2)
        }
    }
}

/// Split kernel for target `x` at parameter offset `t = t_x - t_j != 0`.
fn split_at<T: Scalar>(
    mesh: &BoundaryMesh<T>,
    x: Point2<T>,
    t: T,
    j: usize,
    k: T,
    eta: Option<T>,
) -> Result<(Cx<T>, Cx<T>)> {
    let two_pi = T::lit(std::f64::consts::TAU);
    let sp = mesh.speeds[j];
    let d = x - mesh.nodes[j];
    let r = d.norm();
    let (h0, h1) = hankel01(k * r)?;
    let half = (t / T::lit(2.0)).sin();
    let lg = (T::lit(4.0) * half * half).ln();
    let mm = cx(T::zero(), T::lit(0.5)) * h0 * sp;
    let m1 = cx(-h0.re * sp / two_pi, T::zero());
    let m2 = mm - m1 * lg;
    match eta {
        None => Ok((m1, m2)),
        Some(eta) => {
            // nu(s) . (x(t) - x(s)), nu = (x2', -x1')
            let tj = mesh.tangents[j];
            let nd = tj.y * d.x - tj.x * d.y;
            let l = cx(T::zero(), k / T::lit(2.0)) * h1 * (-nd / r);
            let l1 = cx(k / two_pi * nd * h1.re / r, T::zero());
            let l2 = l - l1 * lg;
            let ie = cx(T::zero(), eta);
            Ok((l1 + ie * m1, l2 + ie * m2))
        }
    }
}

/// Row of the discrete `K - i eta S` at the boundary point with parameter
/// `t` (not a node), for densities given at the nodes of `mesh`.
pub(crate) fn combined_trace_row<T: Scalar>(mesh: &BoundaryMesh<T>, t: T, k: T, eta: T) -> Result<Vec<Cx<T>>> {
    let m = mesh.len();
    let h = T::lit(std::f64::consts::TAU) / T::int(m as i64);
    let x = mesh.curve.eval(t).x;
    (0..m)
        .map(|j| {
            let s = t - h * T::int(j as i64);
            let (k1, k2) = split_at(mesh, x, s, j, k, Some(eta))?;
            Ok((k1 * log_weight(m, s) + k2 * h) * T::lit(-0.5))
        })
        .collect()
}

/// Self-interaction matrix of the boundary operator. Combined kind: the
/// discrete `K - i eta S` (double minus `i eta` single layer, principal value);
/// single-layer kind: the discrete `S`.
fn self_block<T: Scalar>(mesh: &BoundaryMesh<T>, k: T, kind: KernelKind, eta: T) -> Result<CMatrix<T>> {
    let m = mesh.len();
    let w = log_weights::<T>(m);
    let h = T::lit(std::f64::consts::TAU) / T::int(m as i64);
    let e = match kind {
        KernelKind::SingleLayer => None,
        KernelKind::Combined => Some(eta),
    };
    let sign = match kind {
        KernelKind::SingleLayer => T::lit(0.5),
        KernelKind::Combined => T::lit(-0.5),
    };
    let rows: Vec<Vec<Cx<T>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    let (k1, k2) = split_kernel(mesh, i, j, k, e)?;
                    Ok((k1 * w[(i + m - j) % m] + k2 * h) * sign)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_vec(m, m, rows.into_iter().flatten().collect()))
}

/// Plain-quadrature kernel value times source weight.
#[inline]
pub(crate) fn smooth_entry<T: Scalar>(
    mesh: &BoundaryMesh<T>,
    j: usize,
    x: Point2<T>,
    k: T,
    kind: KernelKind,
    eta: T,
) -> Result<Cx<T>> {
    let d = x - mesh.nodes[j];
    let r = d.norm();
    let quarter_i = cx(T::zero(), T::lit(0.25));
    let w = mesh.weights[j];
    match kind {
        KernelKind::SingleLayer => {
            let h0 = crate::specfun::hankel1(0, k * r)?;
            Ok(quarter_i * h0 * w)
        }
        KernelKind::Combined => {
            let (h0, h1) = hankel01(k * r)?;
            let dn = quarter_i * h1 * (k * mesh.normals[j].dot(d) / r);
            let sl = quarter_i * h0 * cx(T::zero(), -eta);
            Ok((dn + sl) * w)
        }
    }
}

fn check_clear<T: Scalar>(mesh: &BoundaryMesh<T>, pts: &[Point2<T>]) -> Result<()> {
    let tol = mesh.spacing() / T::lit(2.0);
    for p in pts {
        if mesh.node_distance(*p) < tol {
            return Err(Error::Geometry(format!(
                "target ({:?}, {:?}) lies within half a mesh spacing of the boundary; use boundary traces",
                p.x, p.y
            )));
        }
    }
    Ok(())
}

/// Assembles the layer operator from `source` to `target`. `eta` is the
/// coupling parameter of the combined kernel (ignored for the single layer).
pub fn assemble_layer<T: Scalar>(
    source: &BoundaryMesh<T>,
    target: Target<'_, T>,
    k: T,
    kind: KernelKind,
    eta: T,
) -> Result<LayerMatrix<T>> {
    let pts: &[Point2<T>] = match target {
        Target::SameMesh => {
            let entries = self_block(source, k, kind, eta)?;
            return Ok(LayerMatrix { entries, kind, source_nodes: source.len(), target_nodes: source.len() });
        }
        Target::Mesh(m) => &m.nodes,
        Target::Points(p) => p,
    };
    check_clear(source, pts)?;
    let entries = point_matrix(source, pts, k, kind, eta)?;
    Ok(LayerMatrix { entries, kind, source_nodes: source.len(), target_nodes: pts.len() })
}

pub(crate) fn point_matrix<T: Scalar>(
    source: &BoundaryMesh<T>,
    pts: &[Point2<T>],
    k: T,
    kind: KernelKind,
    eta: T,
) -> Result<CMatrix<T>> {
    let m = source.len();
    let rows: Vec<Vec<Cx<T>>> = pts
        .par_iter()
        .map(|&x| (0..m).map(|j| smooth_entry(source, j, x, k, kind, eta)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_vec(pts.len(), m, rows.into_iter().flatten().collect()))
}
