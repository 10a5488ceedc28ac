use super::layer::{assemble_layer, combined_trace_row, interp_weight, smooth_entry, KernelKind, Target};
use crate::error::{Error, Result};
use crate::geometry::{discretize, BoundaryMesh, SceneConfig};
use crate::linalg::{CMatrix, Lu};
use crate::point::Point2;
use crate::scalar::{cx, Cx, Scalar};
use crate::specfun::green;
use std::sync::Arc;

/// Condition estimates above this are treated as a singular system.
pub const MAX_CONDITION: f64 = 1e12;

/// Combined-layer density `psi` on one or more boundary meshes; the field is
/// `u(x) = int [d phi(x, y)/d nu(y) - i eta phi(x, y)] psi(y) ds(y)`.
#[derive(Clone, Debug)]
pub struct SurfaceDensity<T> {
    pub meshes: Arc<[BoundaryMesh<T>]>,
    pub eta: T,
    /// Node values, meshes concatenated in order.
    pub values: Vec<Cx<T>>,
}

/// Factored exterior Dirichlet problem for a (possibly multi-component)
/// sound-soft obstacle.
#[derive(Clone, Debug)]
pub struct DirichletSolver<T> {
    meshes: Arc<[BoundaryMesh<T>]>,
    k: T,
    eta: T,
    lu: Lu<T>,
}

fn total_nodes<T>(meshes: &[BoundaryMesh<T>]) -> usize {
    meshes.iter().map(|m| m.nodes.len()).sum()
}

impl<T: Scalar> DirichletSolver<T> {
    /// Assembles and factors `(1/2) I + K - i eta S` over all components.
    pub fn new(meshes: Vec<BoundaryMesh<T>>, k: T, eta: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::Domain(format!("wavenumber {k:?} must be positive")));
        }
        if meshes.is_empty() {
            return Err(Error::Geometry("no boundary meshes".into()));
        }
        let n = total_nodes(&meshes);
        let mut a = CMatrix::zeros(n, n);
        let mut row0 = 0;
        for (ia, ma) in meshes.iter().enumerate() {
            let mut col0 = 0;
            for (ib, mb) in meshes.iter().enumerate() {
                let block = if ia == ib {
                    assemble_layer(mb, Target::SameMesh, k, KernelKind::Combined, eta)?
                } else {
                    assemble_layer(mb, Target::Mesh(ma), k, KernelKind::Combined, eta)?
                };
                for i in 0..ma.len() {
                    for j in 0..mb.len() {
                        a[(row0 + i, col0 + j)] = block.entries[(i, j)];
                    }
                }
                col0 += mb.len();
            }
            row0 += ma.len();
        }
        for i in 0..n {
            a[(i, i)] = a[(i, i)] + cx(T::lit(0.5), T::zero());
        }
        let lu = Lu::new(&a, MAX_CONDITION)?;
        Ok(DirichletSolver { meshes: meshes.into(), k, eta, lu })
    }

    /// Solver for the obstacles of a scene, `eta = k`.
    pub fn for_scene(cfg: &SceneConfig) -> Result<Self> {
        let k = T::lit(cfg.k);
        let meshes = cfg
            .curves::<T>()?
            .iter()
            .map(|c| discretize(c, cfg.boundary_nodes))
            .collect::<Result<Vec<_>>>()?;
        if meshes.is_empty() {
            return Err(Error::Config("scene has no obstacles".into()));
        }
        Self::new(meshes, k, k)
    }

    pub fn meshes(&self) -> &[BoundaryMesh<T>] {
        &self.meshes
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    /// 1-norm condition estimate of the discrete system.
    pub fn condition(&self) -> f64 {
        self.lu.cond
    }

    pub fn len(&self) -> usize {
        self.lu.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All boundary nodes, meshes concatenated.
    pub fn nodes(&self) -> Vec<Point2<T>> {
        self.meshes.iter().flat_map(|m| m.nodes.iter().copied()).collect()
    }

    /// Density whose field equals `data` on the boundary nodes.
    pub fn solve(&self, data: &[Cx<T>]) -> Result<SurfaceDensity<T>> {
        if data.len() != self.len() {
            return Err(Error::Domain(format!("{} boundary values for {} nodes", data.len(), self.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite boundary data".into()));
        }
        Ok(SurfaceDensity { meshes: self.meshes.clone(), eta: self.eta, values: self.lu.solve(data) })
    }

    /// Applies the inverse of the boundary operator.
    pub fn apply_inverse(&self, data: &[Cx<T>]) -> Vec<Cx<T>> {
        self.lu.solve(data)
    }

    /// Matrix mapping node densities to field values at `points`.
    pub fn evaluation_matrix(&self, points: &[Point2<T>]) -> Result<CMatrix<T>> {
        evaluation_matrix(&self.meshes, points, self.k, self.eta)
    }

    /// `-phi(., z)` at the boundary nodes.
    pub fn point_source_data(&self, z: Point2<T>) -> Result<Vec<Cx<T>>> {
        self.meshes.iter().flat_map(|m| m.nodes.iter()).map(|&x| green(x, z, self.k).map(|g| -g)).collect()
    }

    /// Scattered field `u^s(., z)` of a point source at `z`.
    pub fn scattered_field(&self, z: Point2<T>, points: &[Point2<T>]) -> Result<Vec<Cx<T>>> {
        let d = self.solve(&self.point_source_data(z)?)?;
        eval_field(&d, points, self.k)
    }

    /// `E A^{-1}`: maps boundary data straight to field values at `points`.
    pub fn data_to_field(&self, points: &[Point2<T>]) -> Result<CMatrix<T>> {
        let e = self.evaluation_matrix(points)?;
        let n = self.len();
        // (E A^{-1})^T = A^{-T} E^T, one transposed solve per point.
        let mut out = CMatrix::zeros(points.len(), n);
        for i in 0..points.len() {
            let r = self.lu.solve_transpose(e.row(i));
            out.row_mut(i).copy_from_slice(&r);
        }
        Ok(out)
    }
}

pub(crate) fn evaluation_matrix<T: Scalar>(
    meshes: &[BoundaryMesh<T>],
    points: &[Point2<T>],
    k: T,
    eta: T,
) -> Result<CMatrix<T>> {
    let n = total_nodes(meshes);
    let mut out = CMatrix::zeros(points.len(), n);
    let mut col0 = 0;
    for m in meshes {
        let b = assemble_layer(m, Target::Points(points), k, KernelKind::Combined, eta)?;
        for i in 0..points.len() {
            for j in 0..m.len() {
                out[(i, col0 + j)] = b.entries[(i, j)];
            }
        }
        col0 += m.len();
    }
    Ok(out)
}

impl<T: Scalar> SurfaceDensity<T> {
    /// Boundary values of the field on component `c` at parameters `ts`
    /// (use this instead of [`eval_field`] on the boundary). Uses the
    /// trigonometric interpolant of the density and the log-quadrature at
    /// the targets, so it is an independent check of the Nyström solve.
    pub fn boundary_trace(&self, c: usize, ts: &[T], k: T) -> Result<Vec<Cx<T>>> {
        let mesh = self.meshes.get(c).ok_or_else(|| Error::Domain(format!("no boundary component {c}")))?;
        let m = mesh.len();
        let off: usize = self.meshes[..c].iter().map(|m| m.len()).sum();
        let own = &self.values[off..off + m];
        let h = T::lit(std::f64::consts::TAU) / T::int(m as i64);
        ts.iter()
            .map(|&t| {
                let row = combined_trace_row(mesh, t, k, self.eta)?;
                let mut u = Cx::new(T::zero(), T::zero());
                for j in 0..m {
                    let w = interp_weight(m, t - h * T::int(j as i64));
                    u = u + own[j] * (row[j] + cx(w / T::lit(2.0), T::zero()));
                }
                let x = mesh.curve.eval(t).x;
                let mut col0 = 0;
                for (b, other) in self.meshes.iter().enumerate() {
                    if b != c {
                        for j in 0..other.len() {
                            u = u + smooth_entry(other, j, x, k, KernelKind::Combined, self.eta)? * self.values[col0 + j];
                        }
                    }
                    col0 += other.len();
                }
                Ok(u)
            })
            .collect()
    }
}

/// Solves the exterior Dirichlet problem with data given at the mesh nodes.
pub fn solve_dirichlet<T: Scalar>(mesh: &BoundaryMesh<T>, data: &[Cx<T>], k: T, eta: T) -> Result<SurfaceDensity<T>> {
    DirichletSolver::new(vec![mesh.clone()], k, eta)?.solve(data)
}

/// Field of a density at points away from the boundary.
pub fn eval_field<T: Scalar>(density: &SurfaceDensity<T>, points: &[Point2<T>], k: T) -> Result<Vec<Cx<T>>> {
    let mut out = vec![Cx::new(T::zero(), T::zero()); points.len()];
    let mut col0 = 0;
    for m in density.meshes.iter() {
        let b = assemble_layer(m, Target::Points(points), k, KernelKind::Combined, density.eta)?;
        let v = b.entries.matvec(&density.values[col0..col0 + m.len()]);
        for (o, x) in out.iter_mut().zip(v) {
            *o = *o + x;
        }
        col0 += m.len();
    }
    Ok(out)
}

/// `u^s(., z)` for the obstacle bounded by `meshes`, coupling `eta = k`.
pub fn scattered_field_us<T: Scalar>(
    meshes: &[BoundaryMesh<T>],
    z: Point2<T>,
    points: &[Point2<T>],
    k: T,
) -> Result<Vec<Cx<T>>> {
    for m in meshes {
        if m.node_distance(z) < m.spacing() / T::lit(2.0) {
            return Err(Error::Geometry("source point on the obstacle boundary".into()));
        }
    }
    DirichletSolver::new(meshes.to_vec(), k, k)?.scattered_field(z, points)
}

