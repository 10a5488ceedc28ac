use super::dirichlet::{evaluation_matrix, DirichletSolver};
use super::disk::{DiskScatterer, Fourier};
use crate::error::{Error, Result};
use crate::linalg::{norm2, CMatrix, Lu};
use crate::point::Point2;
use crate::scalar::{cx, Cx, Scalar};
use crate::specfun::green;

/// Obstacle `D` coupled to a small disk. The disk density is kept in
/// Fourier modes and inverted analytically; `D` keeps its combined-layer
/// density. Eliminating the disk gives
/// `(I - A_eps) g = A^{-1} (f_D - T S_eps^{-1} f_eps)`,
/// `A_eps = A^{-1} T S_eps^{-1} T^T`, solved through the rank-`2N+1` update.
#[derive(Clone, Debug)]
pub struct BlockSystem<'a, T> {
    solver: &'a DirichletSolver<T>,
    pub disk: DiskScatterer<T>,
    order: usize,
    disk_nodes: Vec<Point2<T>>,
    /// Disk density coefficients to single-layer trace on the `D` nodes.
    pub t_eps: CMatrix<T>,
    /// `D` density to Fourier coefficients of its field on the disk.
    pub t_eps_t: CMatrix<T>,
    p: CMatrix<T>,
    q: CMatrix<T>,
    small: Option<Lu<T>>,
    /// Estimate of the spectral norm of `A_eps`.
    pub contraction_norm_estimate: f64,
}

/// Densities of a coupled solve.
#[derive(Clone, Debug)]
pub struct BlockSolution<T> {
    /// Combined-layer density on `D`.
    pub g: Vec<Cx<T>>,
    /// Single-layer density coefficients on the disk.
    pub h: Fourier<T>,
}

/// Even-odd rule against the polygon through `poly`.
fn encloses<T: Scalar>(poly: &[Point2<T>], p: Point2<T>) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            inside = !inside;
        }
    }
    inside
}

fn dft_matrix<T: Scalar>(m: usize) -> CMatrix<T> {
    let n = (m - 1) / 2;
    let h = T::lit(std::f64::consts::TAU) / T::int(m as i64);
    CMatrix::from_fn(m, m, |r, j| {
        let q = r as i64 - n as i64;
        crate::scalar::cis(-h * T::int(q * j as i64)) / T::int(m as i64)
    })
}

impl<'a, T: Scalar> BlockSystem<'a, T> {
    pub fn new(solver: &'a DirichletSolver<T>, disk: DiskScatterer<T>) -> Result<Self> {
        let k = solver.k();
        let order = disk.modes(k);
        let disk_nodes = disk.nodes(k);
        let d_nodes = solver.nodes();
        for x in &d_nodes {
            if x.dist(disk.center) <= disk.radius {
                return Err(Error::Geometry("disk overlaps the obstacle".into()));
            }
        }
        if solver.meshes().iter().any(|m| encloses(&m.nodes, disk.center)) {
            return Err(Error::Geometry("disk inside the obstacle".into()));
        }
        let t_eps = disk.single_layer_matrix(k, order, &d_nodes)?;
        let e = evaluation_matrix(solver.meshes(), &disk_nodes, k, solver.eta())?;
        let t_eps_t = dft_matrix::<T>(disk_nodes.len()).matmul(&e);
        let unit = disk.slp_inverse(k, &Fourier { coeffs: vec![cx(T::one(), T::zero()); 2 * order + 1] })?;
        let q = CMatrix::from_fn(t_eps_t.rows(), t_eps_t.cols(), |r, c| unit.coeffs[r] * t_eps_t[(r, c)]);
        let kk = t_eps.cols();
        let mut p = CMatrix::zeros(t_eps.rows(), kk);
        for c in 0..kk {
            let col = solver.apply_inverse(&t_eps.column(c));
            for (r, v) in col.into_iter().enumerate() {
                p[(r, c)] = v;
            }
        }
        let mut sys = BlockSystem {
            solver,
            disk,
            order,
            disk_nodes,
            t_eps,
            t_eps_t,
            p,
            q,
            small: None,
            contraction_norm_estimate: 0.0,
        };
        sys.refactor()?;
        Ok(sys)
    }

    fn refactor(&mut self) -> Result<()> {
        self.contraction_norm_estimate = contraction(&self.p, &self.q);
        if !(self.contraction_norm_estimate < 1.0) {
            return Err(Error::Config(format!(
                "coupling operator norm {:.3} >= 1: disk too close to the obstacle for the block solve",
                self.contraction_norm_estimate
            )));
        }
        let qp = self.q.matmul(&self.p);
        let small = CMatrix::identity(qp.rows()).sub(&qp);
        self.small = Some(Lu::new(&small, 1e14)?);
        Ok(())
    }

    /// Drops the interaction blocks, leaving two independent scatterers.
    pub fn decouple(&mut self) {
        let zero = |m: &CMatrix<T>| CMatrix::zeros(m.rows(), m.cols());
        self.t_eps = zero(&self.t_eps);
        self.t_eps_t = zero(&self.t_eps_t);
        self.p = zero(&self.p);
        self.q = zero(&self.q);
        self.refactor().expect("identity is invertible");
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Collocation nodes on the disk boundary.
    pub fn disk_nodes(&self) -> &[Point2<T>] {
        &self.disk_nodes
    }

    /// Boundary data `-phi(., z)` on `D` and on the disk.
    pub fn point_source_data(&self, z: Point2<T>) -> Result<(Vec<Cx<T>>, Vec<Cx<T>>)> {
        let k = self.solver.k();
        let fd = self.solver.point_source_data(z)?;
        let fe = self.disk_nodes.iter().map(|&x| green(x, z, k).map(|g| -g)).collect::<Result<_>>()?;
        Ok((fd, fe))
    }

    pub fn solve(&self, f_d: &[Cx<T>], f_eps: &[Cx<T>]) -> Result<BlockSolution<T>> {
        let k = self.solver.k();
        if f_eps.len() != self.disk_nodes.len() || f_d.len() != self.solver.len() {
            return Err(Error::Domain("boundary data length mismatch".into()));
        }
        let c = Fourier::from_samples(f_eps);
        let s = self.disk.slp_inverse(k, &c)?;
        let ts = self.t_eps.matvec(&s.coeffs);
        let rhs: Vec<Cx<T>> = f_d.iter().zip(&ts).map(|(a, b)| *a - *b).collect();
        let b = self.solver.apply_inverse(&rhs);
        let qb = self.q.matvec(&b);
        let y = self.small.as_ref().expect("factored").solve(&qb);
        let py = self.p.matvec(&y);
        let g: Vec<Cx<T>> = b.iter().zip(&py).map(|(a, b)| *a + *b).collect();
        let tg = self.t_eps_t.matvec(&g);
        let resid = Fourier { coeffs: c.coeffs.iter().zip(&tg).map(|(a, b)| *a - *b).collect() };
        let h = self.disk.slp_inverse(k, &resid)?;
        Ok(BlockSolution { g, h })
    }

    /// Total scattered field of a solution at `points`.
    pub fn field(&self, sol: &BlockSolution<T>, points: &[Point2<T>]) -> Result<Vec<Cx<T>>> {
        let e = evaluation_matrix(self.solver.meshes(), points, self.solver.k(), self.solver.eta())?;
        self.field_with(&e, sol, points)
    }

    /// As [`field`](Self::field) with a precomputed `D` evaluation matrix.
    pub fn field_with(&self, e: &CMatrix<T>, sol: &BlockSolution<T>, points: &[Point2<T>]) -> Result<Vec<Cx<T>>> {
        let a = e.matvec(&sol.g);
        let b = self.disk.single_layer_field(self.solver.k(), &sol.h, points)?;
        Ok(a.into_iter().zip(b).map(|(x, y)| x + y).collect())
    }
}

/// Spectral norm of `P Q` by power iteration on the small matrix
/// `(P^H P)(Q Q^H)`, which shares the nonzero spectrum of `(PQ)^H PQ`.
fn contraction<T: Scalar>(p: &CMatrix<T>, q: &CMatrix<T>) -> f64 {
    let w = p.adjoint().matmul(p).matmul(&q.matmul(&q.adjoint()));
    let n = w.rows();
    let mut v: Vec<Cx<T>> = (0..n).map(|i| cx(T::one(), T::lit(0.1) * T::int(i as i64))).collect();
    let mut lam = T::zero();
    for _ in 0..300 {
        let nv = norm2(&v);
        if nv == T::zero() {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x = *x / nv);
        let wv = w.matvec(&v);
        let next = norm2(&wv);
        let done = (next - lam).abs() <= T::lit(1e-12) * next;
        lam = next;
        v = wv;
        if done {
            break;
        }
    }
    lam.sqrt().f64()
}

/// Scattered field of `D` together with the disk, for boundary data
/// `f_d` on the nodes of `D` and `f_eps` on [`BlockSystem::disk_nodes`].
pub fn two_obstacle_field<T: Scalar>(
    solver: &DirichletSolver<T>,
    disk: DiskScatterer<T>,
    f_d: &[Cx<T>],
    f_eps: &[Cx<T>],
    points: &[Point2<T>],
) -> Result<Vec<Cx<T>>> {
    let sys = BlockSystem::new(solver, disk)?;
    let sol = sys.solve(f_d, f_eps)?;
    sys.field(&sol, points)
}
