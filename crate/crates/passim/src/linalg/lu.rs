use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Scalar};
use num_traits::Zero;

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
    /// 1-norm condition number estimate of the factored matrix.
    pub cond: f64,
}

impl<T: Scalar> Lu<T> {
    /// Factors a square matrix. Fails when a pivot vanishes or the 1-norm
    /// condition estimate exceeds `max_cond`.
    pub fn new(a: &CMatrix<T>, max_cond: f64) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return Err(Error::Solver { msg: format!("LU of non-square {}x{}", n, a.cols()), cond: f64::INFINITY });
        }
        let anorm = a.norm1().f64();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, T::zero()), |b, c| if c.1 > b.1 { c } else { b });
            if pmax == T::zero() || !pmax.is_finite() {
                return Err(Error::Solver { msg: format!("zero pivot in column {k}"), cond: f64::INFINITY });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            let (head, tail) = lu.as_mut_slice().split_at_mut((k + 1) * n);
            let krow = &head[k * n..(k + 1) * n];
            for row in tail.chunks_mut(n) {
                let l = row[k] / piv;
                row[k] = l;
                if l.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    row[j] = row[j] - l * krow[j];
                }
            }
        }
        let mut f = Lu { lu, perm, cond: f64::NAN };
        let inv_norm = f.inverse().norm1().f64();
        f.cond = anorm * inv_norm;
        if !(f.cond <= max_cond) {
            return Err(Error::Solver { msg: "matrix is numerically singular".into(), cond: f.cond });
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Cx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s = s - row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in (i + 1)..n {
                s = s - row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.dim();
        let mut w = b.to_vec();
        // U^T w' = b
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s = s - self.lu[(j, i)] * w[j];
            }
            w[i] = s / self.lu[(i, i)];
        }
        // L^T v = w'
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in (i + 1)..n {
                s = s - self.lu[(j, i)] * w[j];
            }
            w[i] = s;
        }
        let mut x = vec![Cx::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix<T> {
        let n = self.dim();
        let mut inv = CMatrix::zeros(n, n);
        let mut e = vec![Cx::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Cx::zero());
            e[j] = Cx::new(T::one(), T::zero());
            let c = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = c[i];
            }
        }
        inv
    }
}
