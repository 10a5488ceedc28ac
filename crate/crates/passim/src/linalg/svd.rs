use super::{cdot, norm2, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Scalar};
use num_traits::Zero;

/// Thin singular value decomposition `A = U diag(s) V^H`, singular values in
/// non-increasing order.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: CMatrix<T>,
    pub s: Vec<T>,
    pub v: CMatrix<T>,
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD. Accurate to working precision in the
/// small singular values as well as the large ones.
pub fn svd<T: Scalar>(a: &CMatrix<T>) -> Result<Svd<T>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Degenerate("svd of an empty matrix".into()));
    }
    if a.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Degenerate("svd input has non-finite entries".into()));
    }
    if a.rows() < a.cols() {
        let t = svd(&a.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<Cx<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Cx<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![Cx::zero(); n];
            e[j] = Cx::new(T::one(), T::zero());
            e
        })
        .collect();
    let tol = T::epsilon() * T::int(m as i64).sqrt();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = w[i].iter().map(|z| z.norm_sqr()).sum::<T>();
                let beta = w[j].iter().map(|z| z.norm_sqr()).sum::<T>();
                let gamma = cdot(&w[i], &w[j]);
                let g = gamma.norm();
                if g == T::zero() || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, c, s, phase);
                rotate(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!("Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")));
    }
    let mut order: Vec<(usize, T)> = w.iter().map(|c| norm2(c)).enumerate().collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let smax = order[0].1;
    let mut u_cols: Vec<Vec<Cx<T>>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v_out = CMatrix::zeros(n, n);
    let floor = smax * T::epsilon() * T::int(m as i64);
    let mut deficient = Vec::new();
    for (col, (idx, sig)) in order.iter().enumerate() {
        s.push(*sig);
        for r in 0..n {
            v_out[(r, col)] = v[*idx][r];
        }
        if *sig > floor && *sig > T::zero() {
            u_cols.push(w[*idx].iter().map(|z| *z / *sig).collect());
        } else {
            deficient.push(col);
            u_cols.push(vec![Cx::zero(); m]);
        }
    }
    // Complete U for (numerically) zero singular values: the coordinate
    // vector with the largest residual after two Gram-Schmidt passes.
    let mut filled: Vec<bool> = (0..n).map(|c| !deficient.contains(&c)).collect();
    for &col in &deficient {
        let mut best: Option<(T, Vec<Cx<T>>)> = None;
        for probe in 0..m {
            let mut e = vec![Cx::zero(); m];
            e[probe] = Cx::new(T::one(), T::zero());
            for _ in 0..2 {
                for (other, _) in u_cols.iter().zip(&filled).filter(|(_, f)| **f) {
                    let p = cdot(other, &e);
                    for (x, o) in e.iter_mut().zip(other) {
                        *x = *x - p * *o;
                    }
                }
            }
            let nn = norm2(&e);
            if best.as_ref().map_or(true, |b| nn > b.0) {
                best = Some((nn, e));
            }
        }
        let (nn, e) = best.expect("m > 0");
        if !(nn > T::lit(1e-3)) {
            return Err(Error::Degenerate("cannot complete left singular basis".into()));
        }
        u_cols[col] = e.iter().map(|z| *z / nn).collect();
        filled[col] = true;
    }
    let u = CMatrix::from_fn(m, n, |i, j| u_cols[j][i]);
    Ok(Svd { u, s, v: v_out })
}

/// Applies the unitary plane rotation
/// `(x_i, x_j) <- (c x_i - s conj(p) x_j, s p x_i + c x_j)`.
fn rotate<T: Scalar>(cols: &mut [Vec<Cx<T>>], i: usize, j: usize, c: T, s: T, p: Cx<T>) {
    let (lo, hi) = cols.split_at_mut(j);
    let (xi, xj) = (&mut lo[i], &mut hi[0]);
    let pc = p.conj();
    for (a, b) in xi.iter_mut().zip(xj.iter_mut()) {
        let (ai, bj) = (*a, *b);
        *a = ai * c - pc * bj * s;
        *b = p * ai * s + bj * c;
    }
}

impl<T: Scalar> Svd<T> {
    /// Reassembles `U diag(s) V^H`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let (m, n) = (self.u.rows(), self.s.len());
        CMatrix::from_fn(m, self.v.rows(), |i, j| {
            (0..n).fold(Cx::zero(), |acc, k| acc + self.u[(i, k)] * self.v[(j, k)].conj() * self.s[k])
        })
    }
}
