//! Cylinder functions, the free-space Green's function and Graf's addition
//! theorem.

mod bessel;

pub use bessel::{jy_seq, j_seq, ASYM_SWITCH};

use crate::error::{Error, Result};
use crate::point::Point2;
use crate::scalar::{cis, cx, Cx, Scalar};
use bessel::{check_arg, parity};

/// Stopping rule for truncated series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    /// Stop once the newest terms fall below `rel_tol` times the partial sum.
    pub rel_tol: f64,
    /// Largest order `N`; the sum runs over `|n| <= N`.
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { rel_tol: 1e-15, max_terms: 400 }
    }
}

/// Value of a truncated series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesOutcome<T> {
    pub value: Cx<T>,
    /// Largest order included.
    pub terms: usize,
    /// True when `max_terms` was reached before `rel_tol` was met.
    pub truncated: bool,
}

/// Bessel function of the first kind `J_n(x)`.
///
/// Negative `x` is handled by parity. Values below the smallest normal
/// number underflow to zero, e.g. `J_60(1e-4)`.
pub fn bessel_j<T: Scalar>(n: i32, x: T) -> Result<T> {
    check_arg(x, "bessel_j")?;
    let m = n.unsigned_abs() as usize;
    if x == T::zero() {
        return Ok(if n == 0 { T::one() } else { T::zero() });
    }
    let (ax, sx) = if x < T::zero() { (-x, parity::<T>(n)) } else { (x, T::one()) };
    let j = j_seq(m, ax)[m];
    let s = if n < 0 { parity::<T>(n) } else { T::one() };
    Ok(j * s * sx)
}

/// Bessel function of the second kind `Y_n(x)`, `x > 0`.
pub fn bessel_y<T: Scalar>(n: i32, x: T) -> Result<T> {
    check_arg(x, "bessel_y")?;
    if x <= T::zero() {
        return Err(Error::Singularity(format!("bessel_y: argument {x:?} <= 0")));
    }
    let m = n.unsigned_abs() as usize;
    let y = jy_seq(m, x).1[m];
    if !y.is_finite() {
        return Err(Error::Domain(format!("bessel_y: Y_{n}({x:?}) overflows")));
    }
    let s = if n < 0 { parity::<T>(n) } else { T::one() };
    Ok(y * s)
}

/// Hankel function of the first kind `H_n(x) = J_n(x) + i Y_n(x)`, `x > 0`.
///
/// Fails with a domain error when `Y_n` overflows, e.g. `H_60(1e-4)`.
pub fn hankel1<T: Scalar>(n: i32, x: T) -> Result<Cx<T>> {
    check_arg(x, "hankel1")?;
    if x <= T::zero() {
        return Err(Error::Singularity(format!("hankel1: argument {x:?} <= 0")));
    }
    let m = n.unsigned_abs() as usize;
    let (j, y) = jy_seq(m, x);
    if !y[m].is_finite() {
        return Err(Error::Domain(format!("hankel1: H_{n}({x:?}) overflows")));
    }
    let s = if n < 0 { parity::<T>(n) } else { T::one() };
    Ok(cx(j[m] * s, y[m] * s))
}

/// `H_0(x), ..., H_nmax(x)`.
pub fn hankel1_seq<T: Scalar>(nmax: usize, x: T) -> Result<Vec<Cx<T>>> {
    check_arg(x, "hankel1_seq")?;
    if x <= T::zero() {
        return Err(Error::Singularity(format!("hankel1_seq: argument {x:?} <= 0")));
    }
    let (j, y) = jy_seq(nmax, x);
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("hankel1_seq: overflow at x = {x:?}")));
    }
    Ok(j.into_iter().zip(y).map(|(a, b)| cx(a, b)).collect())
}

/// `H_0(x)` and `H_1(x)` together.
pub fn hankel01<T: Scalar>(x: T) -> Result<(Cx<T>, Cx<T>)> {
    let h = hankel1_seq(1, x)?;
    Ok((h[0], h[1]))
}

/// `J_n'(x)`.
pub fn bessel_j_deriv<T: Scalar>(n: i32, x: T) -> Result<T> {
    let a = bessel_j(n - 1, x)?;
    let b = bessel_j(n + 1, x)?;
    Ok((a - b) / T::lit(2.0))
}

/// `H_n'(x)`.
pub fn hankel1_deriv<T: Scalar>(n: i32, x: T) -> Result<Cx<T>> {
    let a = hankel1(n - 1, x)?;
    let b = hankel1(n + 1, x)?;
    Ok((a - b) / T::lit(2.0))
}

/// Free-space Green's function `(i/4) H_0(k |x - z|)`.
pub fn green<T: Scalar>(x: Point2<T>, z: Point2<T>, k: T) -> Result<Cx<T>> {
    let r = x.dist(z);
    if r == T::zero() {
        return Err(Error::Singularity("green: coincident points".into()));
    }
    let h = hankel1(0, k * r)?;
    Ok(h * cx(T::zero(), T::lit(0.25)))
}

/// `H_0(k |x - z|)` expanded about `y` by Graf's addition theorem,
///
/// `sum_n H_n(k |z - y|) J_n(k |x - y|) e^{i n (a_x - a_z)}`,
///
/// with `a_x`, `a_z` the polar angles of `x - y` and `z - y`. Requires
/// `|x - y| < |z - y|`.
pub fn graf_h0<T: Scalar>(
    x: Point2<T>,
    y: Point2<T>,
    z: Point2<T>,
    k: T,
    policy: TruncationPolicy,
) -> Result<SeriesOutcome<T>> {
    let dx = x - y;
    let dz = z - y;
    let (rx, rz) = (dx.norm(), dz.norm());
    if !(rx < rz) {
        return Err(Error::Domain(format!(
            "graf_h0: needs |x - y| < |z - y|, got {:?} >= {:?}",
            rx, rz
        )));
    }
    let nmax = policy.max_terms;
    let h = hankel1_seq(nmax, k * rz).or_else(|_| {
        // Orders that overflow contribute nothing representable; shorten.
        let mut m = nmax;
        loop {
            m /= 2;
            if let Ok(v) = hankel1_seq(m, k * rz) {
                break Ok::<_, Error>(v);
            }
            if m == 0 {
                break Err(Error::Domain("graf_h0: H_0 overflow".into()));
            }
        }
    })?;
    let nmax = h.len() - 1;
    let j = if rx == T::zero() {
        let mut v = vec![T::zero(); nmax + 1];
        v[0] = T::one();
        v
    } else {
        j_seq(nmax, k * rx)
    };
    let dt = dx.angle() - dz.angle();
    let tol = T::lit(policy.rel_tol);
    let mut sum = h[0] * j[0];
    let mut quiet = 0;
    for n in 1..=nmax {
        let p = cis(T::int(n as i64) * dt);
        // e^{i n t} + (-1)^n (-1)^n e^{-i n t} = 2 cos(n t)
        let coef = h[n] * j[n];
        sum = sum + coef * (p + p.conj());
        if coef.norm() * T::lit(2.0) <= tol * sum.norm() && T::int(n as i64) > k * rx {
            quiet += 1;
            if quiet >= 2 {
                return Ok(SeriesOutcome { value: sum, terms: n, truncated: false });
            }
        } else {
            quiet = 0;
        }
    }
    Ok(SeriesOutcome { value: sum, terms: nmax, truncated: true })
}
