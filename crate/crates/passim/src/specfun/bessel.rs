//! Integer-order Bessel functions of the first and second kind.
//!
//! Below `ASYM_SWITCH` all orders come from Miller's backward recurrence
//! normalised by `J0 + 2 sum J_2k = 1`; `Y0` and `Y1` then follow from the
//! Neumann series in the same `J_k`, and higher `Y_n` from the (stable)
//! forward recurrence. Above the switch `J0, J1, Y0, Y1` come from Hankel's
//! asymptotic expansion and the recurrences are run in their stable
//! directions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Argument at which the asymptotic expansion takes over.
pub const ASYM_SWITCH: f64 = 25.0;

fn big<T: Scalar>() -> T {
    T::max_value().sqrt()
}

/// Miller start index for orders up to `nmax` at argument `x`.
fn miller_start(nmax: usize, x: f64) -> usize {
    let m = (nmax as f64).max(x);
    let n = m + 20.0 + (160.0 * m).sqrt();
    let n = n.ceil() as usize;
    n + (n & 1)
}

/// Backward recurrence from `start`, returning unnormalised values for
/// orders `0..=start`. Entries may underflow to zero after rescaling.
fn miller_raw<T: Scalar>(start: usize, x: T) -> Vec<T> {
    let mut v = vec![T::zero(); start + 2];
    v[start + 1] = T::zero();
    v[start] = T::min_positive_value().sqrt();
    let two_over_x = T::lit(2.0) / x;
    let big = big::<T>();
    for k in (1..=start).rev() {
        let next = T::int(k as i64) * two_over_x * v[k] - v[k + 1];
        v[k - 1] = next;
        if next.abs() > big {
            let s = T::one() / big;
            for e in v.iter_mut().skip(k - 1) {
                *e = *e * s;
            }
        }
    }
    v.truncate(start + 1);
    v
}

/// `J_0..=J_start` normalised by the Neumann sum.
fn miller_normalised<T: Scalar>(start: usize, x: T) -> Vec<T> {
    let mut v = miller_raw(start, x);
    let mut norm = v[0];
    let mut k = 2;
    while k <= start {
        norm = norm + T::lit(2.0) * v[k];
        k += 2;
    }
    for e in v.iter_mut() {
        *e = *e / norm;
    }
    v
}

/// `(J0, J1, Y0, Y1)` from Hankel's expansion; `x >= ASYM_SWITCH`.
pub(crate) fn asym01<T: Scalar>(x: T) -> (T, T, T, T) {
    let (p0, q0) = hankel_pq(0, x);
    let (p1, q1) = hankel_pq(1, x);
    let (s, c) = x.sin_cos();
    let r = (T::lit(2.0) / (T::PI() * x)).sqrt() * T::FRAC_1_SQRT_2();
    // e^{i(x - pi/4)} = ((c + s) + i (s - c)) / sqrt 2
    let (er, ei) = (c + s, s - c);
    // order 0: (p0 + i q0) e^{i(x - pi/4)}
    let j0 = r * (p0 * er - q0 * ei);
    let y0 = r * (p0 * ei + q0 * er);
    // order 1 carries an extra factor -i
    let (er1, ei1) = (ei, -er);
    let j1 = r * (p1 * er1 - q1 * ei1);
    let y1 = r * (p1 * ei1 + q1 * er1);
    (j0, j1, y0, y1)
}

/// Real and imaginary parts of the asymptotic factor of `H_nu(x)`.
fn hankel_pq<T: Scalar>(nu: i64, x: T) -> (T, T) {
    let mu = T::int(4 * nu * nu);
    let eps = T::epsilon() * T::lit(0.25);
    let eight_x = T::lit(8.0) * x;
    let (mut p, mut q) = (T::one(), T::zero());
    let mut t = T::one();
    let mut last = T::infinity();
    for k in 1..200i64 {
        let odd = T::int(2 * k - 1);
        t = t * (mu - odd * odd) / (T::int(k) * eight_x);
        let a = t.abs();
        if a > last {
            break;
        }
        last = a;
        // i^k
        match k % 4 {
            1 => q = q + t,
            2 => p = p - t,
            3 => q = q - t,
            _ => p = p + t,
        }
        if a < eps {
            break;
        }
    }
    (p, q)
}

/// `J_0(x) ..= J_nmax(x)` for `x > 0`.
pub fn j_seq<T: Scalar>(nmax: usize, x: T) -> Vec<T> {
    if x.f64() < ASYM_SWITCH {
        let start = miller_start(nmax, x.f64());
        let mut v = miller_normalised(start, x);
        v.truncate(nmax + 1);
        return v;
    }
    let (j0, j1, _, _) = asym01(x);
    j_seq_from(nmax, x, j0, j1)
}

fn j_seq_from<T: Scalar>(nmax: usize, x: T, j0: T, j1: T) -> Vec<T> {
    let mut v = Vec::with_capacity(nmax + 1);
    v.push(j0);
    if nmax == 0 {
        return v;
    }
    v.push(j1);
    let m = nmax.min(x.f64().floor() as usize).max(1);
    let two_over_x = T::lit(2.0) / x;
    for k in 1..m {
        let next = T::int(k as i64) * two_over_x * v[k] - v[k - 1];
        v.push(next);
    }
    if nmax > m {
        // Orders past the turning point: backward recurrence matched to the
        // forward values at m - 1 and m.
        let start = miller_start(nmax, x.f64());
        let b = miller_raw(start, x);
        let (f0, f1) = (v[m - 1], v[m]);
        let (b0, b1) = (b[m - 1], b[m]);
        let scale = (f0 * b0 + f1 * b1) / (b0 * b0 + b1 * b1);
        for k in (m + 1)..=nmax {
            v.push(b[k] * scale);
        }
    }
    v
}

/// `(J_0..=J_nmax, Y_0..=Y_nmax)` for `x > 0`.
pub fn jy_seq<T: Scalar>(nmax: usize, x: T) -> (Vec<T>, Vec<T>) {
    let (j, y0, y1) = if x.f64() < ASYM_SWITCH {
        let start = miller_start(nmax.max(1), x.f64());
        let full = miller_normalised(start, x);
        let two_pi = T::lit(2.0) / T::PI();
        let lg = (x / T::lit(2.0)).ln() + T::euler_gamma();
        let mut s0 = T::zero();
        let mut s1 = T::zero();
        let mut k = 1usize;
        while 2 * k + 1 <= start {
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            let kk = T::int(k as i64);
            s0 = s0 + sign * full[2 * k] / kk;
            s1 = s1 + sign * (full[2 * k - 1] - full[2 * k + 1]) / kk;
            k += 1;
        }
        let y0 = two_pi * (lg * full[0] - T::lit(2.0) * s0);
        let y1 = two_pi * (lg * full[1] - full[0] / x + s1);
        let mut j = full;
        j.truncate(nmax + 1);
        (j, y0, y1)
    } else {
        let (j0, j1, y0, y1) = asym01(x);
        (j_seq_from(nmax, x, j0, j1), y0, y1)
    };
    let mut y = Vec::with_capacity(nmax + 1);
    y.push(y0);
    if nmax >= 1 {
        y.push(y1);
    }
    let two_over_x = T::lit(2.0) / x;
    for k in 1..nmax {
        let next = T::int(k as i64) * two_over_x * y[k] - y[k - 1];
        y.push(next);
    }
    (j, y)
}

pub(crate) fn check_arg<T: Scalar>(x: T, what: &str) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("{what}: non-finite argument {x:?}")));
    }
    Ok(())
}

pub(crate) fn parity<T: Scalar>(n: i32) -> T {
    if n.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}
