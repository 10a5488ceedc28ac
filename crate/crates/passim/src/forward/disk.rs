use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::point::Point2;
use crate::scalar::{cis, cx, Cx, Scalar};
use crate::specfun::{hankel1_seq, j_seq, TruncationPolicy};

/// Small sound-soft disk handled through its Fourier modes.
#[derive(Clone, Copy, Debug)]
pub struct DiskScatterer<T> {
    pub center: Point2<T>,
    pub radius: T,
    pub coeff_truncation: TruncationPolicy,
}

/// Fourier coefficients `c_n`, `n = -N..=N`, stored at index `n + N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fourier<T> {
    pub coeffs: Vec<Cx<T>>,
}

impl<T: Scalar> Fourier<T> {
    pub fn order(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn get(&self, n: i64) -> Cx<T> {
        self.coeffs[(n + self.order() as i64) as usize]
    }

    /// Coefficients of `f(theta_m)`, `theta_m = 2 pi m / (2N + 1)`.
    pub fn from_samples(values: &[Cx<T>]) -> Self {
        let m = values.len();
        assert!(m % 2 == 1, "odd sample count required");
        let n = (m - 1) / 2;
        let h = T::lit(std::f64::consts::TAU) / T::int(m as i64);
        let coeffs = (-(n as i64)..=n as i64)
            .map(|q| {
                let s = values
                    .iter()
                    .enumerate()
                    .fold(Cx::new(T::zero(), T::zero()), |acc, (j, v)| acc + *v * cis(-h * T::int(q * j as i64)));
                s / T::int(m as i64)
            })
            .collect();
        Fourier { coeffs }
    }
}

impl<T: Scalar> DiskScatterer<T> {
    pub fn new(center: Point2<T>, radius: T, coeff_truncation: TruncationPolicy) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Geometry(format!("disk radius {radius:?}")));
        }
        Ok(DiskScatterer { center, radius, coeff_truncation })
    }

    /// Highest retained order: the smallest `N >= 4` with
    /// `(ka/2)^N / N! < rel_tol`, capped at `max_terms`.
    pub fn modes(&self, k: T) -> usize {
        let x = (k * self.radius).f64() / 2.0;
        let tol = self.coeff_truncation.rel_tol;
        let mut t = 1.0;
        let mut n = 0;
        while n < self.coeff_truncation.max_terms {
            n += 1;
            t *= x / n as f64;
            if t < tol && n >= 4 {
                break;
            }
        }
        n.max(1)
    }

    /// The `2N + 1` collocation nodes on the boundary.
    pub fn nodes(&self, k: T) -> Vec<Point2<T>> {
        let m = 2 * self.modes(k) + 1;
        let h = T::lit(std::f64::consts::TAU) / T::int(m as i64);
        (0..m).map(|j| self.center + Point2::polar(self.radius, h * T::int(j as i64))).collect()
    }

    /// `(iπa/2) J_n(ka) H_n(ka)` for `n = 0..=N`: eigenvalues of the single
    /// layer on `e^{i n theta}`.
    fn eigenvalues(&self, k: T, n: usize) -> Result<Vec<Cx<T>>> {
        let ka = k * self.radius;
        let h = hankel1_seq(n, ka)?;
        let j = j_seq(n, ka);
        let f = cx(T::zero(), T::PI() * self.radius / T::lit(2.0));
        Ok((0..=n).map(|q| f * h[q] * j[q]).collect())
    }

    /// Density coefficients `h_n` with single-layer trace equal to `data`.
    pub fn slp_inverse(&self, k: T, data: &Fourier<T>) -> Result<Fourier<T>> {
        let n = data.order();
        let ev = self.eigenvalues(k, n)?;
        let coeffs = (-(n as i64)..=n as i64).map(|q| data.get(q) / ev[q.unsigned_abs() as usize]).collect();
        Ok(Fourier { coeffs })
    }

    /// Matrix taking density coefficients (order `N`) to single-layer field
    /// values at `points`, `|x - center| >= radius`, via
    /// `(iπa/2) sum_n h_n J_n(ka) H_n(k r) e^{i n theta}`.
    pub fn single_layer_matrix(&self, k: T, n: usize, points: &[Point2<T>]) -> Result<CMatrix<T>> {
        let ka = k * self.radius;
        let j = j_seq(n, ka);
        let f = cx(T::zero(), T::PI() * self.radius / T::lit(2.0));
        let mut out = CMatrix::zeros(points.len(), 2 * n + 1);
        for (i, &x) in points.iter().enumerate() {
            let d = x - self.center;
            let r = d.norm();
            if r < self.radius * (T::one() - T::lit(1e-12)) {
                return Err(Error::Geometry("single-layer evaluation inside the disk".into()));
            }
            let h = hankel1_seq(n, k * r)?;
            let th = d.angle();
            for q in -(n as i64)..=n as i64 {
                // J_{-n} H_{-n} = J_n H_n
                let a = q.unsigned_abs() as usize;
                out[(i, (q + n as i64) as usize)] = f * h[a] * j[a] * cis(th * T::int(q));
            }
        }
        Ok(out)
    }

    /// Single-layer field of a density given by its coefficients.
    pub fn single_layer_field(&self, k: T, h: &Fourier<T>, points: &[Point2<T>]) -> Result<Vec<Cx<T>>> {
        Ok(self.single_layer_matrix(k, h.order(), points)?.matvec(&h.coeffs))
    }
}

/// Field scattered by the disk for incident `phi(., z)`, with truncation info.
#[derive(Clone, Debug)]
pub struct DiskField<T> {
    pub values: Vec<Cx<T>>,
    /// Largest order used at any point.
    pub terms: usize,
    /// True when the order cap was reached before the tolerance.
    pub truncated: bool,
}

/// `-(i/4) sum_n [J_n(ka)/H_n(ka)] H_n(k|z - y|) H_n(k|x - y|) e^{i n (a_x - a_z)}`
/// with angles about the disk center `y`.
pub fn disk_series_field<T: Scalar>(
    disk: &DiskScatterer<T>,
    z: Point2<T>,
    points: &[Point2<T>],
    k: T,
    policy: TruncationPolicy,
) -> Result<DiskField<T>> {
    let y = disk.center;
    let a = disk.radius;
    let dz = z - y;
    if dz.norm() <= a {
        return Err(Error::Geometry("source inside the disk".into()));
    }
    let nmax = policy.max_terms;
    let ka = k * a;
    // Orders whose H_n(ka) overflows carry nothing representable.
    let mut cap = nmax;
    let ha = loop {
        match hankel1_seq(cap, ka) {
            Ok(h) => break h,
            Err(_) if cap > 1 => cap /= 2,
            Err(e) => return Err(e),
        }
    };
    let ja = j_seq(cap, ka);
    let hz = hankel1_seq(cap, k * dz.norm())?;
    let az = dz.angle();
    let tol = T::lit(policy.rel_tol);
    let mut terms = 0;
    let mut truncated = false;
    let mut values = Vec::with_capacity(points.len());
    for &x in points {
        let dx = x - y;
        let rx = dx.norm();
        if rx <= a * (T::one() - T::lit(1e-12)) {
            return Err(Error::Geometry("evaluation point inside the disk".into()));
        }
        let hx = hankel1_seq(cap, k * rx)?;
        let dt = dx.angle() - az;
        let mut sum = hz[0] * hx[0] / ha[0] * ja[0];
        let mut done = false;
        for n in 1..=cap {
            let c = cis(T::int(n as i64) * dt);
            let coef = (hz[n] * hx[n] / ha[n]) * ja[n];
            sum = sum + coef * (c + c.conj());
            if coef.norm() * T::lit(2.0) <= tol * sum.norm() {
                terms = terms.max(n);
                done = true;
                break;
            }
        }
        if !done {
            truncated = true;
            terms = cap;
        }
        values.push(sum * cx(T::zero(), T::lit(-0.25)));
    }
    Ok(DiskField { values, terms, truncated })
}

/// Closed-form inverse of the single layer on the circle of
/// radius `eps` (wavelength units, `ka = 2 pi eps`) in the normalised basis
/// `e^{i n theta}/sqrt(2 pi)` of the unit circle:
/// `d_n = -(2i/pi) c_n / (J_n(2 pi eps) H_n(2 pi eps))`.
pub fn disk_slp_inverse_coeffs<T: Scalar>(eps: T, c: &Fourier<T>) -> Result<Fourier<T>> {
    if !(eps > T::zero() && eps < T::lit(0.5)) {
        return Err(Error::Domain(format!("eps = {eps:?} outside (0, 0.5)")));
    }
    let n = c.order();
    let x = T::lit(std::f64::consts::TAU) * eps;
    let h = hankel1_seq(n, x)?;
    let j = j_seq(n, x);
    let f = cx(T::zero(), -T::lit(2.0) / T::PI());
    let coeffs = (-(n as i64)..=n as i64)
        .map(|q| {
            let a = q.unsigned_abs() as usize;
            f * c.get(q) / (h[a] * j[a])
        })
        .collect();
    Ok(Fourier { coeffs })
}
