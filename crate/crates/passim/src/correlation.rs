//! Near-field acquisition with a moving small scatterer, acquisition-mean
//! removal, multiplicative noise, the cross-correlation matrices and
//! Helmholtz-Kirchhoff residuals.

use crate::asymptotic::{mu_eps, sigma_eps, PointScatterModel};
use crate::error::{Error, Result};
use crate::forward::{BlockSystem, DirichletSolver, DiskScatterer};
use crate::geometry::{rng_stream, scatterer_positions, sensor_ring, Purpose, SceneConfig};
use crate::linalg::CMatrix;
use crate::point::Point2;
use crate::scalar::{cx, Cx, Scalar};
use crate::specfun::{bessel_j, green, TruncationPolicy};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;

/// `J x L` matrix of measured scattered fields, sensor rows and
/// acquisition columns.
#[derive(Clone, Debug, PartialEq)]
pub struct NearFieldMatrix<T> {
    pub entries: CMatrix<T>,
    /// Hash of the scene the data came from.
    pub scene_hash: String,
    pub averaged: bool,
    pub noisy: bool,
}

fn attach(index: usize) -> impl Fn(Error) -> Error {
    move |e| Error::Acquisition { index, source: Box::new(e) }
}

/// Measures `w^s_eps(x_j, y^l, z_eps)` for every acquisition. With one
/// scatterer per acquisition this is the coupled obstacle + disk solve;
/// with `R > 1` the scatterers are superposed point sources
/// `u^s(., z) + sum_r v~(., y^{l,r})` without mutual interaction.
pub fn acquire_near_field<T: Scalar>(cfg: &SceneConfig, solver: &DirichletSolver<T>) -> Result<NearFieldMatrix<T>> {
    cfg.validate()?;
    let sensors = sensor_ring::<T>(cfg);
    let layout = scatterer_positions::<T>(cfg)?;
    let z = cfg.source::<T>();
    let (j, l) = (cfg.sensors, cfg.acquisitions);
    let columns: Vec<Vec<Cx<T>>> = if cfg.scatterers == 1 {
        let e = solver.evaluation_matrix(&sensors)?;
        let radius = T::lit(cfg.disk_radius());
        layout
            .positions
            .par_iter()
            .enumerate()
            .map(|(i, ys)| {
                let run = || -> Result<Vec<Cx<T>>> {
                    let disk = DiskScatterer::new(ys[0], radius, TruncationPolicy::default())?;
                    let sys = BlockSystem::new(solver, disk)?;
                    let (fd, fe) = sys.point_source_data(z)?;
                    sys.field_with(&e, &sys.solve(&fd, &fe)?, &sensors)
                };
                run().map_err(attach(i))
            })
            .collect::<Result<_>>()?
    } else {
        let model = PointScatterModel::new(solver, &sensors, z, T::lit(cfg.eps))?;
        let us = model.scattered(z)?;
        layout
            .positions
            .par_iter()
            .enumerate()
            .map(|(i, ys)| {
                let mut col = us.clone();
                for &y in ys {
                    let v = model.eval(y).map_err(attach(i))?;
                    for (c, t) in col.iter_mut().zip(v.total()) {
                        *c = *c + t;
                    }
                }
                Ok(col)
            })
            .collect::<Result<_>>()?
    };
    let entries = CMatrix::from_fn(j, l, |r, c| columns[c][r]);
    Ok(NearFieldMatrix { entries, scene_hash: cfg.hash(), averaged: false, noisy: false })
}

impl<T: Scalar> NearFieldMatrix<T> {
    /// Subtracts from each sensor row its mean over the acquisitions.
    pub fn remove_acquisition_mean(mut self) -> Result<Self> {
        if self.averaged {
            return Err(Error::State("acquisition mean already removed".into()));
        }
        let l = T::int(self.entries.cols() as i64);
        for r in 0..self.entries.rows() {
            let row = self.entries.row_mut(r);
            let mean = row.iter().fold(cx(T::zero(), T::zero()), |a, b| a + *b) / l;
            row.iter_mut().for_each(|v| *v = *v - mean);
        }
        self.averaged = true;
        Ok(self)
    }

    /// Multiplies every entry by `1 + delta zeta`, with the real and
    /// imaginary parts of `zeta` uniform on `[-1, 1]`. Column `l` draws from
    /// stream `l` of the noise key, so the result does not depend on
    /// threading.
    pub fn apply_noise(mut self, delta: f64, seed: u64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("noise amplitude {delta} must be >= 0")));
        }
        if delta == 0.0 {
            return Ok(self);
        }
        let (rows, cols) = (self.entries.rows(), self.entries.cols());
        for c in 0..cols {
            let mut rng = rng_stream(seed, Purpose::Noise, c as u64);
            for r in 0..rows {
                let zr: f64 = rng.gen_range(-1.0..=1.0);
                let zi: f64 = rng.gen_range(-1.0..=1.0);
                let f = cx(T::lit(1.0 + delta * zr), T::lit(delta * zi));
                let v = self.entries[(r, c)];
                self.entries[(r, c)] = v * f;
            }
        }
        self.noisy = true;
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Standard,
    Modified,
    Multi,
}

/// Constants that went into a correlation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleMetadata {
    /// Length of the source or scatterer circle.
    pub surface: f64,
    /// `sigma_eps`, 1 for the standard matrix.
    pub sigma: f64,
    pub acquisitions: usize,
    pub scatterers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossCorrelationMatrix<T> {
    pub entries: CMatrix<T>,
    pub kind: CorrelationKind,
    pub scale: ScaleMetadata,
}

/// `2i Im phi(x, x') = (i/2) J_0(k|x - x'|)`, finite on the diagonal.
fn im_phi_term<T: Scalar>(a: Point2<T>, b: Point2<T>, k: T) -> Result<Cx<T>> {
    Ok(cx(T::zero(), T::lit(0.5) * bessel_j(0, k * a.dist(b))?))
}

/// `factor * sum_l conj(F_jl) F_ml - 2i Im phi(x_j, x_m)`.
fn correlate<T: Scalar>(f: &CMatrix<T>, sensors: &[Point2<T>], k: T, factor: Cx<T>) -> Result<CMatrix<T>> {
    let j = f.rows();
    if sensors.len() != j {
        return Err(Error::Domain(format!("{} sensors for {j} data rows", sensors.len())));
    }
    let g = f.conj().matmul(&f.transpose());
    let mut out = CMatrix::zeros(j, j);
    for a in 0..j {
        for b in 0..j {
            out[(a, b)] = g[(a, b)] * factor - im_phi_term(sensors[a], sensors[b], k)?;
        }
    }
    Ok(out)
}

/// `C~ = (2ik |Sigma_eps| sigma_eps / L) conj(N~) N~^T - 2i Im phi`.
pub fn modified_cross_correlation<T: Scalar>(n: &NearFieldMatrix<T>, cfg: &SceneConfig) -> Result<CrossCorrelationMatrix<T>> {
    if cfg.scatterers != 1 {
        return Err(Error::Config("modified correlation needs R = 1; use multi_cross_correlation".into()));
    }
    multi_cross_correlation(n, cfg, 1)
}

/// As [`modified_cross_correlation`] with `1/L` replaced by `1/(L R)`.
pub fn multi_cross_correlation<T: Scalar>(
    n: &NearFieldMatrix<T>,
    cfg: &SceneConfig,
    r: usize,
) -> Result<CrossCorrelationMatrix<T>> {
    if !n.averaged {
        return Err(Error::State("near field still contains its acquisition mean".into()));
    }
    if r != cfg.scatterers || r == 0 {
        return Err(Error::Config(format!("R = {r} does not match the scene's R = {}", cfg.scatterers)));
    }
    let l = n.entries.cols();
    let surface = std::f64::consts::TAU * cfg.scatterer_ring_radius();
    let sigma = sigma_eps(cfg.eps, cfg.q)?;
    let k = T::lit(cfg.k);
    let factor = cx(T::zero(), T::lit(2.0 * cfg.k * surface * sigma / (l * r) as f64));
    let entries = correlate(&n.entries, &sensor_ring::<T>(cfg), k, factor)?;
    let kind = if r == 1 { CorrelationKind::Modified } else { CorrelationKind::Multi };
    Ok(CrossCorrelationMatrix { entries, kind, scale: ScaleMetadata { surface, sigma, acquisitions: l, scatterers: r } })
}

/// Classical matrix `C = (2ik |Sigma| / L) conj(U) U^T - 2i Im phi` from total
/// fields `U[j, l] = u(x_j, z_l)` of sources on a circle of radius `radius`.
pub fn standard_cross_correlation<T: Scalar>(
    total: &CMatrix<T>,
    sensors: &[Point2<T>],
    radius: f64,
    k: T,
) -> Result<CrossCorrelationMatrix<T>> {
    let l = total.cols();
    let surface = std::f64::consts::TAU * radius;
    let factor = cx(T::zero(), T::lit(2.0) * k * T::lit(surface / l as f64));
    let entries = correlate(total, sensors, k, factor)?;
    Ok(CrossCorrelationMatrix {
        entries,
        kind: CorrelationKind::Standard,
        scale: ScaleMetadata { surface, sigma: 1.0, acquisitions: l, scatterers: 1 },
    })
}

/// `U[j, m] = u^s(x_j, x_m)`, the scattered field at `x_j` of a point
/// source at `x_m`.
pub fn scattered_field_matrix<T: Scalar>(solver: &DirichletSolver<T>, points: &[Point2<T>]) -> Result<CMatrix<T>> {
    let g = solver.data_to_field(points)?;
    let n = points.len();
    let cols: Vec<Vec<Cx<T>>> = points
        .par_iter()
        .map(|&s| Ok(g.matvec(&solver.point_source_data(s)?)))
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(n, n, |r, c| cols[c][r]))
}

/// Total fields `u(x_j, z_l) = phi + u^s` for sources at `sources`.
pub fn total_field_matrix<T: Scalar>(
    solver: &DirichletSolver<T>,
    sensors: &[Point2<T>],
    sources: &[Point2<T>],
) -> Result<CMatrix<T>> {
    let g = solver.data_to_field(sensors)?;
    let k = solver.k();
    let cols: Vec<Vec<Cx<T>>> = sources
        .par_iter()
        .map(|&s| {
            let us = g.matvec(&solver.point_source_data(s)?);
            sensors.iter().zip(us).map(|(&x, u)| Ok(green(x, s, k)? + u)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(sensors.len(), sources.len(), |r, c| cols[c][r]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HkKind {
    /// Point sources on the circle of radius `lambda eps^-p`.
    Standard,
    /// `v~` fields of the small scatterer on that circle, weighted by `sigma_eps`.
    Modified,
}

/// Fields on the dense ring, `F[i, q] = s(y_q) (phi + u^s)(pts_i, y_q)` with
/// `s = 1` or `mu_eps`, and the quadrature weight of the identity.
fn ring_fields<T: Scalar>(
    kind: HkKind,
    cfg: &SceneConfig,
    solver: &DirichletSolver<T>,
    pts: &[Point2<T>],
    l_quad: usize,
) -> Result<(CMatrix<T>, f64)> {
    if pts.is_empty() || l_quad == 0 {
        return Err(Error::Domain("need at least one point and one quadrature node".into()));
    }
    let k = solver.k();
    let g = solver.data_to_field(pts)?;
    let rho = cfg.scatterer_ring_radius();
    let z = cfg.source::<T>();
    let eps = T::lit(cfg.eps);
    let sigma = match kind {
        HkKind::Standard => 1.0,
        HkKind::Modified => sigma_eps(cfg.eps, cfg.q)?,
    };
    let weight = 2.0 * cfg.k * sigma * std::f64::consts::TAU * rho / l_quad as f64;
    let cols: Vec<Vec<Cx<T>>> = (0..l_quad)
        .into_par_iter()
        .map(|q| {
            let y = Point2::polar(T::lit(rho), T::lit(std::f64::consts::TAU * q as f64 / l_quad as f64));
            let us = g.matvec(&solver.point_source_data(y)?);
            let scale = match kind {
                HkKind::Standard => cx(T::one(), T::zero()),
                HkKind::Modified => mu_eps(y, z, eps, k)?,
            };
            pts.iter().zip(&us).map(|(&x, u)| Ok((green(x, y, k)? + *u) * scale)).collect()
        })
        .collect::<Result<_>>()?;
    Ok((CMatrix::from_fn(pts.len(), l_quad, |r, c| cols[c][r]), weight))
}

/// Largest relative mismatch `|LHS - RHS| / |LHS|` over `pairs` in the
/// Helmholtz-Kirchhoff identity, `LHS = u^s(x, x') - conj(u^s(x, x'))`,
/// with the ring integral done by the `l_quad`-point trapezoid rule.
pub fn hk_residual<T: Scalar>(
    kind: HkKind,
    cfg: &SceneConfig,
    solver: &DirichletSolver<T>,
    pairs: &[(Point2<T>, Point2<T>)],
    l_quad: usize,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Domain("need at least one pair and one quadrature node".into()));
    }
    let k = solver.k();
    let pts: Vec<Point2<T>> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let (f, weight) = ring_fields(kind, cfg, solver, &pts, l_quad)?;
    let g = solver.data_to_field(&pts)?;
    let mut worst: f64 = 0.0;
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let sum = (0..l_quad).fold(cx(T::zero(), T::zero()), |s, q| s + f[(2 * i, q)].conj() * f[(2 * i + 1, q)]);
        let rhs = cx(T::zero(), T::lit(weight)) * sum - im_phi_term(a, b, k)?;
        let us = g.row(2 * i).iter().zip(solver.point_source_data(b)?).fold(cx(T::zero(), T::zero()), |s, (x, y)| s + *x * y);
        let lhs = us - us.conj();
        if lhs.norm() == T::zero() {
            return Err(Error::Degenerate("vanishing left-hand side".into()));
        }
        worst = worst.max(((lhs - rhs).norm() / lhs.norm()).f64());
    }
    Ok(worst)
}

/// Frobenius form of [`hk_residual`] over every sensor pair of the scene,
/// diagonal included: `|RHS - LHS|_F / |LHS|_F` with
/// `LHS = U^s - conj(U^s)`, `U^s[j, m] = u^s(x_j, x_m)`.
pub fn hk_matrix_residual<T: Scalar>(kind: HkKind, cfg: &SceneConfig, solver: &DirichletSolver<T>, l_quad: usize) -> Result<f64> {
    let sensors = sensor_ring::<T>(cfg);
    let (f, weight) = ring_fields(kind, cfg, solver, &sensors, l_quad)?;
    let rhs = correlate(&f, &sensors, solver.k(), cx(T::zero(), T::lit(weight)))?;
    let us = scattered_field_matrix(solver, &sensors)?;
    let lhs = us.sub(&us.conj());
    Ok((rhs.sub(&lhs).frobenius_norm() / lhs.frobenius_norm()).f64())
}

/// Writes a complex matrix as CSV: a `# scene <hash>` line, a
/// `# rows <r> cols <c>` line, then one row per line of `re,im` pairs.
/// Values use shortest round-trip formatting, so reloading is bit-exact.
pub fn write_matrix_csv(path: &Path, m: &CMatrix<f64>, scene_hash: &str) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "# scene {scene_hash}")?;
    writeln!(w, "# rows {} cols {}", m.rows(), m.cols())?;
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(|z| format!("{:?},{:?}", z.re, z.im)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_matrix_csv`]; returns the matrix and the scene hash.
pub fn read_matrix_csv(path: &Path) -> Result<(CMatrix<f64>, String)> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut lines = f.lines();
    let mut next = || -> Result<String> { lines.next().ok_or_else(|| Error::Parse("truncated matrix file".into()))?.map_err(Error::from) };
    let hash = next()?
        .strip_prefix("# scene ")
        .ok_or_else(|| Error::Parse("missing scene header".into()))?
        .trim()
        .to_string();
    let dims = next()?;
    let parts: Vec<&str> = dims.split_whitespace().collect();
    let (rows, cols) = match parts.as_slice() {
        ["#", "rows", r, "cols", c] => (
            r.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
            c.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
        ),
        _ => return Err(Error::Parse(format!("bad dimension header {dims:?}"))),
    };
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = next()?;
        let nums: Vec<f64> =
            line.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {r}: {e}")))).collect::<Result<_>>()?;
        if nums.len() != 2 * cols {
            return Err(Error::Parse(format!("row {r}: {} values, expected {}", nums.len(), 2 * cols)));
        }
        data.extend(nums.chunks(2).map(|p| Cx::new(p[0], p[1])));
    }
    Ok((CMatrix::from_vec(rows, cols, data), hash))
}
