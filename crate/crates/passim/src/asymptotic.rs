//! Point-scatterer model of the small disk. The disk at `y` hit by
//! `phi(., z)` is replaced by a point source of amplitude `mu_eps(y, z)`:
//! `v~^i = mu phi(., y)`, `v~^s = mu u^s(., y)`. Also ring averages over `y`
//! and log-log rate fits of field amplitudes against `eps`.

use crate::correlation::{hk_matrix_residual, HkKind};
use crate::error::{Error, Result};
use crate::forward::{disk_series_field, BlockSystem, DirichletSolver, DiskScatterer};
use crate::geometry::{sensor_ring, SceneConfig};
use crate::linalg::CMatrix;
use crate::point::Point2;
use crate::scalar::{cx, Cx, Scalar};
use crate::specfun::{bessel_j, green, hankel1, hankel1_seq, j_seq, jy_seq, TruncationPolicy};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if !(eps > T::zero() && eps < T::lit(0.5)) {
        return Err(Error::Domain(format!("eps = {eps:?} outside (0, 0.5)")));
    }
    Ok(())
}

/// `mu_eps = -H_0(k|y - z|) / H_0(2 pi eps)`.
pub fn mu_eps<T: Scalar>(y: Point2<T>, z: Point2<T>, eps: T, k: T) -> Result<Cx<T>> {
    check_eps(eps)?;
    let r = y.dist(z);
    if r == T::zero() {
        return Err(Error::Singularity("mu_eps: y == z".into()));
    }
    let den = hankel1(0, T::lit(std::f64::consts::TAU) * eps)?;
    Ok(-hankel1(0, k * r)? / den)
}

/// `sigma_eps = pi^2 |H_0(2 pi eps)|^2 eps^-q`, the asymptotic value of
/// `|mu_eps|^-2`.
pub fn sigma_eps<T: Scalar>(eps: T, q: T) -> Result<T> {
    check_eps(eps)?;
    if !(q >= T::zero()) {
        return Err(Error::Domain(format!("q = {q:?} must be >= 0")));
    }
    let h = hankel1(0, T::lit(std::f64::consts::TAU) * eps)?;
    Ok(T::PI() * T::PI() * h.norm_sqr() * eps.powf(-q))
}

/// `v~^i` and `v~^s` at a set of points for one scatterer position.
#[derive(Clone, Debug)]
pub struct VTilde<T> {
    pub mu: Cx<T>,
    pub vi: Vec<Cx<T>>,
    pub vs: Vec<Cx<T>>,
}

impl<T: Scalar> VTilde<T> {
    pub fn total(&self) -> Vec<Cx<T>> {
        self.vi.iter().zip(&self.vs).map(|(a, b)| *a + *b).collect()
    }
}

/// Evaluates the point-scatterer model at fixed points for many scatterer
/// positions; the obstacle response `E A^-1` is formed once.
pub struct PointScatterModel<'a, T> {
    solver: &'a DirichletSolver<T>,
    points: Vec<Point2<T>>,
    to_field: CMatrix<T>,
    z: Point2<T>,
    eps: T,
}

impl<'a, T: Scalar> PointScatterModel<'a, T> {
    pub fn new(solver: &'a DirichletSolver<T>, points: &[Point2<T>], z: Point2<T>, eps: T) -> Result<Self> {
        check_eps(eps)?;
        let to_field = solver.data_to_field(points)?;
        Ok(PointScatterModel { solver, points: points.to_vec(), to_field, z, eps })
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    /// `u^s(., s)` at the points for a point source at `s`.
    pub fn scattered(&self, s: Point2<T>) -> Result<Vec<Cx<T>>> {
        Ok(self.to_field.matvec(&self.solver.point_source_data(s)?))
    }

    /// Field at the points scattered by the obstacle for boundary data `f`
    /// on its nodes.
    pub fn response(&self, f: &[Cx<T>]) -> Vec<Cx<T>> {
        self.to_field.matvec(f)
    }

    pub fn eval(&self, y: Point2<T>) -> Result<VTilde<T>> {
        let k = self.solver.k();
        let mu = mu_eps(y, self.z, self.eps, k)?;
        let vi = self.points.iter().map(|&x| green(x, y, k).map(|g| g * mu)).collect::<Result<Vec<_>>>()?;
        let vs = self.scattered(y)?.into_iter().map(|u| u * mu).collect();
        Ok(VTilde { mu, vi, vs })
    }
}

/// `v~^i` and `v~^s` at `x` for a scatterer at `y` and source `z`.
pub fn v_tilde<T: Scalar>(
    solver: &DirichletSolver<T>,
    x: &[Point2<T>],
    y: Point2<T>,
    z: Point2<T>,
    eps: T,
) -> Result<VTilde<T>> {
    PointScatterModel::new(solver, x, z, eps)?.eval(y)
}

/// Exact ring average `<v~^i>(x, z)` over `y` on the circle of radius
/// `ring_radius`, by Graf's theorem applied to both Hankel factors:
/// `<H_0(k|y - z|) H_0(k|x - y|)> = sum_n J_n H_n(k rho) H_n(k|z|) J_n(k|x|) e^{in(theta_x - theta_z)}`.
/// Needs `|x| < rho < |z|`.
pub fn avg_v_tilde_i<T: Scalar>(points: &[Point2<T>], ring_radius: T, z: Point2<T>, eps: T, k: T) -> Result<Vec<Cx<T>>> {
    check_eps(eps)?;
    let rz = z.norm();
    let rmax = points.iter().map(|p| p.norm()).fold(T::zero(), |a, b| a.max(b));
    if !(rmax < ring_radius && ring_radius < rz) {
        return Err(Error::Domain("ring average needs |x| < ring radius < |z|".into()));
    }
    let kx = (k * rmax).f64();
    let nmax = (kx + 10.0 * kx.cbrt() + 30.0).ceil() as usize;
    let (jr, yr) = jy_seq(nmax, k * ring_radius);
    let hz = hankel1_seq(nmax, k * rz)?;
    let a: Vec<Cx<T>> = (0..=nmax).map(|n| cx(jr[n] * jr[n], jr[n] * yr[n]) * hz[n]).collect();
    if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Domain("ring average: Hankel overflow".into()));
    }
    let h0 = hankel1(0, T::lit(std::f64::consts::TAU) * eps)?;
    let pre = cx(T::zero(), T::lit(-0.25)) / h0;
    let tz = z.angle();
    Ok(points
        .iter()
        .map(|x| {
            let r = x.norm();
            let jx = if r == T::zero() {
                let mut v = vec![T::zero(); nmax + 1];
                v[0] = T::one();
                v
            } else {
                j_seq(nmax, k * r)
            };
            let d = x.angle() - tz;
            let mut s = a[0] * jx[0];
            for n in 1..=nmax {
                s = s + a[n] * (T::lit(2.0) * jx[n] * (T::int(n as i64) * d).cos());
            }
            pre * s
        })
        .collect())
}

/// Leading-order closed form of `<v~^i>(x, z_eps)` for `k = 2 pi`,
/// `x = c_x e^{i theta_x}`, `z = eps^-q e^{i theta_z}`, ring radius
/// `eps^-p`. Its phase error is `O(eps^{q - 2p})`, so it is only
/// informative when `q > 2p`; [`avg_v_tilde_i`] is exact.
pub fn avg_v_tilde_i_leading<T: Scalar>(x: Point2<T>, eps: T, p: T, q: T, theta_z: T) -> Result<Cx<T>> {
    check_eps(eps)?;
    let pi = T::PI();
    let two_pi = T::lit(std::f64::consts::TAU);
    let h0 = hankel1(0, two_pi * eps)?;
    let (cx_, tx) = (x.norm(), x.angle());
    let ep = eps.powf(p);
    let amp = -(ep * eps.powf(q / T::lit(2.0))) / (T::lit(4.0) * pi * pi * pi);
    let c = (two_pi / ep * (T::one() + cx_ * ep * (tx - theta_z).cos()) - pi / T::lit(4.0)).cos();
    let ph = two_pi * (eps.powf(-q) + T::one() / ep);
    Ok(crate::scalar::cis(ph) * (amp * c) / h0)
}

/// `<exp(-2 i pi (eps^-p cos(theta_y - theta_z) + c_x cos(theta_x - theta_y)))>`
/// over `theta_y`, which equals `J_0(2 pi h)` with `h = |eps^-p e^{i theta_z} + c_x e^{i theta_x}|`.
pub fn plane_wave_average<T: Scalar>(eps: T, p: T, c_x: T, theta_x: T, theta_z: T) -> Result<T> {
    let a = Point2::polar(eps.powf(-p), theta_z) + Point2::polar(c_x, theta_x);
    bessel_j(0, T::lit(std::f64::consts::TAU) * a.norm())
}

/// Least-squares fit of `log(norm)` against `log(eps)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub quantity: String,
    pub eps_values: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub const RATE_CSV_HEADER: &str = "quantity,slope,intercept,r2,eps,norms";

impl RateFit {
    pub fn fit(quantity: &str, eps: &[f64], norms: &[f64]) -> Result<Self> {
        if eps.len() < 3 || eps.len() != norms.len() {
            return Err(Error::Domain("rate fit needs at least 3 (eps, norm) pairs".into()));
        }
        if eps.windows(2).any(|w| !(w[1] < w[0])) || eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Domain("eps values must be positive and strictly decreasing".into()));
        }
        if norms.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Degenerate(format!("{quantity}: non-positive norm in {norms:?}")));
        }
        let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
        Ok(RateFit {
            quantity: quantity.to_string(),
            eps_values: eps.to_vec(),
            norms: norms.to_vec(),
            slope,
            intercept,
            r_squared,
        })
    }

    pub fn csv_row(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";");
        format!(
            "{},{},{},{},{},{}",
            self.quantity,
            self.slope,
            self.intercept,
            self.r_squared,
            join(&self.eps_values),
            join(&self.norms)
        )
    }
}

/// Quantities whose amplitude is fitted against `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateQuantity {
    #[serde(rename = "us_on_B")]
    UsOnB,
    #[serde(rename = "vi_on_B")]
    ViOnB,
    #[serde(rename = "vs_on_B")]
    VsOnB,
    #[serde(rename = "v_tilde_on_B")]
    VTildeOnB,
    #[serde(rename = "avg_v_tilde_on_B")]
    AvgVTildeOnB,
    /// `e_eps = w^s - u^s(., z) - v^i - v^s` with the exact disk fields.
    DecompositionError,
    /// `e~_eps = w^s - u^s(., z) - v~^i - v~^s` with the point-source model.
    PointModelError,
    /// Frobenius residual of the modified identity over all sensor pairs.
    ModifiedHkResidual,
}

impl RateQuantity {
    pub const ALL: [RateQuantity; 8] = [
        RateQuantity::UsOnB,
        RateQuantity::ViOnB,
        RateQuantity::VsOnB,
        RateQuantity::VTildeOnB,
        RateQuantity::AvgVTildeOnB,
        RateQuantity::DecompositionError,
        RateQuantity::PointModelError,
        RateQuantity::ModifiedHkResidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RateQuantity::UsOnB => "us_on_B",
            RateQuantity::ViOnB => "vi_on_B",
            RateQuantity::VsOnB => "vs_on_B",
            RateQuantity::VTildeOnB => "v_tilde_on_B",
            RateQuantity::AvgVTildeOnB => "avg_v_tilde_on_B",
            RateQuantity::DecompositionError => "decomposition_error",
            RateQuantity::PointModelError => "point_model_error",
            RateQuantity::ModifiedHkResidual => "modified_hk_residual",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }
}

impl fmt::Display for RateQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scatterer angles used by the `y`-dependent probes. Norms are RMS over
/// sensors and these angles, which damps the phase oscillation in `eps`.
pub const PROBE_ANGLES: usize = 8;

/// Quadrature size for the Helmholtz-Kirchhoff probe.
pub const HK_QUADRATURE: usize = 2048;

fn rms<T: Scalar>(v: &[Cx<T>]) -> f64 {
    (v.iter().map(|z| z.norm_sqr().f64()).sum::<f64>() / v.len() as f64).sqrt()
}

/// Sensor pairs `(0, m)`, `m = J/8, J/4, J/2`, used by the
/// Helmholtz-Kirchhoff probe. The diagonal is left out: there the left side
/// `2i Im u^s(x, x)` is small next to the `Im phi` terms and the relative
/// residual measures cancellation rather than the identity.
pub fn hk_pairs<T: Scalar>(sensors: &[Point2<T>]) -> Vec<(Point2<T>, Point2<T>)> {
    let j = sensors.len();
    let mut idx: Vec<usize> = [j / 8, j / 4, j / 2].into_iter().filter(|&m| m > 0).collect();
    idx.dedup();
    idx.into_iter().map(|m| (sensors[0], sensors[m])).collect()
}

/// Discrete norm of `quantity` for the scene `cfg`.
pub fn probe_norm(quantity: RateQuantity, cfg: &SceneConfig) -> Result<f64> {
    cfg.validate()?;
    let solver = DirichletSolver::<f64>::for_scene(cfg)?;
    let sensors = sensor_ring::<f64>(cfg);
    let (k, eps) = (cfg.k, cfg.eps);
    let z = cfg.source::<f64>();
    let rho = cfg.scatterer_ring_radius();
    let ys: Vec<Point2<f64>> = (0..PROBE_ANGLES)
        .map(|l| Point2::polar(rho, std::f64::consts::TAU * (l as f64 + 0.5) / PROBE_ANGLES as f64))
        .collect();
    let model = PointScatterModel::new(&solver, &sensors, z, eps)?;
    let disk = |y: Point2<f64>| DiskScatterer::new(y, cfg.disk_radius(), TruncationPolicy::default());
    let gather = |f: &dyn Fn(Point2<f64>) -> Result<Vec<Cx<f64>>>| -> Result<f64> {
        let mut all = Vec::new();
        for &y in &ys {
            all.extend(f(y)?);
        }
        Ok(rms(&all))
    };
    match quantity {
        RateQuantity::UsOnB => Ok(rms(&model.scattered(z)?)),
        RateQuantity::ViOnB => gather(&|y| Ok(disk_series_field(&disk(y)?, z, &sensors, k, TruncationPolicy::default())?.values)),
        RateQuantity::VsOnB => gather(&|y| {
            let nodes = solver.nodes();
            let vi = disk_series_field(&disk(y)?, z, &nodes, k, TruncationPolicy::default())?;
            let f: Vec<Cx<f64>> = vi.values.iter().map(|v| -v).collect();
            Ok(model.response(&f))
        }),
        RateQuantity::VTildeOnB => gather(&|y| Ok(model.eval(y)?.total())),
        RateQuantity::AvgVTildeOnB => {
            let nodes = solver.nodes();
            let vi = avg_v_tilde_i(&sensors, rho, z, eps, k)?;
            let on_d = avg_v_tilde_i(&nodes, rho, z, eps, k)?;
            let f: Vec<Cx<f64>> = on_d.iter().map(|v| -v).collect();
            let vs = model.response(&f);
            Ok(rms(&vi.iter().zip(&vs).map(|(a, b)| a + b).collect::<Vec<_>>()))
        }
        RateQuantity::DecompositionError | RateQuantity::PointModelError => {
            let e = solver.evaluation_matrix(&sensors)?;
            let us = model.scattered(z)?;
            let nodes = solver.nodes();
            gather(&|y| {
                let sys = BlockSystem::new(&solver, disk(y)?)?;
                let (fd, fe) = sys.point_source_data(z)?;
                let w = sys.field_with(&e, &sys.solve(&fd, &fe)?, &sensors)?;
                let v = if quantity == RateQuantity::PointModelError {
                    model.eval(y)?.total()
                } else {
                    let series = |pts: &[Point2<f64>]| disk_series_field(&disk(y)?, z, pts, k, TruncationPolicy::default());
                    let vi = series(&sensors)?.values;
                    let f: Vec<Cx<f64>> = series(&nodes)?.values.iter().map(|v| -v).collect();
                    vi.iter().zip(model.response(&f)).map(|(a, b)| a + b).collect()
                };
                Ok(w.iter().zip(&us).zip(&v).map(|((w, u), v)| w - u - v).collect())
            })
        }
        RateQuantity::ModifiedHkResidual => hk_matrix_residual(HkKind::Modified, cfg, &solver, HK_QUADRATURE),
    }
}

/// Fits the decay rate of `quantity` over `eps_list` (strictly decreasing),
/// all other parameters taken from `template`.
pub fn rate_probe(quantity: RateQuantity, eps_list: &[f64], template: &SceneConfig) -> Result<RateFit> {
    if eps_list.len() < 3 || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("rate probe needs >= 3 strictly decreasing eps values".into()));
    }
    let norms = eps_list
        .par_iter()
        .map(|&eps| {
            let mut cfg = template.clone();
            cfg.eps = eps;
            probe_norm(quantity, &cfg).map_err(|e| match e {
                Error::Config(m) if m.contains("coupling") => {
                    Error::Config(format!("{quantity} at eps = {eps}: {m}; use a smaller largest eps"))
                }
                other => other,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    RateFit::fit(quantity.name(), eps_list, &norms)
}
