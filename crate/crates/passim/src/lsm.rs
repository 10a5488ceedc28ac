//! Linear sampling: SVD of the correlation matrix, Tikhonov solves with the
//! Morozov discrepancy principle, indicator maps and level-set metrics.

use crate::correlation::CrossCorrelationMatrix;
use crate::error::{Error, Result};
use crate::geometry::{sensor_ring, BoundaryCurve, SamplingGrid, SceneConfig};
use crate::linalg::{svd, CMatrix, Svd};
use crate::point::Point2;
use crate::scalar::{Cx, Scalar};
use crate::specfun::green;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub fn svd_decompose<T: Scalar>(c: &CMatrix<T>) -> Result<Svd<T>> {
    if c.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    svd(c)
}

/// Right-hand side expressed in the left singular basis, `b = U^H rhs`.
#[derive(Clone, Debug)]
pub struct Projected<T> {
    pub b: Vec<Cx<T>>,
    /// `|rhs|^2 - |b|^2`, the part outside the range of `U`.
    pub outside: T,
}

pub fn project<T: Scalar>(f: &Svd<T>, rhs: &[Cx<T>]) -> Result<Projected<T>> {
    if rhs.len() != f.u.rows() {
        return Err(Error::Domain(format!("rhs of length {} for {} rows", rhs.len(), f.u.rows())));
    }
    let b: Vec<Cx<T>> = (0..f.s.len())
        .map(|i| (0..rhs.len()).fold(Cx::new(T::zero(), T::zero()), |acc, r| acc + f.u[(r, i)].conj() * rhs[r]))
        .collect();
    let total: T = rhs.iter().map(|z| z.norm_sqr()).sum();
    let inside: T = b.iter().map(|z| z.norm_sqr()).sum();
    Ok(Projected { b, outside: (total - inside).max(T::zero()) })
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::Domain(format!("Tikhonov parameter {alpha:?} must be positive")));
    }
    Ok(())
}

/// `g = sum_i s_i / (s_i^2 + alpha) <u_i, rhs> v_i`, the minimiser of
/// `|C g - rhs|^2 + alpha |g|^2`.
pub fn tikhonov_solve<T: Scalar>(f: &Svd<T>, rhs: &[Cx<T>], alpha: T) -> Result<Vec<Cx<T>>> {
    check_alpha(alpha)?;
    Ok(filtered(f, &project(f, rhs)?, alpha))
}

fn filtered<T: Scalar>(f: &Svd<T>, p: &Projected<T>, alpha: T) -> Vec<Cx<T>> {
    let n = f.v.rows();
    let mut g = vec![Cx::new(T::zero(), T::zero()); n];
    for (i, &s) in f.s.iter().enumerate() {
        let c = p.b[i] * (s / (s * s + alpha));
        for (r, gr) in g.iter_mut().enumerate() {
            *gr = *gr + f.v[(r, i)] * c;
        }
    }
    g
}

/// `(|C g_alpha - rhs|, |g_alpha|)` from the filter factors alone.
pub fn discrepancy<T: Scalar>(f: &Svd<T>, p: &Projected<T>, alpha: T) -> (T, T) {
    let mut res = p.outside;
    let mut gn = T::zero();
    for (i, &s) in f.s.iter().enumerate() {
        let d = s * s + alpha;
        let b2 = p.b[i].norm_sqr();
        res = res + b2 * (alpha / d) * (alpha / d);
        gn = gn + b2 * (s / d) * (s / d);
    }
    (res.sqrt(), gn.sqrt())
}

/// Outcome of the discrepancy search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Morozov {
    pub alpha: f64,
    /// False when no sign change exists and an endpoint was returned.
    pub converged: bool,
}

/// Solves `|C g_alpha - rhs| = delta |g_alpha|` for `alpha` by bisection in
/// `log alpha` on `[1e-16, 1e4] s_max^2`.
pub fn morozov_alpha<T: Scalar>(f: &Svd<T>, rhs: &[Cx<T>], delta: T) -> Result<Morozov> {
    morozov_projected(f, &project(f, rhs)?, delta)
}

pub fn morozov_projected<T: Scalar>(f: &Svd<T>, p: &Projected<T>, delta: T) -> Result<Morozov> {
    if !(delta > T::zero()) {
        return Err(Error::Domain(format!("discrepancy level {delta:?} must be positive")));
    }
    let smax = f.s.first().copied().unwrap_or(T::zero()).f64();
    if !(smax > 0.0) {
        return Err(Error::Degenerate("zero matrix".into()));
    }
    let fval = |la: f64| {
        let (r, g) = discrepancy(f, p, T::lit(la.exp()));
        (r - delta * g).f64()
    };
    let s2 = smax * smax;
    let (mut lo, mut hi) = ((1e-16 * s2).ln(), (1e4 * s2).ln());
    let (flo, fhi) = (fval(lo), fval(hi));
    if flo >= 0.0 {
        return Ok(Morozov { alpha: lo.exp(), converged: false });
    }
    if fhi <= 0.0 {
        return Ok(Morozov { alpha: hi.exp(), converged: false });
    }
    // relative tolerance 1e-8 on alpha
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if fval(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Morozov { alpha: (0.5 * (lo + hi)).exp(), converged: true })
}

/// Operator-level discrepancy for entrywise noise amplitude `noise`:
/// `noise |C|_F / sqrt(J L)`. Returns the level and the conversion factor
/// `|C|_F / sqrt(J L)`.
pub fn discrepancy_level<T: Scalar>(c: &CrossCorrelationMatrix<T>, noise: f64) -> Result<(f64, f64)> {
    if !(noise > 0.0) || !noise.is_finite() {
        return Err(Error::Domain(format!("noise amplitude {noise} must be positive for the discrepancy principle")));
    }
    let jl = (c.entries.rows() * c.scale.acquisitions) as f64;
    let factor = c.entries.frobenius_norm().f64() / jl.sqrt();
    Ok((noise * factor, factor))
}

/// Which function of `g_s` is mapped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorConvention {
    /// `|g_s|_2`.
    Norm,
    /// `1 / |g_s|_2`.
    Reciprocal,
}

/// Indicator values on a sampling grid, row-major with `y` slow.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorMap {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    pub alpha: Vec<f64>,
    pub convention: IndicatorConvention,
    /// Nodes where the discrepancy equation had no root.
    pub unconverged: usize,
    pub masked: bool,
}

/// Solves `C g_s = phi_s`, `(phi_s)_j = phi(x_j, s)`, at every unmasked grid
/// node with a Morozov-chosen Tikhonov parameter.
pub fn indicator_map<T: Scalar>(
    c: &CrossCorrelationMatrix<T>,
    cfg: &SceneConfig,
    delta_level: f64,
    convention: IndicatorConvention,
) -> Result<IndicatorMap> {
    let grid = cfg.grid;
    grid.validate()?;
    let sensors = sensor_ring::<T>(cfg);
    if sensors.len() != c.entries.rows() {
        return Err(Error::Config("correlation matrix does not match the sensor count".into()));
    }
    let f = svd_decompose(&c.entries)?;
    let k = T::lit(cfg.k);
    let delta = T::lit(delta_level);
    let nodes = grid.nodes();
    let out: Vec<(f64, f64, bool)> = nodes
        .par_iter()
        .map(|&s| {
            if grid.masked(s) {
                return Ok((0.0, 0.0, true));
            }
            let sp = Point2::new(T::lit(s.x), T::lit(s.y));
            let run = || -> Result<(f64, f64, bool)> {
                let rhs: Vec<Cx<T>> = sensors.iter().map(|&x| green(x, sp, k)).collect::<Result<_>>()?;
                let p = project(&f, &rhs)?;
                let m = morozov_projected(&f, &p, delta)?;
                let (_, gn) = discrepancy(&f, &p, T::lit(m.alpha));
                let gn = gn.f64();
                let v = match convention {
                    IndicatorConvention::Norm => gn,
                    IndicatorConvention::Reciprocal => 1.0 / gn,
                };
                Ok((v, m.alpha, m.converged))
            };
            run().map_err(|e| Error::Domain(format!("sampling node ({}, {}): {e}", s.x, s.y)))
        })
        .collect::<Result<_>>()?;
    let unconverged = out.iter().filter(|o| !o.2).count();
    Ok(IndicatorMap {
        grid,
        values: out.iter().map(|o| o.0).collect(),
        alpha: out.iter().map(|o| o.1).collect(),
        convention,
        unconverged,
        masked: grid.mask_radius.is_some(),
    })
}

impl IndicatorMap {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `x,y,value` per node.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "x,y,value")?;
        for (p, v) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(w, "{:?},{:?},{:?}", p.x, p.y, v)?;
        }
        w.flush()?;
        Ok(())
    }

    /// 8-bit binary PGM, min-max scaled over the unmasked nodes, top row
    /// at the largest `y`.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let g = self.grid;
        let nodes = g.nodes();
        let live: Vec<f64> = nodes.iter().zip(&self.values).filter(|(p, _)| !g.masked(**p)).map(|(_, v)| *v).collect();
        let lo = live.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = live.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let mut bytes = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
        for iy in (0..g.ny).rev() {
            for ix in 0..g.nx {
                let i = iy * g.nx + ix;
                let px = if g.masked(nodes[i]) { 0 } else { (255.0 * (self.values[i] - lo) / span).round() as u8 };
                bytes.push(px);
            }
        }
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

fn cross(o: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    (a - o).cross(b - o)
}

/// Convex hull (counter-clockwise, no collinear points) by the monotone chain.
pub fn convex_hull(points: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<Point2<f64>> = Vec::with_capacity(2 * p.len());
    for &q in &p {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
            hull.pop();
        }
        hull.push(q);
    }
    let lower = hull.len() + 1;
    for &q in p.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
            hull.pop();
        }
        hull.push(q);
    }
    hull.pop();
    hull
}

/// Signed shoelace area.
pub fn polygon_area(p: &[Point2<f64>]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i].cross(p[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Clips `subject` against the convex counter-clockwise polygon `clip`
/// (Sutherland-Hodgman). Degenerate edges of a non-convex subject carry no
/// area, so the area of the result is exact.
pub fn clip_polygon(subject: &[Point2<f64>], clip: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut out = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % n]);
        let input = std::mem::take(&mut out);
        let inside = |p: Point2<f64>| cross(a, b, p) >= 0.0;
        let hit = |p: Point2<f64>, q: Point2<f64>| {
            let (dp, dq) = (cross(a, b, p), cross(a, b, q));
            p + (q - p) * (dp / (dp - dq))
        };
        for j in 0..input.len() {
            let (cur, prev) = (input[j], input[(j + input.len() - 1) % input.len()]);
            match (inside(cur), inside(prev)) {
                (true, true) => out.push(cur),
                (true, false) => {
                    out.push(hit(prev, cur));
                    out.push(cur);
                }
                (false, true) => out.push(hit(prev, cur)),
                (false, false) => {}
            }
        }
    }
    out
}

/// Result of the threshold scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionMetrics {
    /// Fraction of the map maximum.
    pub best_threshold: f64,
    /// `area(H sym-diff D) / area(sampling domain)`.
    pub area_error: f64,
    /// The same symmetric difference divided by `area(D)`.
    pub area_error_rel_obstacle: f64,
    /// Hulls of the level-set components at the best threshold.
    pub hulls: Vec<Vec<Point2<f64>>>,
    /// `(threshold, area_error)` for every scanned threshold.
    pub scan: Vec<(f64, f64)>,
}

/// Thresholds `0.30, 0.31, ..., 0.90` of the map maximum.
pub fn thresholds() -> Vec<f64> {
    (30..=90).map(|i| i as f64 / 100.0).collect()
}

/// Grid-connected components (8-neighbour) of `mask`.
fn components(mask: &[bool], nx: usize, ny: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let mut comp = vec![];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            let (ix, iy) = ((i % nx) as i64, (i / nx) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (jx, jy) = (ix + dx, iy + dy);
                    if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                        continue;
                    }
                    let j = jy as usize * nx + jx as usize;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

fn hulls_overlap(a: &[Point2<f64>], b: &[Point2<f64>]) -> bool {
    a.len() >= 3 && b.len() >= 3 && polygon_area(&clip_polygon(a, b)).abs() > 0.0
}

/// Convex hulls of the connected components of `points`, merged until
/// pairwise disjoint.
fn component_hulls(groups: Vec<Vec<Point2<f64>>>) -> Vec<Vec<Point2<f64>>> {
    let mut sets: Vec<Vec<Point2<f64>>> = groups;
    loop {
        let hulls: Vec<Vec<Point2<f64>>> = sets.iter().map(|s| convex_hull(s)).collect();
        let mut merged = None;
        'outer: for i in 0..hulls.len() {
            for j in i + 1..hulls.len() {
                if hulls_overlap(&hulls[i], &hulls[j]) {
                    merged = Some((i, j));
                    break 'outer;
                }
            }
        }
        match merged {
            Some((i, j)) => {
                let b = sets.remove(j);
                sets[i].extend(b);
            }
            None => return hulls,
        }
    }
}

/// Area of the symmetric difference between disjoint convex hulls and
/// disjoint obstacle polygons.
fn symmetric_difference(hulls: &[Vec<Point2<f64>>], truth: &[Vec<Point2<f64>>]) -> f64 {
    let ah: f64 = hulls.iter().map(|h| polygon_area(h).abs()).sum();
    let ad: f64 = truth.iter().map(|d| polygon_area(d).abs()).sum();
    let mut inter = 0.0;
    for h in hulls.iter().filter(|h| h.len() >= 3) {
        for d in truth {
            inter += polygon_area(&clip_polygon(d, h)).abs();
        }
    }
    (ah + ad - 2.0 * inter).max(0.0)
}

/// Scans thresholds, takes convex hulls of the super-level set and
/// compares them with the true obstacles given as polygons.
pub fn level_set_metrics_polygons(map: &IndicatorMap, truth: &[Vec<Point2<f64>>]) -> Result<ReconstructionMetrics> {
    let max = map.max();
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::Degenerate("indicator map has no positive finite values".into()));
    }
    let g = map.grid;
    let nodes = g.nodes();
    let domain = g.area();
    let ad: f64 = truth.iter().map(|d| polygon_area(d).abs()).sum();
    let mut best: Option<ReconstructionMetrics> = None;
    let mut scan = Vec::new();
    for tau in thresholds() {
        let mask: Vec<bool> = map.values.iter().map(|&v| v >= tau * max).collect();
        let groups: Vec<Vec<Point2<f64>>> =
            components(&mask, g.nx, g.ny).into_iter().map(|c| c.into_iter().map(|i| nodes[i]).collect()).collect();
        if groups.is_empty() {
            continue;
        }
        let hulls = component_hulls(groups);
        let sd = symmetric_difference(&hulls, truth);
        let err = sd / domain;
        scan.push((tau, err));
        if best.as_ref().map_or(true, |b| err < b.area_error) {
            best = Some(ReconstructionMetrics {
                best_threshold: tau,
                area_error: err,
                area_error_rel_obstacle: sd / ad,
                hulls,
                scan: vec![],
            });
        }
    }
    let mut best = best.ok_or_else(|| Error::Degenerate("empty level set at every threshold".into()))?;
    best.scan = scan;
    Ok(best)
}

/// [`level_set_metrics_polygons`] with each curve sampled at 512 points.
pub fn level_set_metrics(map: &IndicatorMap, truth: &[BoundaryCurve<f64>]) -> Result<ReconstructionMetrics> {
    let polys: Vec<Vec<Point2<f64>>> = truth.iter().map(|c| c.polygon(512)).collect();
    level_set_metrics_polygons(map, &polys)
}

/// Mean indicator inside the obstacles and over unmasked nodes farther than
/// `margin` from every obstacle boundary.
pub fn contrast(map: &IndicatorMap, truth: &[BoundaryCurve<f64>], margin: f64) -> (f64, f64) {
    let polys: Vec<Vec<Point2<f64>>> = truth.iter().map(|c| c.polygon(512)).collect();
    let inside = |p: Point2<f64>| polys.iter().any(|poly| point_in_polygon(p, poly));
    let far = |p: Point2<f64>| {
        polys.iter().all(|poly| {
            !point_in_polygon(p, poly)
                && poly.iter().zip(poly.iter().cycle().skip(1)).all(|(&a, &b)| segment_distance(p, a, b) > margin)
        })
    };
    let (mut si, mut ni, mut so, mut no) = (0.0, 0usize, 0.0, 0usize);
    for (p, v) in map.grid.nodes().into_iter().zip(&map.values) {
        if map.grid.masked(p) {
            continue;
        }
        if inside(p) {
            si += v;
            ni += 1;
        } else if far(p) {
            so += v;
            no += 1;
        }
    }
    (si / ni.max(1) as f64, so / no.max(1) as f64)
}

pub fn point_in_polygon(p: Point2<f64>, poly: &[Point2<f64>]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            inside = !inside;
        }
    }
    inside
}

fn segment_distance(p: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_sqr()).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}
