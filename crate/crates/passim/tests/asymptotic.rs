use passim::asymptotic::*;
use passim::forward::{disk_series_field, DirichletSolver, DiskScatterer};
use passim::geometry::{sensor_ring, ObstacleSpec, SceneConfig, Shape};
use passim::specfun::{bessel_j, green, hankel1, TruncationPolicy};
use passim::{Complex, Point};
use std::f64::consts::{PI, TAU};

const K: f64 = TAU;

fn kite_scene() -> SceneConfig {
    SceneConfig {
        obstacles: vec![ObstacleSpec { shape: Shape::Kite, center: Point::new(2.0, 2.0), size: Some(0.5), rotation: 0.0 }],
        ..SceneConfig::default()
    }
}

fn rel(a: &[Complex], b: &[Complex]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn mu_eps_examples() {
    let eps = 1e-2;
    let y = Point::new(0.0, 0.0);
    let mu = mu_eps(y, Point::new(eps, 0.0), eps, K).unwrap();
    assert!((mu + 1.0).norm() < 1e-15);
    let mu = mu_eps(Point::new(100.0, 0.0), Point::new(-1e4, 0.0), eps, K).unwrap();
    // large-argument oracle sqrt(2 / (pi x)) for the numerator
    let x = K * 1.01e4;
    let expect = (2.0 / (PI * x)).sqrt() / hankel1(0, K * eps).unwrap().norm();
    assert!((mu.norm() - expect).abs() < 1e-4 * expect, "{}", mu.norm());
    assert!((1.4e-3..1.6e-3).contains(&mu.norm()));
    assert!(mu_eps(y, y, eps, K).is_err());
    assert!(mu_eps(y, Point::new(1.0, 0.0), 0.7, K).is_err());
}

#[test]
fn sigma_eps_examples() {
    // H_0(0.0628319) from an independent series: J_0 + i Y_0.
    let x = TAU * 1e-2;
    let j0 = 1.0 - x * x / 4.0 + x.powi(4) / 64.0;
    let y0 = 2.0 / PI * ((x / 2.0).ln() + 0.5772156649015329) * j0 + 2.0 / PI * (x * x / 4.0 - 1.5 * x.powi(4) / 64.0);
    let expect = PI * PI * (j0 * j0 + y0 * y0) * 1e4;
    let s = sigma_eps(1e-2, 2.0).unwrap();
    assert!((s - expect).abs() < 1e-9 * expect);
    assert!((s - 4.30e5).abs() < 0.01e5, "{s}");
    let s0 = sigma_eps(1e-2, 0.0).unwrap();
    assert!((s0 - PI * PI * hankel1(0, x).unwrap().norm_sqr()).abs() < 1e-12 * s0);
    let mut prev = 0.0;
    for i in 0..40 {
        let e = 0.4 * 0.85f64.powi(i);
        let s = sigma_eps(e, 1.0).unwrap();
        assert!(s > prev);
        prev = s;
    }
}

#[test]
fn v_tilde_structure() {
    let cfg = kite_scene();
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let sensors = sensor_ring::<f64>(&cfg);
    let z = cfg.source::<f64>();
    let y = Point::polar(100.0, 0.7);
    let v = v_tilde(&solver, &sensors, y, z, cfg.eps).unwrap();
    for (x, vi) in sensors.iter().zip(&v.vi) {
        let ratio = vi / green(*x, y, K).unwrap();
        assert!((ratio - v.mu).norm() < 1e-14 * v.mu.norm());
    }
    // v~^s cancels v~^i on the obstacle (midpoint trace of the density).
    let model = PointScatterModel::new(&solver, &sensors, z, cfg.eps).unwrap();
    let data: Vec<Complex> = solver.point_source_data(y).unwrap().iter().map(|d| d * v.mu).collect();
    let d = solver.solve(&data).unwrap();
    let m = solver.meshes()[0].len();
    let ts: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * TAU / m as f64).collect();
    let tr = d.boundary_trace(0, &ts, K).unwrap();
    for (t, s) in ts.iter().zip(&tr) {
        let vi = green(solver.meshes()[0].curve.eval(*t).x, y, K).unwrap() * v.mu;
        assert!((s + vi).norm() <= 1e-4 * vi.norm());
    }
    assert_eq!(model.points().len(), sensors.len());
}

#[test]
fn point_source_model_matches_disk_series() {
    let eps = 1e-2;
    let sensors: Vec<Point> = (0..24).map(|j| Point::polar(5.0, TAU * j as f64 / 24.0)).collect();
    let y = Point::polar(100.0, 1.1);
    let z = Point::polar(1e4, PI);
    let disk = DiskScatterer::new(y, eps, TruncationPolicy::default()).unwrap();
    let exact = disk_series_field(&disk, z, &sensors, K, TruncationPolicy::default()).unwrap().values;
    let mu = mu_eps(y, z, eps, K).unwrap();
    let model: Vec<Complex> = sensors.iter().map(|&x| green(x, y, K).unwrap() * mu).collect();
    // The error is dominated by the n = +-1 modes, of relative size
    // (pi/2) (ka)^2 |H_0(ka)|, ka = 2 pi eps.
    let ka = K * eps;
    let dipole = PI / 2.0 * ka * ka * hankel1(0, ka).unwrap().norm();
    let e = rel(&model, &exact);
    assert!(e <= 1.5 * dipole && e >= 0.3 * dipole, "{e} vs {dipole}");
}

fn direct_average(x: &[Point], rho: f64, z: Point, eps: f64, n: usize) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); x.len()];
    for l in 0..n {
        let y = Point::polar(rho, TAU * l as f64 / n as f64);
        let mu = mu_eps(y, z, eps, K).unwrap();
        for (o, &p) in out.iter_mut().zip(x) {
            *o += green(p, y, K).unwrap() * mu / n as f64;
        }
    }
    out
}

#[test]
fn ring_average_matches_dense_quadrature() {
    let (eps, p, q) = (1e-2f64, 1.0, 2.0);
    let rho: f64 = eps.powf(-p);
    let z = Point::polar(eps.powf(-q), PI);
    let xs: Vec<Point> = (0..12).map(|j| Point::polar(5.0, TAU * j as f64 / 12.0 + 0.1)).chain([Point::new(0.3, -0.2)]).collect();
    let exact = avg_v_tilde_i(&xs, rho, z, eps, K).unwrap();
    let dense = direct_average(&xs, rho, z, eps, 4096);
    for (a, b) in exact.iter().zip(&dense) {
        assert!((a - b).norm() <= 0.05 * b.norm(), "{a} vs {b}");
        assert!((a - b).norm() <= 1e-8 * b.norm(), "{a} vs {b}");
    }
    // averaging suppresses the field by about eps^{p/2}
    let y = Point::polar(rho, 0.4);
    let mu = mu_eps(y, z, eps, K).unwrap();
    let single: Vec<Complex> = xs.iter().map(|&x| green(x, y, K).unwrap() * mu).collect();
    let ratio = rel(&exact, &single) ;
    let (na, ns) = (exact.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(), single.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt());
    assert!(na / ns <= 5.0 * eps.powf(p / 2.0), "{}", na / ns);
    assert!(ratio.is_finite());
    assert!(avg_v_tilde_i(&[Point::new(200.0, 0.0)], rho, z, eps, K).is_err());
}

#[test]
fn leading_ring_average_when_q_exceeds_2p() {
    // The closed form's phase error is O(eps^{q-2p}); at q = 3p it is small.
    let (eps, p, q) = (2e-2f64, 1.0, 3.0);
    let rho: f64 = eps.powf(-p);
    let z = Point::polar(eps.powf(-q), PI);
    let xs: Vec<Point> = (0..8).map(|j| Point::polar(1.5, TAU * j as f64 / 8.0)).collect();
    let exact = avg_v_tilde_i(&xs, rho, z, eps, K).unwrap();
    let lead: Vec<Complex> = xs.iter().map(|&x| avg_v_tilde_i_leading(x, eps, p, q, PI).unwrap()).collect();
    assert!(rel(&lead, &exact) < 0.2, "{}", rel(&lead, &exact));
}

#[test]
fn plane_wave_average_is_j0() {
    for &(eps, p, c, tx, tz) in &[(1e-2f64, 1.0, 2.5, 0.3, PI), (0.04, 1.0, 5.0, 2.0, 0.5), (0.1, 0.5, 0.7, -1.0, 1.0)] {
        let n = 8192;
        let ep: f64 = eps.powf(-p);
        let s: Complex = (0..n)
            .map(|l| {
                let ty = TAU * l as f64 / n as f64;
                Complex::from_polar(1.0, -TAU * (ep * (ty - tz).cos() + c * (tx - ty).cos()))
            })
            .sum::<Complex>()
            / n as f64;
        let j = plane_wave_average(eps, p, c, tx, tz).unwrap();
        assert!((s - j).norm() <= 1e-10, "{s} vs {j}");
        let h = (Point::polar(ep, tz) + Point::polar(c, tx)).norm();
        assert_eq!(j, bessel_j(0, TAU * h).unwrap());
    }
}

#[test]
fn rate_fit_recovers_power_law() {
    let eps = [0.04, 0.02, 0.01];
    let norms: Vec<f64> = eps.iter().map(|e: &f64| 3.0 * e.powf(1.5)).collect();
    let f = RateFit::fit("x", &eps, &norms).unwrap();
    assert!((f.slope - 1.5).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12);
    assert!((f.r_squared - 1.0).abs() < 1e-12);
    assert!(f.csv_row().starts_with("x,1.5"));
    assert!(RateFit::fit("x", &[0.01, 0.02, 0.04], &norms).is_err());
    assert!(RateFit::fit("x", &eps[..2], &norms[..2]).is_err());
    assert_eq!(RateQuantity::from_name("avg_v_tilde_on_B"), Some(RateQuantity::AvgVTildeOnB));
}

#[test]
fn amplitude_hierarchy() {
    let cfg = kite_scene();
    let us = probe_norm(RateQuantity::UsOnB, &cfg).unwrap();
    let v = probe_norm(RateQuantity::VTildeOnB, &cfg).unwrap();
    let avg = probe_norm(RateQuantity::AvgVTildeOnB, &cfg).unwrap();
    let e = probe_norm(RateQuantity::DecompositionError, &cfg).unwrap();
    let vi = probe_norm(RateQuantity::ViOnB, &cfg).unwrap();
    let vs = probe_norm(RateQuantity::VsOnB, &cfg).unwrap();
    eprintln!("us {us:e} v {v:e} avg {avg:e} e {e:e} vi {vi:e} vs {vs:e}");
    assert!(e < v && v < us);
    assert!(avg / v <= 5.0 * cfg.eps.sqrt());
}
