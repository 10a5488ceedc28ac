use passim::asymptotic::PointScatterModel;
use passim::correlation::*;
use passim::forward::{two_obstacle_field, DirichletSolver, DiskScatterer};
use passim::geometry::{scatterer_positions, sensor_ring, ObstacleSpec, Placement, SceneConfig, Shape};
use passim::linalg::CMatrix;
use passim::specfun::{green, TruncationPolicy};
use passim::{Complex, Error, Point};

fn ellipse() -> ObstacleSpec {
    ObstacleSpec { shape: Shape::Ellipse { a: 1.5, b: 1.0 }, center: Point::new(-2.0, -2.0), size: Some(0.5), rotation: 0.0 }
}

fn kite() -> ObstacleSpec {
    ObstacleSpec { shape: Shape::Kite, center: Point::new(2.0, 2.0), size: Some(0.5), rotation: 0.0 }
}

fn scene(sensors: usize, acquisitions: usize) -> SceneConfig {
    SceneConfig { obstacles: vec![kite()], sensors, acquisitions, noise_delta: 0.0, ..SceneConfig::default() }
}

fn asymmetry(c: &CMatrix<f64>) -> f64 {
    c.sub(&c.transpose()).frobenius_norm() / c.frobenius_norm()
}

#[test]
fn single_acquisition_is_the_coupled_solve() {
    let cfg = scene(16, 1);
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let n = acquire_near_field(&cfg, &solver).unwrap();
    assert_eq!((n.entries.rows(), n.entries.cols()), (16, 1));
    let y = scatterer_positions::<f64>(&cfg).unwrap().positions[0][0];
    let disk = DiskScatterer::new(y, cfg.disk_radius(), TruncationPolicy::default()).unwrap();
    let z = cfg.source::<f64>();
    let sys = passim::forward::BlockSystem::new(&solver, disk).unwrap();
    let (fd, fe) = sys.point_source_data(z).unwrap();
    let direct = two_obstacle_field(&solver, disk, &fd, &fe, &sensor_ring(&cfg)).unwrap();
    for (a, b) in n.entries.column(0).iter().zip(&direct) {
        assert!((a - b).norm() <= 1e-12 * b.norm());
    }
    assert!(!n.averaged && !n.noisy);
    assert_eq!(n.scene_hash, cfg.hash());
}

#[test]
fn paper_dimensions() {
    let cfg = SceneConfig { obstacles: vec![kite()], ..SceneConfig::default() };
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let n = acquire_near_field(&cfg, &solver).unwrap();
    assert_eq!((n.entries.rows(), n.entries.cols()), (120, 150));
}

#[test]
fn multi_scatterer_columns_superpose() {
    let cfg = SceneConfig { scatterers: 5, placement: Placement::UniformRandom, ..scene(12, 4) };
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let n = acquire_near_field(&cfg, &solver).unwrap();
    let sensors = sensor_ring::<f64>(&cfg);
    let z = cfg.source::<f64>();
    let model = PointScatterModel::new(&solver, &sensors, z, cfg.eps).unwrap();
    let us = model.scattered(z).unwrap();
    let layout = scatterer_positions::<f64>(&cfg).unwrap();
    for (l, ys) in layout.positions.iter().enumerate() {
        assert_eq!(ys.len(), 5);
        let mut sum = us.clone();
        for &y in ys {
            for (s, v) in sum.iter_mut().zip(model.eval(y).unwrap().total()) {
                *s += v;
            }
        }
        for (a, b) in n.entries.column(l).iter().zip(&sum) {
            assert!((a - b).norm() <= 1e-10 * b.norm());
        }
    }
}

#[test]
fn mean_removal() {
    let constant = NearFieldMatrix {
        entries: CMatrix::from_fn(3, 5, |r, _| Complex::new(r as f64, -1.0)),
        scene_hash: String::new(),
        averaged: false,
        noisy: false,
    };
    let zero = constant.remove_acquisition_mean().unwrap();
    assert!(zero.entries.max_abs() == 0.0);
    assert!(matches!(zero.remove_acquisition_mean(), Err(Error::State(_))));

    // the row mean also removes the L-point average of v~, which falls off
    // like 1/sqrt(L) only, so a long acquisition is used
    let cfg = scene(24, 400);
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let raw = acquire_near_field(&cfg, &solver).unwrap();
    let n = raw.remove_acquisition_mean().unwrap();
    assert!(n.averaged);
    for r in 0..24 {
        let row = n.entries.row(r);
        let mean: Complex = row.iter().sum::<Complex>() / 400.0;
        let rms = (row.iter().map(|z| z.norm_sqr()).sum::<f64>() / 400.0).sqrt();
        assert!(mean.norm() <= 1e-12 * rms);
    }
    // N~ against independently computed v~ fields
    let sensors = sensor_ring::<f64>(&cfg);
    let model = PointScatterModel::new(&solver, &sensors, cfg.source(), cfg.eps).unwrap();
    let layout = scatterer_positions::<f64>(&cfg).unwrap();
    let cols: Vec<Vec<Complex>> = layout.positions.iter().map(|ys| model.eval(ys[0]).unwrap().total()).collect();
    let v = CMatrix::from_fn(24, 400, |r, c| cols[c][r]);
    let err = n.entries.sub(&v).frobenius_norm() / v.frobenius_norm();
    assert!(err <= 0.1, "{err}");
}

#[test]
fn noise_model() {
    let cfg = scene(10, 8);
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let n = acquire_near_field(&cfg, &solver).unwrap();
    let same = n.clone().apply_noise(0.0, 3).unwrap();
    assert_eq!(same, n);
    assert!(!same.noisy);
    let a = n.clone().apply_noise(5e-3, 3).unwrap();
    let b = n.clone().apply_noise(5e-3, 3).unwrap();
    let c = n.clone().apply_noise(5e-3, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.entries, c.entries);
    assert!(a.noisy);
    let rel = a.entries.sub(&n.entries).frobenius_norm() / n.entries.frobenius_norm();
    assert!(rel > 0.0 && rel <= 5e-3 * 2f64.sqrt());
    for (x, y) in a.entries.as_slice().iter().zip(n.entries.as_slice()) {
        let (x, y): (&Complex, &Complex) = (x, y);
        assert!((x - y).norm() <= 5e-3 * 2f64.sqrt() * y.norm() * (1.0 + 1e-12));
    }
    assert!(n.apply_noise(-1.0, 0).is_err());
}

#[test]
fn correlation_of_zero_data_is_the_im_phi_term() {
    let cfg = scene(12, 6);
    let zero = NearFieldMatrix { entries: CMatrix::zeros(12, 6), scene_hash: String::new(), averaged: true, noisy: false };
    let c = modified_cross_correlation(&zero, &cfg).unwrap();
    let sensors = sensor_ring::<f64>(&cfg);
    for a in 0..12 {
        assert_eq!(c.entries[(a, a)], Complex::new(0.0, -0.5));
        for b in 0..12 {
            if a != b {
                let phi = green(sensors[a], sensors[b], cfg.k).unwrap();
                assert!((c.entries[(a, b)] - (phi.conj() - phi)).norm() < 1e-14);
            }
        }
    }
    let s = standard_cross_correlation(&CMatrix::zeros(12, 6), &sensors, 100.0, cfg.k).unwrap();
    assert_eq!(s.entries, c.entries);
    assert_eq!(s.kind, CorrelationKind::Standard);
    assert_eq!(c.kind, CorrelationKind::Modified);
    assert!((c.scale.surface - std::f64::consts::TAU * 100.0).abs() < 1e-9);
}

#[test]
fn correlation_preconditions() {
    let cfg = scene(12, 6);
    let raw: NearFieldMatrix<f64> = NearFieldMatrix { entries: CMatrix::zeros(12, 6), scene_hash: String::new(), averaged: false, noisy: false };
    assert!(matches!(modified_cross_correlation(&raw, &cfg), Err(Error::State(_))));
    let avg = raw.remove_acquisition_mean().unwrap();
    assert!(matches!(multi_cross_correlation(&avg, &cfg, 2), Err(Error::Config(_))));
    let multi = SceneConfig { scatterers: 3, placement: Placement::UniformRandom, ..cfg.clone() };
    assert!(matches!(modified_cross_correlation(&avg, &multi), Err(Error::Config(_))));
    let narrow = SceneConfig { sensors: 13, ..cfg };
    assert!(modified_cross_correlation(&avg, &narrow).is_err());
}

#[test]
fn multi_correlation_reduces_and_repeats() {
    let cfg = scene(16, 30);
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let n = acquire_near_field(&cfg, &solver).unwrap().remove_acquisition_mean().unwrap();
    let a = modified_cross_correlation(&n, &cfg).unwrap();
    let b = multi_cross_correlation(&n, &cfg, 1).unwrap();
    assert_eq!(a, b);

    // repeating every scatterer set leaves the normalised sum unchanged
    let multi = SceneConfig { scatterers: 3, placement: Placement::UniformRandom, ..scene(16, 10) };
    let m = acquire_near_field(&multi, &solver).unwrap().remove_acquisition_mean().unwrap();
    let c1 = multi_cross_correlation(&m, &multi, 3).unwrap();
    let twice = NearFieldMatrix { entries: CMatrix::from_fn(16, 20, |r, c| m.entries[(r, c % 10)]), ..m.clone() };
    let multi2 = SceneConfig { acquisitions: 20, ..multi.clone() };
    let c2 = multi_cross_correlation(&twice, &multi2, 3).unwrap();
    assert!(c1.entries.sub(&c2.entries).frobenius_norm() <= 1e-13 * c1.entries.frobenius_norm());
    assert_eq!(c1.kind, CorrelationKind::Multi);
    assert_eq!(c2.scale.acquisitions, 20);
}

#[test]
fn asymmetry_decreases_with_more_acquisitions() {
    let mut last = f64::INFINITY;
    for l in [100, 200, 400] {
        let cfg = scene(24, l);
        let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
        let n = acquire_near_field(&cfg, &solver).unwrap().remove_acquisition_mean().unwrap();
        let a = asymmetry(&modified_cross_correlation(&n, &cfg).unwrap().entries);
        assert!(a < last, "L = {l}: {a} >= {last}");
        last = a;
    }
}

#[test]
fn real_part_shrinks_with_eps() {
    let mut last = f64::INFINITY;
    for eps in [0.04, 0.02, 0.01] {
        let cfg = SceneConfig { eps, ..scene(24, 400) };
        let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
        let n = acquire_near_field(&cfg, &solver).unwrap().remove_acquisition_mean().unwrap();
        let c = modified_cross_correlation(&n, &cfg).unwrap().entries;
        let re = c.map(|z| Complex::new(z.re, 0.0)).frobenius_norm() / c.frobenius_norm();
        assert!(re < last, "eps {eps}: {re}");
        last = re;
    }
}

#[test]
fn modified_identity_on_every_sensor_pair() {
    // dense-ring identity with exact v~ fields; the correlation matrix built
    // from measured data carries the decomposition error on top
    let cfg = SceneConfig { eps: 1e-2, ..scene(24, 150) };
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let r = hk_matrix_residual(HkKind::Modified, &cfg, &solver, 2048).unwrap();
    assert!(r <= 0.15, "{r}");
}

#[test]
fn standard_identity_with_point_sources() {
    let base = SceneConfig { obstacles: vec![ellipse()], ..scene(24, 256) };
    let solver = DirichletSolver::<f64>::for_scene(&base).unwrap();
    let sensors = sensor_ring::<f64>(&base);
    let us = scattered_field_matrix(&solver, &sensors).unwrap();
    let lhs = us.sub(&us.conj());
    let residual = |radius: f64| {
        let sources: Vec<Point> =
            (0..256).map(|l| Point::polar(radius, std::f64::consts::TAU * l as f64 / 256.0)).collect();
        let total = total_field_matrix(&solver, &sensors, &sources).unwrap();
        let c = standard_cross_correlation(&total, &sensors, radius, base.k).unwrap();
        c.entries.sub(&lhs).frobenius_norm() / lhs.frobenius_norm()
    };
    let (r100, r200) = (residual(100.0), residual(200.0));
    assert!(r100 <= 0.1, "{r100}");
    assert!(r200 < r100, "{r200} >= {r100}");
}

#[test]
fn hk_residuals_are_quadrature_converged() {
    // the row mean also removes the L-point average of v~, which falls off
    // like 1/sqrt(L) only, so a long acquisition is used
    let cfg = scene(24, 400);
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    let sensors = sensor_ring::<f64>(&cfg);
    let pairs = vec![(sensors[0], sensors[3]), (sensors[0], sensors[6]), (sensors[0], sensors[12])];
    let r1024 = hk_residual(HkKind::Standard, &cfg, &solver, &pairs, 1024).unwrap();
    let r512 = hk_residual(HkKind::Standard, &cfg, &solver, &pairs, 512).unwrap();
    assert!((r1024 - r512).abs() < r1024, "{r512} vs {r1024}");
    // diagonal pair: LHS = 2i Im u^s(x, x) is finite
    let diag = hk_residual(HkKind::Standard, &cfg, &solver, &[(sensors[5], sensors[5])], 1024).unwrap();
    assert!(diag.is_finite() && diag < 0.5, "{diag}");
    assert!(hk_residual(HkKind::Standard, &cfg, &solver, &[], 64).is_err());
    assert!(hk_residual(HkKind::Modified, &cfg, &solver, &pairs, 0).is_err());
}

#[test]
fn matrix_csv_round_trip() {
    let m = CMatrix::from_fn(3, 4, |r, c| Complex::new((r as f64 + 0.1).sqrt() * 1e-7, -(c as f64) / 3.0));
    let dir = std::env::temp_dir().join(format!("passim-corr-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("c.csv");
    write_matrix_csv(&p, &m, "abc123").unwrap();
    let (back, hash) = read_matrix_csv(&p).unwrap();
    assert_eq!(hash, "abc123");
    assert_eq!(back, m);
    std::fs::write(&p, "# scene x\n# rows 1 cols 2\n1,2,3\n").unwrap();
    assert!(matches!(read_matrix_csv(&p), Err(Error::Parse(_))));
    std::fs::write(&p, "# rows 1 cols 1\n").unwrap();
    assert!(matches!(read_matrix_csv(&p), Err(Error::Parse(_))));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn acquisition_errors_carry_the_index() {
    // disk ring passing through the obstacle
    let cfg = SceneConfig {
        obstacles: vec![ObstacleSpec { shape: Shape::Kite, center: Point::new(100.0, 0.0), size: Some(0.5), rotation: 0.0 }],
        placement: Placement::PerturbedTrapezoid { beta_max: 0.0 },
        ..scene(8, 4)
    };
    let solver = DirichletSolver::<f64>::for_scene(&cfg).unwrap();
    match acquire_near_field(&cfg, &solver) {
        Err(Error::Acquisition { index, .. }) => assert_eq!(index, 0),
        other => panic!("{other:?}"),
    }
}
