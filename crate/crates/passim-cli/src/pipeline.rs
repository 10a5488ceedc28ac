use crate::manifest::Manifest;
use passim::correlation::{
    acquire_near_field, modified_cross_correlation, multi_cross_correlation, write_matrix_csv, CrossCorrelationMatrix,
};
use passim::forward::DirichletSolver;
use passim::geometry::SceneConfig;
use passim::lsm::{
    contrast, discrepancy_level, indicator_map, level_set_metrics, IndicatorConvention, IndicatorMap,
    ReconstructionMetrics,
};
use passim::Result;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Discrepancy amplitude used when the scene carries no noise.
pub const NOISE_FREE_LEVEL: f64 = 1e-4;

/// Acquire, perturb, remove the acquisition mean and correlate.
pub fn correlation_matrix(cfg: &SceneConfig) -> Result<CrossCorrelationMatrix<f64>> {
    let solver = DirichletSolver::<f64>::for_scene(cfg)?;
    let n = acquire_near_field(cfg, &solver)?;
    let n = if cfg.noise_delta > 0.0 { n.apply_noise(cfg.noise_delta, cfg.seed)? } else { n };
    correlate(&n.remove_acquisition_mean()?, cfg)
}

fn correlate(n: &passim::correlation::NearFieldMatrix<f64>, cfg: &SceneConfig) -> Result<CrossCorrelationMatrix<f64>> {
    if cfg.scatterers == 1 {
        modified_cross_correlation(n, cfg)
    } else {
        multi_cross_correlation(n, cfg, cfg.scatterers)
    }
}

/// Morozov level for `c`; `(level, factor)`.
pub fn level_for(c: &CrossCorrelationMatrix<f64>, noise: f64) -> Result<(f64, f64)> {
    discrepancy_level(c, if noise > 0.0 { noise } else { NOISE_FREE_LEVEL })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub best_threshold: f64,
    pub area_error: f64,
    pub area_error_rel_obstacle: f64,
    pub hulls: usize,
    pub inside_mean: f64,
    pub outside_mean: f64,
    pub contrast: f64,
    pub delta_level: f64,
    pub delta_factor: f64,
    pub unconverged: usize,
    pub convention: IndicatorConvention,
}

impl Summary {
    fn new(map: &IndicatorMap, metrics: &ReconstructionMetrics, (inside, outside): (f64, f64), level: (f64, f64)) -> Self {
        Summary {
            best_threshold: metrics.best_threshold,
            area_error: metrics.area_error,
            area_error_rel_obstacle: metrics.area_error_rel_obstacle,
            hulls: metrics.hulls.len(),
            inside_mean: inside,
            outside_mean: outside,
            contrast: inside / outside,
            delta_level: level.0,
            delta_factor: level.1,
            unconverged: map.unconverged,
            convention: map.convention,
        }
    }

    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("best_threshold", format!("{:?}", self.best_threshold)),
            ("area_error", format!("{:?}", self.area_error)),
            ("area_error_rel_obstacle", format!("{:?}", self.area_error_rel_obstacle)),
            ("hulls", self.hulls.to_string()),
            ("inside_mean", format!("{:?}", self.inside_mean)),
            ("outside_mean", format!("{:?}", self.outside_mean)),
            ("contrast", format!("{:?}", self.contrast)),
            ("delta_level", format!("{:?}", self.delta_level)),
            ("delta_factor", format!("{:?}", self.delta_factor)),
            ("unconverged", self.unconverged.to_string()),
            ("convention", format!("{:?}", self.convention).to_lowercase()),
        ]
    }
}

pub struct Reconstruction {
    pub c_tilde: CrossCorrelationMatrix<f64>,
    pub map: IndicatorMap,
    pub metrics: ReconstructionMetrics,
    pub summary: Summary,
}

/// In-memory pipeline, no files.
pub fn reconstruct(cfg: &SceneConfig, convention: IndicatorConvention) -> Result<Reconstruction> {
    cfg.validate()?;
    let c_tilde = correlation_matrix(cfg)?;
    let level = level_for(&c_tilde, cfg.noise_delta)?;
    let map = indicator_map(&c_tilde, cfg, level.0, convention)?;
    let curves = cfg.curves::<f64>()?;
    let metrics = level_set_metrics(&map, &curves)?;
    let means = contrast(&map, &curves, cfg.lambda());
    let summary = Summary::new(&map, &metrics, means, level);
    Ok(Reconstruction { c_tilde, map, metrics, summary })
}

pub struct RunArtifacts {
    pub manifest: Manifest,
    pub summary: Option<Summary>,
}

/// Runs the full pipeline and writes the default artifact layout into
/// `out_dir`. Stage failures are recorded, not returned; `Err` only for an
/// invalid config or an unwritable directory.
pub fn run_scenario(
    cfg: &SceneConfig,
    preset: Option<&str>,
    convention: IndicatorConvention,
    out_dir: &Path,
) -> Result<RunArtifacts> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut m = Manifest::new(out_dir, preset, Some(cfg));
    m.write("scene.json", cfg.to_json().as_bytes())?;
    let summary = stages(cfg, convention, &mut m);
    let text = summary_text(cfg, preset, &m, summary.as_ref());
    m.write("summary.txt", text.as_bytes())?;
    m.finish()?;
    Ok(RunArtifacts { manifest: m, summary })
}

fn stages(cfg: &SceneConfig, convention: IndicatorConvention, m: &mut Manifest) -> Option<Summary> {
    let solver = m.stage("solver", || DirichletSolver::<f64>::for_scene(cfg))?;
    let n = m.stage("acquire", || acquire_near_field(cfg, &solver))?;
    let n = if cfg.noise_delta > 0.0 { m.stage("noise", || n.apply_noise(cfg.noise_delta, cfg.seed))? } else { n };
    let n = m.stage("mean_removal", || n.remove_acquisition_mean())?;
    let hash = cfg.hash();
    let dir = m.dir().to_path_buf();
    let c = m.stage("correlate", || {
        let c = correlate(&n, cfg)?;
        write_matrix_csv(&dir.join("C_tilde.csv"), &c.entries, &hash)?;
        Ok(c)
    })?;
    m.record("C_tilde.csv").ok()?;
    let (map, level) = m.stage("invert", || {
        let level = level_for(&c, cfg.noise_delta)?;
        let map = indicator_map(&c, cfg, level.0, convention)?;
        map.write_csv(&dir.join("indicator.csv"))?;
        map.write_pgm(&dir.join("indicator.pgm"))?;
        Ok((map, level))
    })?;
    m.record("indicator.csv").ok()?;
    m.record("indicator.pgm").ok()?;
    let summary = m.stage("metrics", || {
        let curves = cfg.curves::<f64>()?;
        let metrics = level_set_metrics(&map, &curves)?;
        let s = Summary::new(&map, &metrics, contrast(&map, &curves, cfg.lambda()), level);
        Ok(s)
    })?;
    let mut csv = String::from("metric,value\n");
    for (k, v) in summary.rows() {
        let _ = writeln!(csv, "{k},{v}");
    }
    m.write("metrics.csv", csv.as_bytes()).ok()?;
    Some(summary)
}

fn summary_text(cfg: &SceneConfig, preset: Option<&str>, m: &Manifest, s: Option<&Summary>) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "preset: {}", preset.unwrap_or("(config file)"));
    let _ = writeln!(t, "scene hash: {}", cfg.hash());
    let _ = writeln!(
        t,
        "J = {}, L = {}, R = {}, eps = {}, noise = {}, seed = {}, aperture = {}",
        cfg.sensors,
        cfg.acquisitions,
        cfg.scatterers,
        cfg.eps,
        cfg.noise_delta,
        cfg.seed,
        crate::presets::aperture_label(cfg.aperture)
    );
    for st in &m.stages {
        match &st.error {
            None => {
                let _ = writeln!(t, "stage {}: ok", st.name);
            }
            Some(e) => {
                let _ = writeln!(t, "stage {}: FAILED: {e}", st.name);
            }
        }
    }
    if let Some(s) = s {
        let _ = writeln!(t, "inside/outside contrast: {:.3}", s.contrast);
        let _ = writeln!(t, "area error (domain): {:.4e} at threshold {:.2}", s.area_error, s.best_threshold);
        let _ = writeln!(t, "area error (obstacle): {:.4e}", s.area_error_rel_obstacle);
        let _ = writeln!(t, "hulls: {}", s.hulls);
        let _ = writeln!(t, "Morozov level: {:.4e} (factor {:.4e})", s.delta_level, s.delta_factor);
        if s.unconverged > 0 {
            let _ = writeln!(t, "nodes without a discrepancy root: {}", s.unconverged);
        }
    }
    t
}
