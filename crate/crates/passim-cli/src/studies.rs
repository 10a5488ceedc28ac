use crate::manifest::Manifest;
use crate::pipeline::correlation_matrix;
use passim::asymptotic::{rate_probe, RateFit, RateQuantity, HK_QUADRATURE, RATE_CSV_HEADER};
use passim::correlation::{hk_matrix_residual, scattered_field_matrix, HkKind};
use passim::forward::DirichletSolver;
use passim::geometry::{sensor_ring, SceneConfig};
use passim::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub const DEFAULT_EPS: [f64; 3] = [0.04, 0.02, 0.01];

/// Quantities reported by [`run_rates`], in output order.
pub const RATE_ROWS: [RateQuantity; 5] = [
    RateQuantity::UsOnB,
    RateQuantity::VTildeOnB,
    RateQuantity::AvgVTildeOnB,
    RateQuantity::DecompositionError,
    RateQuantity::ModifiedHkResidual,
];

/// Fits every quantity of [`RATE_ROWS`]; errors name the quantity.
pub fn rate_fits(eps_list: &[f64], template: &SceneConfig) -> Result<Vec<RateFit>> {
    RATE_ROWS
        .iter()
        .map(|&q| rate_probe(q, eps_list, template).map_err(|e| Error::Domain(format!("{q}: {e}"))))
        .collect()
}

/// Writes `rates.csv` and `summary.txt`; a failing quantity is recorded as a
/// failed stage and the remaining rows are still written.
pub fn run_rates(eps_list: &[f64], template: &SceneConfig, out_dir: &Path) -> Result<Manifest> {
    template.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut m = Manifest::new(out_dir, Some("rates"), Some(template));
    let mut csv = format!("{RATE_CSV_HEADER}\n");
    let mut text = format!("eps: {eps_list:?}\n");
    for q in RATE_ROWS {
        if let Some(fit) = m.stage(q.name(), || rate_probe(q, eps_list, template)) {
            let _ = writeln!(csv, "{}", fit.csv_row());
            let _ = writeln!(text, "{:<22} slope {:7.4}  r2 {:.4}", q.name(), fit.slope, fit.r_squared);
        }
    }
    m.write("rates.csv", csv.as_bytes())?;
    m.write("summary.txt", text.as_bytes())?;
    m.finish()?;
    Ok(m)
}

/// One line of `identities.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub eps: f64,
    pub residual: f64,
}

/// `|C~ - (U^s - conj U^s)|_F / |U^s - conj U^s|_F` for noise-free measured
/// data of `cfg`.
pub fn measured_identity_residual(cfg: &SceneConfig) -> Result<f64> {
    let clean = SceneConfig { noise_delta: 0.0, ..cfg.clone() };
    let c = correlation_matrix(&clean)?;
    let solver = DirichletSolver::<f64>::for_scene(&clean)?;
    let us = scattered_field_matrix(&solver, &sensor_ring::<f64>(&clean))?;
    let lhs = us.sub(&us.conj());
    Ok(c.entries.sub(&lhs).frobenius_norm() / lhs.frobenius_norm())
}

/// Standard and modified identity residuals over `eps_list`, and the
/// measured-data residual at `cfg.eps`.
pub fn identity_rows(cfg: &SceneConfig, eps_list: &[f64]) -> Result<Vec<IdentityRow>> {
    let mut rows = Vec::new();
    for &eps in eps_list {
        let c = SceneConfig { eps, ..cfg.clone() };
        let solver = DirichletSolver::<f64>::for_scene(&c)?;
        for (identity, kind) in [("standard", HkKind::Standard), ("modified", HkKind::Modified)] {
            rows.push(IdentityRow { identity, eps, residual: hk_matrix_residual(kind, &c, &solver, HK_QUADRATURE)? });
        }
    }
    rows.push(IdentityRow { identity: "measured", eps: cfg.eps, residual: measured_identity_residual(cfg)? });
    Ok(rows)
}

pub fn run_identities(cfg: &SceneConfig, eps_list: &[f64], out_dir: &Path) -> Result<Manifest> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let mut m = Manifest::new(out_dir, Some("identities"), Some(cfg));
    let rows = m.stage("identities", || identity_rows(cfg, eps_list)).unwrap_or_default();
    let mut csv = String::from("identity,eps,residual\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{:?},{:?}", r.identity, r.eps, r.residual);
    }
    m.write("identities.csv", csv.as_bytes())?;
    m.finish()?;
    Ok(m)
}
