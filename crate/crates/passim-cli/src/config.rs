use crate::presets::{preset, Task};
use passim::geometry::SceneConfig;
use passim::lsm::IndicatorConvention;
use passim::{Error, Result};
use serde_json::Value;
use std::path::Path;

/// Command-line overrides, applied last.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub noise: Option<f64>,
    pub grid: Option<(usize, usize)>,
    pub aperture: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SceneConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = self.noise {
            cfg.noise_delta = d;
        }
        if let Some((nx, ny)) = self.grid {
            cfg.grid.nx = nx;
            cfg.grid.ny = ny;
        }
        if let Some(a) = self.aperture {
            cfg.aperture = a;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub preset: Option<&'static str>,
    pub task: Task,
    pub config: SceneConfig,
}

/// Overlays the keys of a (possibly partial) JSON object onto `base`.
/// Nested objects merge key by key; anything else replaces.
pub fn overlay(base: &SceneConfig, json: &str) -> Result<SceneConfig> {
    let patch: Value = serde_json::from_str(json)?;
    if !patch.is_object() {
        return Err(Error::Config("config file must hold a JSON object".into()));
    }
    let mut v = serde_json::to_value(base)?;
    merge(&mut v, patch);
    Ok(serde_json::from_value(v)?)
}

fn merge(dst: &mut Value, src: Value) {
    match (dst, src) {
        (Value::Object(d), Value::Object(s)) => {
            for (k, v) in s {
                match d.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        d.insert(k, v);
                    }
                }
            }
        }
        (d, s) => *d = s,
    }
}

/// Resolves `target` (a preset name or a JSON config path) with precedence
/// preset < config file < flags. `base` names a preset under a config file.
pub fn resolve(target: &str, base: Option<&str>, flags: &Overrides) -> Result<Resolved> {
    let unknown = |n: &str| Error::Config(format!("unknown preset '{n}' (see `passim presets`)"));
    let mut r = match preset(target) {
        Some(p) => Resolved { preset: Some(p.name), task: p.task, config: p.config },
        None => {
            let path = Path::new(target);
            if !path.exists() {
                return Err(unknown(target));
            }
            let start = match base {
                Some(b) => preset(b).ok_or_else(|| unknown(b))?,
                None => preset("kite").expect("kite preset"),
            };
            let text = std::fs::read_to_string(path)?;
            let config = overlay(&start.config, &text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Resolved { preset: base.and(Some(start.name)), task: start.task, config }
        }
    };
    flags.apply(&mut r.config);
    r.config.validate()?;
    Ok(r)
}

pub fn parse_convention(s: &str) -> Result<IndicatorConvention> {
    match s {
        "norm" => Ok(IndicatorConvention::Norm),
        "reciprocal" => Ok(IndicatorConvention::Reciprocal),
        _ => Err(Error::Config(format!("indicator must be 'norm' or 'reciprocal', got '{s}'"))),
    }
}

/// Comma-separated, strictly decreasing `eps` values.
pub fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Config(format!("eps '{t}': {e}"))))
        .collect::<Result<_>>()?;
    if v.len() < 3 || v.iter().any(|e| !(*e > 0.0 && *e < 1.0)) || v.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config(format!("eps list {v:?} needs >= 3 strictly decreasing values in (0, 1)")));
    }
    Ok(v)
}
