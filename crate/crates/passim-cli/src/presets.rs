use passim::geometry::{ObstacleSpec, Placement, SceneConfig, Shape};
use passim::Point;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// What a preset runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Acquisition, correlation, inversion and metrics.
    Reconstruction,
    /// Rate fits over a list of `eps`.
    Rates,
    /// Helmholtz-Kirchhoff identity residuals.
    Identities,
}

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub figure: &'static str,
    pub task: Task,
    pub config: SceneConfig,
}

pub const NAMES: [&str; 11] = [
    "elli",
    "kite",
    "kite_two",
    "kite_rand",
    "kite_limi_2pi3",
    "kite_limi_pi",
    "kite_limi_4pi3",
    "kite_several_R5",
    "kite_several_R30",
    "rates",
    "identities",
];

pub fn ellipse() -> ObstacleSpec {
    ObstacleSpec { shape: Shape::Ellipse { a: 1.5, b: 1.0 }, center: Point::new(-2.0, -2.0), size: Some(0.5), rotation: 0.0 }
}

pub fn kite_at(center: Point) -> ObstacleSpec {
    ObstacleSpec { shape: Shape::Kite, center, size: Some(0.5), rotation: 0.0 }
}

pub fn kite() -> ObstacleSpec {
    kite_at(Point::new(2.0, 2.0))
}

fn with(obstacles: Vec<ObstacleSpec>) -> SceneConfig {
    SceneConfig { obstacles, ..SceneConfig::default() }
}

pub fn preset(name: &str) -> Option<Preset> {
    let name: &'static str = NAMES.iter().copied().find(|n| *n == name)?;
    let recon = |figure, config| Some(Preset { name, figure, task: Task::Reconstruction, config });
    let limited = |figure, aperture| recon(figure, SceneConfig { aperture, ..with(vec![kite()]) });
    let several = |r, noise| SceneConfig {
        scatterers: r,
        acquisitions: 400,
        noise_delta: noise,
        placement: Placement::UniformRandom,
        ..with(vec![kite()])
    };
    match name {
        "elli" => recon("Fig. 3", with(vec![ellipse()])),
        "kite" => recon("Fig. 4", with(vec![kite()])),
        "kite_two" => recon("Fig. 5", with(vec![kite_at(Point::new(-2.0, -2.0)), kite()])),
        "kite_rand" => recon(
            "Fig. 7",
            SceneConfig { acquisitions: 400, placement: Placement::UniformRandom, ..with(vec![kite()]) },
        ),
        "kite_limi_2pi3" => limited("Fig. 6, top", 2.0 * PI / 3.0),
        "kite_limi_pi" => limited("Fig. 6, middle", PI),
        "kite_limi_4pi3" => limited("Fig. 6, bottom", 4.0 * PI / 3.0),
        "kite_several_R5" => recon("Fig. 8, top", several(5, 1e-2)),
        "kite_several_R30" => recon("Fig. 8, bottom", several(30, 5e-2)),
        "rates" => Some(Preset { name: "rates", figure: "Table 1", task: Task::Rates, config: with(vec![kite()]) }),
        "identities" => Some(Preset {
            name: "identities",
            figure: "HK identities",
            task: Task::Identities,
            config: SceneConfig { sensors: 24, noise_delta: 0.0, ..with(vec![kite()]) },
        }),
        _ => None,
    }
}

pub fn all() -> Vec<Preset> {
    NAMES.iter().map(|n| preset(n).expect("listed preset")).collect()
}

/// Full aperture in radians, for display.
pub fn aperture_label(a: f64) -> String {
    let frac = a / PI;
    if (a - TAU).abs() < 1e-12 {
        "2pi".into()
    } else {
        format!("{frac:.4} pi")
    }
}
