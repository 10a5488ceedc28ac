use super::curve::{make_curve, BoundaryCurve, Shape};
use crate::error::{Error, Result};
use crate::point::Point2;
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::{PI, TAU};

/// How the small scatterer is positioned over the acquisitions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    /// `theta_l = (2 pi / L)(l + beta_l)`, `beta_l ~ U(0, beta_max)`.
    PerturbedTrapezoid { beta_max: f64 },
    /// Independent uniform angles on `(0, 2 pi)`.
    UniformRandom,
}

/// One obstacle of the scene, before discretisation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub shape: Shape,
    pub center: Point2<f64>,
    /// Target diameter; `None` keeps the raw shape parameters.
    pub size: Option<f64>,
    pub rotation: f64,
}

impl ObstacleSpec {
    pub fn curve<T: Scalar>(&self) -> Result<BoundaryCurve<T>> {
        make_curve(self.shape, self.center.cast(), T::lit(self.rotation), self.size.map(T::lit))
    }
}

/// Rectangular sampling grid for the indicator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingGrid {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    /// Indicator values outside this radius (about the origin) are zeroed.
    pub mask_radius: Option<f64>,
}

impl SamplingGrid {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Config(format!("grid {}x{} needs at least 2x2 nodes", self.nx, self.ny)));
        }
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[1] > r[0];
        if !ok(self.x_range) || !ok(self.y_range) {
            return Err(Error::Config("degenerate grid range".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `(ix, iy)`; row-major with `iy` the slow index.
    pub fn node(&self, ix: usize, iy: usize) -> Point2<f64> {
        let fx = ix as f64 / (self.nx - 1) as f64;
        let fy = iy as f64 / (self.ny - 1) as f64;
        Point2::new(
            self.x_range[0] + fx * (self.x_range[1] - self.x_range[0]),
            self.y_range[0] + fy * (self.y_range[1] - self.y_range[0]),
        )
    }

    pub fn nodes(&self) -> Vec<Point2<f64>> {
        (0..self.ny).flat_map(|iy| (0..self.nx).map(move |ix| (ix, iy))).map(|(ix, iy)| self.node(ix, iy)).collect()
    }

    pub fn area(&self) -> f64 {
        (self.x_range[1] - self.x_range[0]) * (self.y_range[1] - self.y_range[0])
    }

    pub fn masked(&self, p: Point2<f64>) -> bool {
        self.mask_radius.is_some_and(|r| p.norm() > r)
    }
}

impl Default for SamplingGrid {
    fn default() -> Self {
        SamplingGrid { x_range: [-6.0, 6.0], y_range: [-6.0, 6.0], nx: 100, ny: 100, mask_radius: Some(5.0) }
    }
}

/// Every physical and numerical parameter of an experiment. Lengths are in
/// the same unit as the wavelength `2 pi / k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub k: f64,
    pub eps: f64,
    pub p: f64,
    pub q: f64,
    pub theta_z: f64,
    #[serde(rename = "J")]
    pub sensors: usize,
    pub sensor_radius: f64,
    pub aperture: f64,
    #[serde(rename = "L")]
    pub acquisitions: usize,
    #[serde(rename = "R")]
    pub scatterers: usize,
    pub placement: Placement,
    pub noise_delta: f64,
    pub seed: u64,
    pub obstacles: Vec<ObstacleSpec>,
    /// Nodes per obstacle boundary.
    pub boundary_nodes: usize,
    pub grid: SamplingGrid,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            k: TAU,
            eps: 1e-2,
            p: 1.0,
            q: 2.0,
            theta_z: PI,
            sensors: 120,
            sensor_radius: 5.0,
            aperture: TAU,
            acquisitions: 150,
            scatterers: 1,
            placement: Placement::PerturbedTrapezoid { beta_max: 0.1 },
            noise_delta: 5e-3,
            seed: 0,
            obstacles: Vec::new(),
            boundary_nodes: 100,
            grid: SamplingGrid::default(),
        }
    }
}

impl SceneConfig {
    pub fn lambda(&self) -> f64 {
        TAU / self.k
    }

    /// Radius `lambda eps^-p` of the scatterer ring.
    pub fn scatterer_ring_radius(&self) -> f64 {
        self.lambda() * self.eps.powf(-self.p)
    }

    /// Radius `lambda eps` of the small disk.
    pub fn disk_radius(&self) -> f64 {
        self.lambda() * self.eps
    }

    /// `z = lambda eps^-q e^{i theta_z}`.
    pub fn source<T: Scalar>(&self) -> Point2<T> {
        Point2::polar(T::lit(self.lambda() * self.eps.powf(-self.q)), T::lit(self.theta_z))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.k.is_finite() && self.k > 0.0) {
            return bad(format!("k = {} must be positive", self.k));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} must lie in (0, 1)", self.eps));
        }
        if !(self.p > 0.0 && self.p < self.q && self.q.is_finite()) {
            return bad(format!("need 0 < p < q, got p = {}, q = {}", self.p, self.q));
        }
        if self.sensors == 0 || self.acquisitions == 0 || self.scatterers == 0 {
            return bad("J, L and R must be at least 1".into());
        }
        if !(self.noise_delta >= 0.0 && self.noise_delta.is_finite()) {
            return bad(format!("noise_delta = {} must be >= 0", self.noise_delta));
        }
        if !(self.aperture > 0.0 && self.aperture <= TAU + 1e-12) {
            return bad(format!("aperture = {} must lie in (0, 2 pi]", self.aperture));
        }
        if !(self.sensor_radius > 0.0 && self.sensor_radius.is_finite()) {
            return bad("sensor_radius must be positive".into());
        }
        if let Placement::PerturbedTrapezoid { beta_max } = self.placement {
            if !(0.0..1.0).contains(&beta_max) {
                return bad(format!("beta_max = {beta_max} must lie in [0, 1)"));
            }
            if self.scatterers > 1 {
                return bad("perturbed_trapezoid placement supports R = 1 only".into());
            }
        }
        self.grid.validate()?;
        for o in &self.obstacles {
            o.curve::<f64>().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: SceneConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialises")
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("scene serialises");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn curves<T: Scalar>(&self) -> Result<Vec<BoundaryCurve<T>>> {
        self.obstacles.iter().map(|o| o.curve()).collect()
    }
}

/// Consumers of random numbers; each gets an independent ChaCha8 key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Placement = 1,
    Noise = 2,
}

/// Stream-splitting rule: key = (seed, purpose), stream = acquisition index.
/// ChaCha8 is platform independent, so draws are bit-reproducible.
pub fn rng_stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Sensors `x_j = r e^{i a j / J}`, `j = 0..J`, with `a` the aperture.
pub fn sensor_ring<T: Scalar>(cfg: &SceneConfig) -> Vec<Point2<T>> {
    let j = cfg.sensors;
    (0..j)
        .map(|i| Point2::polar(T::lit(cfg.sensor_radius), T::lit(cfg.aperture * i as f64 / j as f64)))
        .collect()
}

/// Small-scatterer centers for each acquisition.
#[derive(Clone, Debug)]
pub struct ScattererLayout<T> {
    /// `angles[l][r]`.
    pub angles: Vec<Vec<f64>>,
    /// `positions[l][r]`, on the circle of radius `lambda eps^-p`.
    pub positions: Vec<Vec<Point2<T>>>,
}

pub fn scatterer_positions<T: Scalar>(cfg: &SceneConfig) -> Result<ScattererLayout<T>> {
    let (l_count, r_count) = (cfg.acquisitions, cfg.scatterers);
    let angles: Vec<Vec<f64>> = match cfg.placement {
        Placement::PerturbedTrapezoid { beta_max } => {
            if r_count != 1 {
                return Err(Error::Config("perturbed_trapezoid placement supports R = 1 only".into()));
            }
            (0..l_count)
                .map(|l| {
                    let beta = if beta_max == 0.0 {
                        0.0
                    } else {
                        beta_max * rng_stream(cfg.seed, Purpose::Placement, l as u64).gen::<f64>()
                    };
                    vec![TAU / l_count as f64 * (l as f64 + beta)]
                })
                .collect()
        }
        Placement::UniformRandom => (0..l_count)
            .map(|l| {
                let mut rng = rng_stream(cfg.seed, Purpose::Placement, l as u64);
                (0..r_count).map(|_| TAU * rng.gen::<f64>()).collect()
            })
            .collect(),
    };
    let rad = T::lit(cfg.scatterer_ring_radius());
    let positions = angles.iter().map(|row| row.iter().map(|&a| Point2::polar(rad, T::lit(a))).collect()).collect();
    Ok(ScattererLayout { angles, positions })
}
