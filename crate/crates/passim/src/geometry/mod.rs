//! Obstacle shapes, boundary meshes, sensor and scatterer placement, and the
//! scene configuration.

mod curve;
mod mesh;
mod scene;

pub use curve::{make_curve, BoundaryCurve, CurvePoint, Shape, KITE_A, KITE_B};
pub use mesh::{discretize, BoundaryMesh};
pub use scene::{
    rng_stream, scatterer_positions, sensor_ring, ObstacleSpec, Placement, Purpose, SamplingGrid, SceneConfig,
    ScattererLayout,
};
