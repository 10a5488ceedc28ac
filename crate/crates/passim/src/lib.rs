//! Passive near-field imaging of a sound-soft obstacle from cross-correlated
//! measurements of randomly placed small sound-soft disks.

pub mod error;
pub mod point;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use point::Point2;
pub use scalar::{Cx, Scalar};

pub type Point = Point2<f64>;
pub type Complex = Cx<f64>;
pub mod forward;
pub mod geometry;
pub mod linalg;
pub mod asymptotic;
pub mod correlation;
pub mod lsm;
