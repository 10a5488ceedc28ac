//! Scenario runner for `passim`: presets, artifact layout and the rate and
//! identity studies.

pub mod config;
pub mod manifest;
pub mod pipeline;
pub mod presets;
pub mod studies;

pub use manifest::Manifest;
pub use pipeline::{reconstruct, run_scenario, Reconstruction, RunArtifacts, Summary};
pub use presets::{preset, Preset, Task};
pub use studies::{run_identities, run_rates};
