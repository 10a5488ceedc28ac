//! Forward scattering: the exterior Dirichlet problem for `D` by a combined
//! layer Nyström method with Kress log-quadrature, the small disk by its
//! Fourier-Hankel series, and the coupled disk + obstacle system.

mod block;
mod dirichlet;
mod disk;
mod layer;

pub use block::{two_obstacle_field, BlockSolution, BlockSystem};
pub use dirichlet::{eval_field, scattered_field_us, solve_dirichlet, DirichletSolver, SurfaceDensity, MAX_CONDITION};
pub use disk::{disk_series_field, disk_slp_inverse_coeffs, DiskField, DiskScatterer, Fourier};
pub use layer::{assemble_layer, log_weights, KernelKind, LayerMatrix, Target};
