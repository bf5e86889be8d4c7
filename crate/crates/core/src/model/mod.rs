//! Parameters, grids, fields and the two scaling actions.

mod field;
mod grid;
mod params;
pub mod tridiag;

pub use field::{scale_field, translate_field, Dilated, Field};
pub use grid::{sphere_measure, Geometry, Grid};
pub use params::{ModelParams, ScalingPair};

/// Discrete Laplacian of `f` (the potential-free part of the operator).
pub fn apply_laplacian(f: &Field) -> Field {
    f.laplacian()
}
