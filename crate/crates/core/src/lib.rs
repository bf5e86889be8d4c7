//! Numerical laboratory for the focusing intercritical NLS with a repulsive
//! inverse-power potential `gamma |x|^-mu`.

pub mod error;
pub mod functionals;
pub mod model;

pub use error::{Error, Result};
pub mod groundstate;
pub mod thresholds;
pub mod classifier;
pub mod evolution;
pub mod families;
pub mod verify;
