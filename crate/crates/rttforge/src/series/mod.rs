//! Exact and floating truncated series.

pub mod cyclo;
pub mod hseries;
pub mod scalar;

pub use cyclo::Cyclo;
pub use hseries::{exp_series, pow_scalar, Dim, HSeries, Shape, INF};
pub use scalar::{Mode, Scalar};
