//! Truncated formal series, R-matrices, RTT algebras and their checks.

pub mod error;
pub mod liebialg;
pub mod linalg;
pub mod report;
pub mod reps;
pub mod rmatrix;
pub mod rtt;
pub mod series;
pub mod tensor;

pub use error::{Error, Result};
