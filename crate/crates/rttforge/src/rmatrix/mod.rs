//! Classical and quantum R-matrices for the four families, and their checks.

pub mod checks;
pub mod classical;
pub mod quantum;
pub mod spec;
pub mod theta;

pub use classical::{ClassicalR, Label};
pub use quantum::QuantumR;
pub use spec::{Algebra, Family, RMatrixSpec};
pub use theta::EllipticKernel;
