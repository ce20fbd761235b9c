//! Operators on tensor powers of k^N and the constant elements built on them.

pub mod adjoint;
pub mod op;
pub mod special;

pub use adjoint::{adjoint_exp, exp_op};
pub use op::{digits, flat, kron, unit, Coeff, TensorOp};
pub use special::{fixed_points, fixed_points2, form, pair2, sigma, Conj, SpecialElements};
