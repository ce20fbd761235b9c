//! The quantized algebra U(R)_z: relations, normal forms, PBW counts, the quantum
//! determinant, coproduct, the pairing B and the factored product.

pub mod algebra;
pub mod classical;
pub mod engine;
pub mod factored;
pub mod hopf;
pub mod pairing;
pub mod pbw;
pub mod qdet;
pub mod poler;

pub use algebra::{AlgebraElement, Gen, Term};
pub use engine::{Entry, Relation, RelationSet, RttAlgebra, Strategy};
pub use poler::PoleR;
