//! Combinatorial multivector fields from sampled vector fields.
//!
//! The pipeline: reduce samples ([`geometry::kmeans`]), triangulate
//! ([`geometry::delaunay`]), price every admissible simplex pairing
//! ([`cost`]), solve a binary program ([`milp`]), turn the 0/1 solution into
//! a partition into convex sets ([`mvf`]), and analyze the induced dynamics
//! ([`dynamics`], [`homology`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the common double-precision choice.

pub mod complex;
pub mod cost;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod homology;
pub mod milp;
pub mod mvf;
mod scalar;

pub use complex::{build_complex, Simplex, SimplexId, SimplexSet, SimplicialComplex};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type VectorSample = geometry::VectorSample<f64>;
pub type VectorSample32 = geometry::VectorSample<f32>;
pub type VectorAssignment = geometry::VectorAssignment<f64>;
pub type VectorAssignment32 = geometry::VectorAssignment<f32>;
pub type CostVector = cost::CostVector<f64>;
pub type CostVector32 = cost::CostVector<f32>;
pub type IlpInstance = milp::IlpInstance<f64>;
pub type IlpInstance32 = milp::IlpInstance<f32>;
pub type Solution = milp::Solution<f64>;
pub type Solution32 = milp::Solution<f32>;
