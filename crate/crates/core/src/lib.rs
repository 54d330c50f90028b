//! Exact computations with twisted Poisson structures on Lie algebras and on
//! polynomial tangent bundles of ℝⁿ: modular classes, BV generators and the
//! identities relating them.

pub mod cohomology;
pub mod error;
pub mod exterior;
pub mod graded_ops;
pub mod json;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod twisted;

pub use error::{Error, Result};
pub use exterior::{Form, IndexSet, MixedTensor, Multivector};
pub use scalar::Q;
