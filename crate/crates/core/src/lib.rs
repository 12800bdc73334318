//! Exact Grothendieck weights on permutohedral and matroidal fans.

pub mod algebra;
pub mod braid;
pub mod classes;
pub mod error;
pub mod fan;
pub mod matroid;
pub mod polytope;
pub mod weights;

pub use algebra::{IntegerMatrix, LatticeVector, Polynomial};
pub use braid::{Flag, SubsetE};
pub use error::{Error, Result};
pub use fan::Fan;
pub use matroid::Matroid;
pub use polytope::GenPermutohedron;
pub use weights::{Domain, Weight};
