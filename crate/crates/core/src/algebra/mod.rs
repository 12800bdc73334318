//! Exact arithmetic: polynomials, lattice vectors and integer linear algebra.

pub mod lattice;
pub mod poly;

pub use lattice::{
    lattice_index, rational_rank, rational_solve_membership, smith_normal_form, IntegerMatrix,
    LatticeVector, SmithForm,
};
pub use poly::{Polynomial, PolynomialJson};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// A JSON number when the integer fits in `i64`, a decimal string otherwise.
pub fn int_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.to_string()),
    }
}

pub fn ints_json(xs: &[BigInt]) -> serde_json::Value {
    serde_json::Value::Array(xs.iter().map(int_json).collect())
}
