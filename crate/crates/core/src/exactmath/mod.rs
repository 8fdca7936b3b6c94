//! Exact scalars, vectors, matrices, and the determinant / Hermite-form /
//! gcd machinery every other module consumes.
//!
//! All algorithms here are generic over the scalar type through
//! `num-traits` bounds: [`Scalar`] for ring-level work (fraction-free
//! determinants, ranks, minor enumeration), [`IntScalar`] for operations
//! that need integer gcds, and [`FieldScalar`] for elimination with true
//! division. The crate root pins the production instantiations to
//! `BigInt` / `Ratio<BigInt>`; unit tests frequently use `i64`.

mod hnf;
mod index_set;
mod matrix;
mod minors;
pub mod vecops;

pub use hnf::{hermite_unimodular, unimodular_inverse};
pub use index_set::IndexSet;
pub use matrix::{FieldScalar, IntScalar, Matrix, Scalar};
pub use minors::{gcd_minors, is_totally_unimodular, max_abs_minor};
