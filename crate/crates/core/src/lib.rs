//! Exact-arithmetic toolkit for studying how far linear-programming vertex
//! optima sit from the nearest optimal integer solutions of the same program.
//!
//! Everything is computed over arbitrary-precision rationals: vertex and
//! lattice-point enumeration of H-polyhedra, determinant parameters of the
//! constraint matrix, origin normalization, slice widths, spindle walks,
//! primitive-ray decompositions, and generators for families of instances
//! whose proximity is known exactly. There is no floating point anywhere.
//!
//! The linear algebra in [`exactmath`] is generic over the scalar type via
//! `num-traits` bounds; the concrete aliases below fix the production types.

pub mod error;
pub mod exactmath;
pub mod generators;
pub mod io;
pub mod lifting;
pub mod polyhedron;
pub mod proximity;
pub mod spindle;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Arbitrary-precision integer scalar.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational scalar, always stored reduced with a
/// positive denominator (`num-rational` maintains both invariants).
pub type Rat = num_rational::Ratio<Int>;
/// Dense matrix over [`Int`].
pub type IMatrix = exactmath::Matrix<Int>;
/// Dense matrix over [`Rat`].
pub type QMatrix = exactmath::Matrix<Rat>;
/// Integer vector.
pub type IVec = Vec<Int>;
/// Rational vector.
pub type QVec = Vec<Rat>;

pub use exactmath::{IndexSet, Matrix};
