//! Mahler measures of sparse polynomials in one and several variables, the
//! lattice machinery behind archimedean orderings of `Z^M`, and checks of the
//! binomial lower bounds `|c_n| <= binom(N, n) M(P)`.

pub mod bounds;
pub mod config;
pub mod error;
pub mod lattice;
pub mod mahler;
pub mod numeric;
pub mod sparse_poly;
pub mod torus;

pub use config::Config;
pub use error::{Error, Result};
pub use mahler::{mahler, MeasureResult, Method};
pub use sparse_poly::{ComplexCoeff, SparseUniPoly};
pub use lattice::{DirectionVector, LatticePoint};
pub use torus::TorusPoly;
