//! Exact algebra toolkit for verifying regularity conditions of Fano double covers.
//!
//! The crate is organised bottom-up: scalar rings and sparse polynomials,
//! graded linear algebra over `F_p`, truncated square roots, the per-point
//! regularity checks, and the exact census of closed-form bounds.

pub mod census;
pub mod error;
pub mod field;
pub mod linalg;
pub mod macaulay;
pub mod monomial;
pub mod poly;
pub mod quadratic;
pub mod regularity;
pub mod sqrt_branch;
pub mod subst;
pub mod text;

pub use error::{Error, Result};
pub use field::{PrimeField, Rationals, Ring, DEFAULT_PRIME};
pub use monomial::Monomial;
pub use poly::{FpPoly, QPoly, SparsePoly, VarList};
pub use quadratic::{quadratic_rank, QuadraticForm};
pub use subst::{restrict, LinearSubstitution};
pub use text::parse_poly;
