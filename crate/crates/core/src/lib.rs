//! Computational core: monomial ideals, truncated graded modules over `GF(p)`,
//! homological invariants, Hilbert–Samuel coefficients and their bounds.

pub mod bounds;
pub mod error;
pub mod hilbert;
pub mod invariants;
pub mod linalg;
pub mod monomial;
pub mod verifier;

pub use error::{Error, Result};
