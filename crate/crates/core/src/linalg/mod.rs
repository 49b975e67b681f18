//! Exact linear algebra over a prime field and truncated graded modules.

mod matrix;
mod module;

pub use matrix::{axpy, mod_inv, mod_pow, Echelon, PrimeFieldMatrix, SparseVec};
pub(crate) use module::h0_functionals;
pub use module::{cyclic_module, h0_graded, quotient_by_linear_form, LinearForm, TruncatedGradedModule};

/// Default characteristic for all homological computations.
pub const DEFAULT_PRIME: u64 = 32003;
/// Second characteristic used to flag characteristic-sensitive results.
pub const CHECK_PRIME: u64 = 1000003;
