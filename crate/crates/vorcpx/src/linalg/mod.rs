//! Exact integer and rational linear algebra.
//!
//! Sparse coordinate matrices, modular rank with an exact fallback, Smith
//! normal form, saturated kernel bases, and determinant signs of restricted
//! maps. Everything is generic over the scalar via [`crate::num::Int`]; the
//! crate root pins `BigInt`-backed aliases for the public types.

mod dense;
mod rank;
mod restrict;
mod snf;
mod sparse;

pub use dense::{rank1_vec, sym_dim, sym_to_vec, vec_to_sym, Mat};
pub use rank::{rank, rank_exact, rank_mod};
pub use restrict::{restriction_det_sign, span_data, vector_rank, SpanData};
pub use snf::{elementary_divisors, kernel_basis, ElementaryDivisorList};
pub use sparse::{read_matrix_market, write_matrix_market, SparseMat};

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    /// Images of a restriction are linearly dependent.
    #[error("restricted map is singular")]
    SingularRestriction,
    /// Images are not contained in the span of the domain basis.
    #[error("images are not in the span of the domain basis")]
    NotInSpan,
    #[error("format error: {0}")]
    Format(String),
}
