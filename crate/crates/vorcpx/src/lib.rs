//! Voronoi cell complexes of the modular groups GL_N(Z) and SL_N(Z).
//!
//! The pipeline classifies perfect quadratic forms by the contiguity walk,
//! builds the cell complex of well-rounded cells modulo the group action
//! (representatives, stabilizers, orientations), assembles the chain
//! differentials, and computes homology with exact Smith normal form. A small
//! validation layer checks the classical mass formula, the top homology
//! class, and the inflation splitting between consecutive ranks.
//!
//! Exact arithmetic throughout: the kernels are generic over an integer
//! scalar (see [`num::Int`]); public linear-algebra types are pinned to
//! `BigInt` below.

pub mod linalg;
pub mod num;

pub mod forms;
pub mod isometry;
pub mod voronoi;
pub mod complex;

use num_bigint::BigInt;

/// Exact sparse integer matrix (the chain differentials).
pub type SparseIntMatrix = linalg::SparseMat<BigInt>;

/// Exact rational scalar used for mass formulas and walk parameters.
pub type Rational = num_rational::BigRational;

/// The acting group.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Group {
    Gl,
    Sl,
}

impl Group {
    pub fn parse(s: &str) -> Option<Group> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Some(Group::Gl),
            "SL" => Some(Group::Sl),
            _ => None,
        }
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Group::Gl => write!(f, "GL"),
            Group::Sl => write!(f, "SL"),
        }
    }
}

/// Dimension of the projectivized cone of forms in N variables.
pub fn top_dim(n: usize) -> usize {
    n * (n + 1) / 2 - 1
}

/// Virtual cohomological dimension N(N-1)/2.
pub fn vcd(n: usize) -> usize {
    n * (n - 1) / 2
}
