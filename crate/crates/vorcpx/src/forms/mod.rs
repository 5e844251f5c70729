//! Integral positive definite quadratic forms on Z^N: minimal vectors,
//! perfection, well-roundedness, and the inflation construction.

mod enumerate;
mod io;

pub use io::{read_forms, write_forms};

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::linalg::{rank1_vec, sym_dim, vector_rank, Mat};

pub(crate) use enumerate::{cholesky, enumerate_bounded};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("zero vector has no rank-one form")]
    ZeroVector,
    #[error("form is not well-rounded")]
    NotWellRounded,
    #[error("forms file: {0}")]
    Parse(String),
}

/// Minimal vectors of a form, one representative per ±pair, each with its
/// first nonzero coordinate positive, sorted lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MinVecSet(Vec<Vec<i64>>);

impl MinVecSet {
    pub(crate) fn from_raw(mut pairs: Vec<Vec<i64>>) -> Self {
        for v in &mut pairs {
            crate::num::normalize_signs(v);
        }
        pairs.sort();
        pairs.dedup();
        MinVecSet(pairs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.0.iter()
    }

    /// True when the vectors span R^N.
    pub fn spans(&self, dim: usize) -> bool {
        !self.0.is_empty() && vector_rank(&self.0) == dim
    }
}

struct MinData {
    min: i64,
    pairs: MinVecSet,
}

/// Integral positive definite symmetric matrix viewed as a quadratic form.
/// Positive definiteness is checked at construction; the minimum and minimal
/// vectors are computed once on demand (single computation, many readers).
pub struct GramForm {
    gram: Mat<i64>,
    min_data: OnceLock<MinData>,
}

impl Clone for GramForm {
    fn clone(&self) -> Self {
        GramForm { gram: self.gram.clone(), min_data: OnceLock::new() }
    }
}

impl PartialEq for GramForm {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}
impl Eq for GramForm {}

impl std::fmt::Debug for GramForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GramForm({:?})", self.gram)
    }
}

impl GramForm {
    pub fn new(gram: Mat<i64>) -> Result<Self, FormError> {
        if !gram.is_symmetric() {
            return Err(FormError::NotSymmetric);
        }
        if cholesky(&gram.to_big()).is_none() {
            return Err(FormError::NotPositiveDefinite);
        }
        Ok(GramForm { gram, min_data: OnceLock::new() })
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, FormError> {
        Self::new(Mat::from_rows(rows))
    }

    /// The A_N root form: 2 on the diagonal, 1 on the adjacent band.
    pub fn a_n(dim: usize) -> Self {
        let gram = Mat::from_fn(dim, dim, |i, j| {
            if i == j {
                2
            } else if i.abs_diff(j) == 1 {
                1
            } else {
                0
            }
        });
        GramForm { gram, min_data: OnceLock::new() }
    }

    pub fn identity(dim: usize) -> Self {
        GramForm { gram: Mat::identity(dim), min_data: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &Mat<i64> {
        &self.gram
    }

    pub fn det(&self) -> BigInt {
        self.gram.to_big().det()
    }

    pub fn evaluate(&self, v: &[i64]) -> i64 {
        self.gram.eval_form(v).to_i64().expect("form value fits i64")
    }

    fn min_data(&self) -> &MinData {
        self.min_data.get_or_init(|| {
            let big = self.gram.to_big();
            let ch = cholesky(&big).expect("positive definite by construction");
            let diag_bound = (0..self.dim()).map(|i| self.gram[(i, i)]).min().unwrap();
            let found = enumerate_bounded(&ch, &BigInt::from(diag_bound));
            let min = found
                .iter()
                .map(|(_, val)| val.to_i64().expect("minimum fits i64"))
                .min()
                .expect("a diagonal vector is always found");
            let pairs = found
                .into_iter()
                .filter_map(|(v, val)| (val == BigInt::from(min)).then_some(v))
                .collect();
            MinData { min, pairs: MinVecSet::from_raw(pairs) }
        })
    }

    /// The arithmetical minimum m(h).
    pub fn min(&self) -> i64 {
        self.min_data().min
    }

    /// Minimal vectors, one per ±pair.
    pub fn minimal_vectors(&self) -> (i64, &MinVecSet) {
        let d = self.min_data();
        (d.min, &d.pairs)
    }

    /// All ±pair representatives v with h(v) <= bound.
    pub fn vectors_up_to(&self, bound: i64) -> Vec<(Vec<i64>, i64)> {
        let ch = cholesky(&self.gram.to_big()).expect("positive definite");
        enumerate_bounded(&ch, &BigInt::from(bound))
            .into_iter()
            .map(|(mut v, val)| {
                crate::num::normalize_signs(&mut v);
                (v, val.to_i64().expect("value fits i64"))
            })
            .collect()
    }

    /// Perfect: the rank-one forms of the minimal vectors span the whole
    /// space of symmetric matrices.
    pub fn is_perfect(&self) -> bool {
        let (_, pairs) = self.minimal_vectors();
        let vecs: Vec<Vec<i64>> = pairs.iter().map(|v| rank1_vec(v)).collect();
        vector_rank(&vecs) == sym_dim(self.dim())
    }

    /// Well-rounded: the minimal vectors span R^N.
    pub fn is_well_rounded(&self) -> bool {
        let (_, pairs) = self.minimal_vectors();
        pairs.spans(self.dim())
    }

    /// Divides the Gram matrix by its content.
    pub fn primitive(&self) -> GramForm {
        let entries: Vec<i64> = self.gram.rows().flat_map(|r| r.iter().copied()).collect();
        let g = crate::num::content(&entries);
        if g <= 1 {
            return self.clone();
        }
        GramForm {
            gram: self.gram.map(|x| x / g),
            min_data: OnceLock::new(),
        }
    }

    /// Block sum with the minimum: diag(A, m(A)). The minimal vectors of the
    /// result are those of A padded by a zero, plus the new unit vector.
    pub fn inflate(&self) -> Result<GramForm, FormError> {
        if !self.is_well_rounded() {
            return Err(FormError::NotWellRounded);
        }
        let n = self.dim();
        let m = self.min();
        let gram = Mat::from_fn(n + 1, n + 1, |i, j| {
            if i < n && j < n {
                self.gram[(i, j)]
            } else if i == n && j == n {
                m
            } else {
                0
            }
        });
        Ok(GramForm { gram, min_data: OnceLock::new() })
    }
}

/// The rank-one form v v^t.
pub fn vhat(v: &[i64]) -> Result<Mat<i64>, FormError> {
    if v.iter().all(|&x| x == 0) {
        return Err(FormError::ZeroVector);
    }
    Ok(Mat::from_fn(v.len(), v.len(), |i, j| v[i] * v[j]))
}

/// Configuration form of a set of ±pairs: the sum of their rank-one forms.
pub fn config_form(pairs: &[Vec<i64>]) -> Mat<i64> {
    let n = pairs.first().map_or(0, Vec::len);
    Mat::from_fn(n, n, |i, j| pairs.iter().map(|v| v[i] * v[j]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn d_n(dim: usize) -> GramForm {
        // root basis e_i - e_{i+1} plus e_{dim-2} + e_{dim-1}
        assert!(dim >= 4);
        let mut basis: Vec<Vec<i64>> = Vec::new();
        for i in 0..dim - 1 {
            let mut v = vec![0i64; dim];
            v[i] = 1;
            v[i + 1] = -1;
            basis.push(v);
        }
        let mut v = vec![0i64; dim];
        v[dim - 2] = 1;
        v[dim - 1] = 1;
        basis.push(v);
        let gram = Mat::from_fn(dim, dim, |i, j| {
            basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum()
        });
        GramForm::new(gram).unwrap()
    }

    #[test]
    fn identity_minimal_vectors() {
        let f = GramForm::identity(2);
        let (min, pairs) = f.minimal_vectors();
        assert_eq!(min, 1);
        assert_eq!(pairs.vectors(), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn hexagonal_form_is_perfect() {
        let f = GramForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let (min, pairs) = f.minimal_vectors();
        assert_eq!(min, 2);
        assert_eq!(pairs.len(), 3);
        assert!(f.is_perfect());
        let square = GramForm::from_rows(vec![vec![2, 0], vec![0, 2]]).unwrap();
        assert!(!square.is_perfect());
    }

    #[test]
    fn d5_is_perfect_with_twenty_pairs() {
        let f = d_n(5);
        let (min, pairs) = f.minimal_vectors();
        assert_eq!(min, 2);
        assert_eq!(pairs.len(), 20);
        assert!(f.is_perfect());
        assert!(f.is_well_rounded());
    }

    #[test]
    fn well_rounded_checks() {
        assert!(GramForm::identity(4).is_well_rounded());
        let f = GramForm::from_rows(vec![vec![2, 0], vec![0, 4]]).unwrap();
        let (_, pairs) = f.minimal_vectors();
        assert_eq!(pairs.vectors(), &[vec![1, 0]]);
        assert!(!f.is_well_rounded());
    }

    #[test]
    fn vhat_values() {
        assert_eq!(
            vhat(&[1, 0]).unwrap(),
            Mat::from_rows(vec![vec![1, 0], vec![0, 0]])
        );
        assert_eq!(
            vhat(&[1, -1]).unwrap(),
            Mat::from_rows(vec![vec![1, -1], vec![-1, 1]])
        );
        assert_eq!(vhat(&[2, 3]).unwrap(), vhat(&[-2, -3]).unwrap());
        assert!(vhat(&[0, 0]).is_err());
    }

    #[test]
    fn inflate_hexagonal() {
        let f = GramForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let inflated = f.inflate().unwrap();
        assert_eq!(
            inflated.gram(),
            &Mat::from_rows(vec![vec![2, 1, 0], vec![1, 2, 0], vec![0, 0, 2]])
        );
        let (min, pairs) = inflated.minimal_vectors();
        assert_eq!(min, 2);
        assert_eq!(pairs.len(), 4);
        assert!(inflated.is_well_rounded());

        let id3 = GramForm::identity(2).inflate().unwrap();
        assert_eq!(id3.gram(), GramForm::identity(3).gram());
    }

    #[test]
    fn inflate_adds_one_pair() {
        for f in [GramForm::a_n(3), d_n(4), GramForm::identity(3)] {
            let before = f.minimal_vectors().1.len();
            let after = f.inflate().unwrap().minimal_vectors().1.len();
            assert_eq!(after, before + 1);
        }
    }

    #[test]
    fn perfection_implies_well_rounded() {
        for f in [GramForm::a_n(2), GramForm::a_n(3), GramForm::a_n(4), d_n(4), d_n(5)] {
            if f.is_perfect() {
                assert!(f.is_well_rounded());
            }
        }
    }

    #[test]
    fn not_positive_definite_rejected() {
        assert_eq!(
            GramForm::from_rows(vec![vec![1, 2], vec![2, 1]]).unwrap_err(),
            FormError::NotPositiveDefinite
        );
        assert_eq!(
            GramForm::from_rows(vec![vec![1, 2], vec![0, 1]]).unwrap_err(),
            FormError::NotSymmetric
        );
    }
}
