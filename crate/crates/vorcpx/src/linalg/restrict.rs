//! Restriction of linear maps to spans, and the determinant signs that drive
//! the orientation bookkeeping of the cell complex.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::num::Int;

use super::dense::{sym_to_vec, Mat};
use super::LinalgError;

/// Span of a list of vectors, prepared for sign computations.
///
/// `basis` indexes the lexicographically first independent subset of the
/// input list (in input order); `rows` are coordinate positions on which that
/// basis is invertible; `det` is the determinant of the resulting square
/// matrix. Expressing other vectors of the span in this basis then only needs
/// one more determinant on the same coordinate rows.
#[derive(Clone, Debug)]
pub struct SpanData {
    pub basis: Vec<usize>,
    pub rows: Vec<usize>,
    pub det: BigInt,
    pub ambient: usize,
}

impl SpanData {
    /// Rank of the span.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Sign of the determinant of the matrix expressing `vectors` in the span
    /// basis. `vectors` must have length `rank` and lie in the span; a zero
    /// determinant reports `SingularRestriction`.
    pub fn det_sign(&self, vectors: &[Vec<BigInt>]) -> Result<i8, LinalgError> {
        if vectors.len() != self.rank() {
            return Err(LinalgError::SingularRestriction);
        }
        let k = self.rank();
        let sq = Mat::from_fn(k, k, |i, j| vectors[j][self.rows[i]].clone());
        let d = sq.det();
        if d.is_zero() {
            return Err(LinalgError::SingularRestriction);
        }
        Ok(if d.is_positive() == self.det.is_positive() { 1 } else { -1 })
    }
}

/// Greedy span extraction: scans `vectors` in order, keeping each one that
/// increases the rank.
pub fn span_data<T: Int>(vectors: &[Vec<T>]) -> SpanData {
    let ambient = vectors.first().map_or(0, Vec::len);
    let mut basis = Vec::new();
    let mut pivot_rows = Vec::new();
    // fraction-free echelon rows with their pivot coordinate
    let mut echelon: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w: Vec<BigInt> = v.iter().map(|x| big_of(x)).collect();
        for (pc, row) in &echelon {
            if !w[*pc].is_zero() {
                let (a, b) = (row[*pc].clone(), w[*pc].clone());
                for (wi, ri) in w.iter_mut().zip(row.iter()) {
                    *wi = &*wi * &a - ri * &b;
                }
            }
        }
        if let Some(pc) = w.iter().position(|x| !x.is_zero()) {
            crate::num::normalize_primitive(&mut w);
            basis.push(idx);
            pivot_rows.push(pc);
            echelon.push((pc, w));
            echelon.sort_by_key(|(pc, _)| *pc);
        }
    }
    let k = basis.len();
    let det = if k == 0 {
        BigInt::from(1)
    } else {
        Mat::from_fn(k, k, |i, j| big_of(&vectors[basis[j]][pivot_rows[i]])).det()
    };
    debug_assert!(k == 0 || !det.is_zero());
    SpanData { basis, rows: pivot_rows, det, ambient }
}

fn big_of<T: Int>(x: &T) -> BigInt {
    x.to_i64().map(BigInt::from).unwrap_or_else(|| x.to_string().parse().expect("integer text"))
}

/// Rank of a list of vectors over the rationals.
pub fn vector_rank<T: Int>(vectors: &[Vec<T>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Mat::from_rows(vectors.to_vec()).rank()
}

/// Sign of the determinant of the change of basis expressing `images` in
/// `domain_basis` (lists of symmetric integer matrices).
///
/// Errors with `NotInSpan` when some image leaves the rational span of the
/// domain, and `SingularRestriction` when the images are dependent.
pub fn restriction_det_sign(
    domain_basis: &[Mat<BigInt>],
    images: &[Mat<BigInt>],
) -> Result<i8, LinalgError> {
    if domain_basis.len() != images.len() {
        return Err(LinalgError::SingularRestriction);
    }
    let dom_vecs: Vec<Vec<BigInt>> = domain_basis.iter().map(sym_to_vec).collect();
    let img_vecs: Vec<Vec<BigInt>> = images.iter().map(sym_to_vec).collect();
    let span = span_data(&dom_vecs);
    if span.rank() != domain_basis.len() {
        return Err(LinalgError::SingularRestriction);
    }
    // containment: stacking must not raise the rank
    let mut stacked = dom_vecs.clone();
    stacked.extend(img_vecs.iter().cloned());
    if vector_rank(&stacked) != span.rank() {
        return Err(LinalgError::NotInSpan);
    }
    span.det_sign(&img_vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: Vec<Vec<i64>>) -> Mat<BigInt> {
        Mat::from_rows(rows).to_big()
    }

    #[test]
    fn identity_and_transposition() {
        let b1 = sym(vec![vec![1, 0], vec![0, 0]]);
        let b2 = sym(vec![vec![0, 0], vec![0, 1]]);
        let basis = vec![b1.clone(), b2.clone()];
        assert_eq!(restriction_det_sign(&basis, &basis).unwrap(), 1);
        let swapped = vec![b2, b1];
        assert_eq!(restriction_det_sign(&basis, &swapped).unwrap(), -1);
    }

    #[test]
    fn positive_scaling() {
        let b1 = sym(vec![vec![1, 0], vec![0, 0]]);
        let tripled = b1.map(|x| x * BigInt::from(3));
        assert_eq!(restriction_det_sign(&[b1], &[tripled]).unwrap(), 1);
    }

    #[test]
    fn span_errors() {
        let b1 = sym(vec![vec![1, 0], vec![0, 0]]);
        let b2 = sym(vec![vec![0, 0], vec![0, 1]]);
        let outside = sym(vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(
            restriction_det_sign(&[b1.clone()], &[outside]),
            Err(LinalgError::NotInSpan)
        ));
        assert!(matches!(
            restriction_det_sign(&[b1.clone(), b2.clone()], &[b1.clone(), b1.clone()]),
            Err(LinalgError::SingularRestriction)
        ));
    }
}
