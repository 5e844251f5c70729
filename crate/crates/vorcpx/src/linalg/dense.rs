//! Dense matrices over an exact integer scalar.
//!
//! Everything here is fraction-free (Bareiss); no floating point. Dimensions
//! stay small (Gram matrices up to 8, symmetric-space coordinates up to 36),
//! so clarity beats cleverness.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::num::Int;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Int> Mat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat { nrows, ncols, data: vec![T::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Mat { nrows, ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Mat { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.ncols.max(1)).take(self.nrows)
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "shape mismatch");
        Mat::from_fn(self.nrows, rhs.ncols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.ncols {
                acc += self[(i, k)].clone() * rhs[(k, j)].clone();
            }
            acc
        })
    }

    pub fn map<U: Int>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols
            && (0..self.nrows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Fraction-free determinant (Bareiss), square matrices only.
    pub fn det(&self) -> T {
        assert_eq!(self.nrows, self.ncols, "determinant of non-square matrix");
        let n = self.nrows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut prev = T::one();
        let mut sign = false;
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = !sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[(i, j)].clone() * a[(k, k)].clone()
                        - a[(i, k)].clone() * a[(k, j)].clone();
                    a[(i, j)] = num / prev.clone();
                }
                a[(i, k)] = T::zero();
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign {
            -d
        } else {
            d
        }
    }

    /// Rank over the rationals, fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<T>> = self.rows().map(|r| r.to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.ncols {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            let (pivot_row, rest) = {
                let (a, b) = rows.split_at_mut(rank + 1);
                (&a[rank], b)
            };
            let lead = pivot_row[col].clone();
            for r in rest.iter_mut() {
                if r[col].is_zero() {
                    continue;
                }
                let f = r[col].clone();
                for j in col..self.ncols {
                    r[j] = r[j].clone() * lead.clone() - pivot_row[j].clone() * f.clone();
                }
                let g = crate::num::content(&r[col..]);
                if !g.is_zero() && !g.is_one() {
                    for x in r[col..].iter_mut() {
                        *x = x.clone() / g.clone();
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Adjugate via cofactors; only used on small matrices (n <= 8).
    pub fn adjugate(&self) -> Self {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        Mat::from_fn(n, n, |i, j| {
            // cofactor C_ji for the (i, j) entry of the adjugate
            let minor = Mat::from_fn(n - 1, n - 1, |r, c| {
                let rr = if r < j { r } else { r + 1 };
                let cc = if c < i { c } else { c + 1 };
                self[(rr, cc)].clone()
            });
            let d = minor.det();
            if (i + j) % 2 == 0 {
                d
            } else {
                -d
            }
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.ncols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.ncols + j]
    }
}

impl Mat<i64> {
    pub fn to_big(&self) -> Mat<BigInt> {
        self.map(|x| BigInt::from(*x))
    }

    /// Positive-definiteness via leading principal minors (exact).
    pub fn is_positive_definite(&self) -> bool {
        if self.nrows != self.ncols || !self.is_symmetric() {
            return false;
        }
        let big = self.to_big();
        for k in 1..=self.nrows {
            let minor = Mat::from_fn(k, k, |i, j| big[(i, j)].clone());
            if !minor.det().is_positive() {
                return false;
            }
        }
        true
    }

    /// Evaluates the quadratic form x^t M x in wide arithmetic.
    pub fn eval_form(&self, x: &[i64]) -> i128 {
        let n = self.nrows;
        let mut acc = 0i128;
        for i in 0..n {
            for j in 0..n {
                acc += self[(i, j)] as i128 * x[i] as i128 * x[j] as i128;
            }
        }
        acc
    }
}

/// Dimension of the space of symmetric n x n matrices.
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Coordinates of a symmetric matrix: diagonal entries, then doubled
/// off-diagonal entries in row-major upper-triangle order. With this
/// convention the pairing <vec(q), vec_rank1(v)> recovers v^t q v up to the
/// fixed scaling used consistently across the crate.
pub fn sym_to_vec<T: Int>(m: &Mat<T>) -> Vec<T> {
    let n = m.nrows();
    assert!(m.is_symmetric(), "symmetric matrix expected");
    let mut out = Vec::with_capacity(sym_dim(n));
    for i in 0..n {
        out.push(m[(i, i)].clone());
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(m[(i, j)].clone() + m[(j, i)].clone());
        }
    }
    out
}

/// Symmetric matrix from coordinates produced by [`sym_to_vec`]. Off-diagonal
/// coordinates must be even for an integral result.
pub fn vec_to_sym(n: usize, v: &[BigInt]) -> Option<Mat<BigInt>> {
    assert_eq!(v.len(), sym_dim(n));
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = v[i].clone();
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let two = BigInt::from(2);
            let (q, r) = num_integer::Integer::div_rem(&v[k], &two);
            if !r.is_zero() {
                return None;
            }
            m[(i, j)] = q.clone();
            m[(j, i)] = q;
            k += 1;
        }
    }
    Some(m)
}

/// Rank-one coordinates of v (the vectorization of v v^t).
pub fn rank1_vec(v: &[i64]) -> Vec<i64> {
    let n = v.len();
    let mut out = Vec::with_capacity(sym_dim(n));
    for i in 0..n {
        out.push(v[i] * v[i]);
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(2 * v[i] * v[j]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_rank() {
        let m = Mat::from_rows(vec![vec![2i64, 1], vec![1, 2]]);
        assert_eq!(m.det(), 3);
        assert_eq!(m.rank(), 2);
        let s = Mat::from_rows(vec![vec![1i64, 2, 3], vec![2, 4, 6], vec![1, 1, 1]]);
        assert_eq!(s.rank(), 2);
        assert_eq!(Mat::<i64>::identity(4).det(), 1);
    }

    #[test]
    fn adjugate_small() {
        let m = Mat::from_rows(vec![vec![2i64, 1], vec![1, 2]]);
        let adj = m.adjugate();
        assert_eq!(adj, Mat::from_rows(vec![vec![2, -1], vec![-1, 2]]));
        let prod = m.mul(&adj);
        assert_eq!(prod, Mat::from_rows(vec![vec![3, 0], vec![0, 3]]));
    }

    #[test]
    fn pd_check() {
        assert!(Mat::from_rows(vec![vec![2i64, 1], vec![1, 2]]).is_positive_definite());
        assert!(!Mat::from_rows(vec![vec![1i64, 2], vec![2, 1]]).is_positive_definite());
        assert!(!Mat::from_rows(vec![vec![0i64, 0], vec![0, 1]]).is_positive_definite());
    }

    #[test]
    fn sym_coordinates_roundtrip() {
        let v = vec![1i64, -2, 3];
        let m = Mat::from_fn(3, 3, |i, j| v[i] * v[j]);
        assert_eq!(sym_to_vec(&m), rank1_vec(&v));
        let big = m.to_big();
        let coords = sym_to_vec(&big);
        assert_eq!(vec_to_sym(3, &coords).unwrap(), big);
    }
}
