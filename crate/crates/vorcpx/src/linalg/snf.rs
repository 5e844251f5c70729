//! Smith normal form: elementary divisors and saturated kernel bases.
//!
//! The divisor routine first eliminates unit pivots sparsely (the boundary
//! matrices are mostly ±1 entries), then finishes densely with periodic
//! content extraction to keep coefficients small.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::num::{normalize_primitive, Int};

use super::rank::rank;
use super::sparse::SparseMat;
use super::LinalgError;

/// Elementary divisors with multiplicities, ascending, each dividing the next.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ElementaryDivisorList {
    pairs: Vec<(BigInt, usize)>,
}

impl ElementaryDivisorList {
    pub fn new(pairs: Vec<(BigInt, usize)>) -> Result<Self, LinalgError> {
        let list = ElementaryDivisorList { pairs };
        list.check()?;
        Ok(list)
    }

    fn check(&self) -> Result<(), LinalgError> {
        let mut prev: Option<&BigInt> = None;
        for (d, m) in &self.pairs {
            if !d.is_positive() || *m == 0 {
                return Err(LinalgError::Format("invalid divisor entry".into()));
            }
            if let Some(p) = prev {
                if p >= d || !(d % p).is_zero() {
                    return Err(LinalgError::Format("divisor chain violated".into()));
                }
            }
            prev = Some(d);
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[(BigInt, usize)] {
        &self.pairs
    }

    /// Total multiplicity; equals the rank of the matrix.
    pub fn rank(&self) -> usize {
        self.pairs.iter().map(|(_, m)| m).sum()
    }

    /// Divisors expanded with multiplicity.
    pub fn expand(&self) -> Vec<BigInt> {
        self.pairs
            .iter()
            .flat_map(|(d, m)| std::iter::repeat(d.clone()).take(*m))
            .collect()
    }

    /// Divisors greater than one (the torsion part).
    pub fn nontrivial(&self) -> ElementaryDivisorList {
        ElementaryDivisorList {
            pairs: self.pairs.iter().filter(|(d, _)| !d.is_one()).cloned().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl std::fmt::Display for ElementaryDivisorList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.pairs.iter().map(|(d, m)| format!("{d}({m})")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Elementary divisors of an integer matrix.
pub fn elementary_divisors<T: Int>(m: &SparseMat<T>) -> ElementaryDivisorList {
    let (ones, residual) = unit_preeliminate(m);
    let mut divisors = dense_divisors(residual);
    if ones > 0 {
        divisors.insert(0, BigInt::one());
        // merge the unit pivots into a single leading entry
        let mut pairs: Vec<(BigInt, usize)> = Vec::new();
        for d in divisors {
            match pairs.last_mut() {
                Some((p, mult)) if *p == d => *mult += 1,
                _ => pairs.push((d, 1)),
            }
        }
        pairs[0].1 += ones - 1;
        return ElementaryDivisorList { pairs };
    }
    let mut pairs: Vec<(BigInt, usize)> = Vec::new();
    for d in divisors {
        match pairs.last_mut() {
            Some((p, mult)) if *p == d => *mult += 1,
            _ => pairs.push((d, 1)),
        }
    }
    ElementaryDivisorList { pairs }
}

/// Eliminates ±1 pivots with integer row/column operations (unimodular), and
/// returns (number of unit pivots, dense residual matrix).
fn unit_preeliminate<T: Int>(m: &SparseMat<T>) -> (usize, Vec<Vec<BigInt>>) {
    // rows keyed by live ids; columns tracked for pivot scoring
    let mut rows: Vec<Option<HashMap<u32, BigInt>>> = vec![None; m.nrows()];
    for (r, c, v) in m.iter() {
        let entry = rows[r].get_or_insert_with(HashMap::new);
        entry.insert(c as u32, big_from(v));
    }
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.ncols()];
    let mut col_count: Vec<usize> = vec![0; m.ncols()];
    for (i, row) in rows.iter().enumerate() {
        if let Some(row) = row {
            for c in row.keys() {
                col_rows[*c as usize].push(i as u32);
                col_count[*c as usize] += 1;
            }
        }
    }
    let mut ones = 0usize;
    loop {
        // Markowitz-style: among ±1 entries pick least (row_len-1)*(col_len-1)
        let mut best: Option<(usize, u32, u32)> = None;
        for (i, row) in rows.iter().enumerate() {
            let Some(row) = row else { continue };
            let rl = row.len();
            for (c, v) in row {
                if v.abs().is_one() {
                    let score = (rl - 1) * (col_count[*c as usize] - 1);
                    if best.map_or(true, |(s, r, cc)| (score, i as u32, *c) < (s, r, cc)) {
                        best = Some((score, i as u32, *c));
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let pivot_row = rows[pr as usize].take().expect("live pivot row");
        for c in pivot_row.keys() {
            col_count[*c as usize] -= 1;
        }
        let pv = pivot_row[&pc].clone(); // ±1
        ones += 1;
        let holders: Vec<u32> = col_rows[pc as usize]
            .iter()
            .copied()
            .filter(|&ri| {
                ri != pr && rows[ri as usize].as_ref().is_some_and(|r| r.contains_key(&pc))
            })
            .collect();
        for ri in holders {
            let row = rows[ri as usize].as_mut().unwrap();
            let f = &row[&pc] / &pv; // exact since |pv| = 1
            for (c, v) in &pivot_row {
                if *c == pc {
                    continue;
                }
                let slot = row.entry(*c).or_insert_with(BigInt::zero);
                let was_zero = slot.is_zero();
                *slot -= &f * v;
                if slot.is_zero() {
                    row.remove(c);
                    if !was_zero {
                        col_count[*c as usize] -= 1;
                    }
                } else if was_zero {
                    col_rows[*c as usize].push(ri);
                    col_count[*c as usize] += 1;
                }
            }
            row.remove(&pc);
            col_count[pc as usize] -= 1;
            if row.is_empty() {
                rows[ri as usize] = None;
            }
        }
        debug_assert_eq!(col_count[pc as usize], 0);
    }
    // densify whatever is left
    let mut live_cols: Vec<u32> = rows
        .iter()
        .flatten()
        .flat_map(|r| r.keys().copied())
        .collect();
    live_cols.sort_unstable();
    live_cols.dedup();
    let col_index: HashMap<u32, usize> =
        live_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let residual: Vec<Vec<BigInt>> = rows
        .iter()
        .flatten()
        .map(|r| {
            let mut d = vec![BigInt::zero(); live_cols.len()];
            for (c, v) in r {
                d[col_index[c]] = v.clone();
            }
            d
        })
        .collect();
    (ones, residual)
}

fn big_from<T: Int>(v: &T) -> BigInt {
    if let Some(x) = v.to_i64() {
        return BigInt::from(x);
    }
    // arbitrary-precision scalars format losslessly
    v.to_string().parse().expect("integer text")
}

/// Divisors of a dense integer matrix, ascending, chain enforced.
fn dense_divisors(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let mut divisors = Vec::new();
    let mut scale = BigInt::one();
    let mut k = 0usize;
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    while k < nrows.min(ncols) {
        // content extraction keeps entries small; it scales later divisors
        let mut g = BigInt::zero();
        for row in a.iter().skip(k) {
            for v in row.iter().skip(k) {
                if !v.is_zero() {
                    g = g.gcd(v);
                    if g.is_one() {
                        break;
                    }
                }
            }
            if g.is_one() {
                break;
            }
        }
        if g.is_zero() {
            break;
        }
        if !g.is_one() {
            for row in a.iter_mut().skip(k) {
                for v in row.iter_mut().skip(k) {
                    *v = &*v / &g;
                }
            }
            scale *= &g;
        }
        // move a least-magnitude entry to the pivot
        let (mut pi, mut pj) = (k, k);
        let mut best: Option<BigInt> = None;
        for i in k..nrows {
            for j in k..ncols {
                if !a[i][j].is_zero() {
                    let m = a[i][j].abs();
                    if best.as_ref().map_or(true, |b| m < *b) {
                        best = Some(m);
                        (pi, pj) = (i, j);
                    }
                }
            }
        }
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        'reduce: loop {
            // clear column k
            for i in k + 1..nrows {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = rounded_div(&a[i][k], &a[k][k]);
                if !q.is_zero() {
                    for j in k..ncols {
                        let s = &a[k][j] * &q;
                        a[i][j] -= s;
                    }
                }
                if !a[i][k].is_zero() {
                    a.swap(k, i);
                    continue 'reduce;
                }
            }
            // clear row k
            for j in k + 1..ncols {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = rounded_div(&a[k][j], &a[k][k]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(k) {
                        let s = &row[k] * &q;
                        row[j] -= s;
                    }
                }
                if !a[k][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(k, j);
                    }
                    continue 'reduce;
                }
            }
            // pivot must divide the rest of the block
            for i in k + 1..nrows {
                for j in k + 1..ncols {
                    if !(&a[i][j] % &a[k][k]).is_zero() {
                        for jj in k..ncols {
                            let add = a[i][jj].clone();
                            a[k][jj] += add;
                        }
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        divisors.push(&scale * a[k][k].abs());
        k += 1;
    }
    divisors
}

fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer quotient keeps remainders at most |b|/2
    let (q, r) = num_integer::Integer::div_rem(a, b);
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) != (b.is_negative()) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Basis of the right kernel as primitive integer vectors spanning the
/// saturated kernel lattice. Dense computation; intended for small matrices.
pub fn kernel_basis<T: Int>(m: &SparseMat<T>) -> Vec<Vec<BigInt>> {
    let nrows = m.nrows();
    let ncols = m.ncols();
    let mut a: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); ncols]; nrows];
    for (r, c, v) in m.iter() {
        a[r][c] = big_from(v);
    }
    // column operations are mirrored on v (ncols x ncols)
    let mut v: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let r = smith_with_col_transform(&mut a, &mut v);
    let mut basis: Vec<Vec<BigInt>> = (r..ncols)
        .map(|j| {
            let mut col: Vec<BigInt> = (0..ncols).map(|i| v[i][j].clone()).collect();
            normalize_primitive(&mut col);
            col
        })
        .collect();
    basis.sort();
    debug_assert_eq!(basis.len(), ncols - rank(m));
    basis
}

/// In-place Smith reduction tracking only column operations; returns the rank.
fn smith_with_col_transform(a: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>) -> usize {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let n = v.len();
    let swap_cols = |a: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        if x == y {
            return;
        }
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in v.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut k = 0usize;
    while k < nrows.min(ncols) {
        let mut found = false;
        'find: for i in k..nrows {
            for j in k..ncols {
                if !a[i][j].is_zero() {
                    a.swap(k, i);
                    swap_cols(a, v, k, j);
                    found = true;
                    break 'find;
                }
            }
        }
        if !found {
            break;
        }
        'reduce: loop {
            // minimize pivot within its row/column by euclidean steps
            for i in k + 1..nrows {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = rounded_div(&a[i][k], &a[k][k]);
                if !q.is_zero() {
                    for j in k..ncols {
                        let s = &a[k][j] * &q;
                        a[i][j] -= s;
                    }
                }
                if !a[i][k].is_zero() {
                    a.swap(k, i);
                    continue 'reduce;
                }
            }
            for j in k + 1..ncols {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = rounded_div(&a[k][j], &a[k][k]);
                if !q.is_zero() {
                    for i in 0..nrows {
                        let s = &a[i][k] * &q;
                        a[i][j] -= s;
                    }
                    for i in 0..n {
                        let s = &v[i][k] * &q;
                        v[i][j] -= s;
                    }
                }
                if !a[k][j].is_zero() {
                    swap_cols(a, v, k, j);
                    continue 'reduce;
                }
            }
            break;
        }
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::SparseMat;

    fn divisors_of(rows: &[Vec<i64>]) -> Vec<i64> {
        elementary_divisors(&SparseMat::from_dense_rows(rows))
            .expand()
            .iter()
            .map(|d| d.to_string().parse().unwrap())
            .collect()
    }

    /// Independent oracle: d_1...d_k equals the gcd of all k x k minors.
    fn divisors_by_minor_gcd(rows: &[Vec<i64>]) -> Vec<i64> {
        use crate::linalg::dense::Mat;
        let nr = rows.len();
        let nc = rows[0].len();
        let m = Mat::from_rows(rows.to_vec()).to_big();
        let mut products = vec![BigInt::one()];
        for k in 1..=nr.min(nc) {
            let mut g = BigInt::zero();
            for ri in subsets(nr, k) {
                for ci in subsets(nc, k) {
                    let sub = Mat::from_fn(k, k, |i, j| m[(ri[i], ci[j])].clone());
                    g = g.gcd(&sub.det());
                }
            }
            if g.is_zero() {
                break;
            }
            products.push(g);
        }
        (1..products.len())
            .map(|k| (&products[k] / &products[k - 1]).to_string().parse().unwrap())
            .collect()
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    }

    #[test]
    fn coprime_diagonal() {
        assert_eq!(divisors_of(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
    }

    #[test]
    fn top_rank5_matrix() {
        assert_eq!(divisors_of(&[vec![40, 0, -15], vec![40, -15, 0]]), vec![5, 15]);
    }

    #[test]
    fn matches_minor_gcd_oracle() {
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![6, 111, -36], vec![5, -672, 210], vec![0, -255, 81]],
            vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]],
            vec![vec![1, 0, -3, 0], vec![0, 2, 0, -2], vec![4, 0, 5, 0]],
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![3, 3, 3], vec![3, 3, 3]],
        ];
        for rows in cases {
            assert_eq!(divisors_of(&rows), divisors_by_minor_gcd(&rows), "rows {rows:?}");
        }
    }

    #[test]
    fn kernel_of_gcd_row() {
        let m = SparseMat::from_dense_rows(&[vec![2i64, 3]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![BigInt::from(3), BigInt::from(-2)]]);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = SparseMat::from_dense_rows(&[
            vec![-5i64, 0, -5, 0, -1, 0, 0],
            vec![0, -2, 0, 2, -2, 0, 0],
            vec![2, -2, 1, 0, 0, 0, 0],
            vec![0, 0, 2, 1, 0, 0, 0],
            vec![-1, -2, 1, 0, 1, 0, 0],
            vec![0, 4, 0, 0, 0, -1, -1],
        ]);
        let basis = kernel_basis(&m);
        assert_eq!(basis.len(), 2);
        let big = m.to_big();
        for v in &basis {
            assert!(big.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }
}
