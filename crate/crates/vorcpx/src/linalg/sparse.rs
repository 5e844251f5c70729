//! Sparse integer matrices in coordinate form.
//!
//! Entries are kept sorted by (row, col) with no duplicates and no explicit
//! zeros, so the stored length is exactly the nonzero count.

use std::io::{BufRead, Write};

use num_bigint::BigInt;

use crate::num::Int;

use super::LinalgError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMat<T> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(u32, u32, T)>,
}

impl<T: Int> SparseMat<T> {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMat { nrows, ncols, entries: Vec::new() }
    }

    /// Builds from triplets: duplicates are summed, zeros dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Self {
        let mut raw: Vec<(u32, u32, T)> = triplets
            .into_iter()
            .inspect(|(r, c, _)| {
                assert!(*r < nrows && *c < ncols, "entry out of bounds");
            })
            .map(|(r, c, v)| (r as u32, c as u32, v))
            .collect();
        raw.sort_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(u32, u32, T)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|(_, _, v)| !v.is_zero());
        SparseMat { nrows, ncols, entries }
    }

    pub fn from_dense_rows(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_triplets(
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(i, row)| {
                row.iter().enumerate().filter_map(move |(j, v)| {
                    (!v.is_zero()).then(|| (i, j, v.clone()))
                })
            }),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, T::one())))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored nonzero entries (the Omega of the summary tables).
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(r, c, v)| (*r as usize, *c as usize, v))
    }

    pub fn map<U: Int>(&self, f: impl Fn(&T) -> U) -> SparseMat<U> {
        SparseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: self.entries.iter().map(|(r, c, v)| (*r, *c, f(v))).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    /// Rows as dense vectors; only for modest widths.
    pub fn to_dense_rows(&self) -> Vec<Vec<T>> {
        let mut rows = vec![vec![T::zero(); self.ncols]; self.nrows];
        for (r, c, v) in self.iter() {
            rows[r][c] = v.clone();
        }
        rows
    }

    /// Per-row sparse views (column index, value).
    pub fn row_lists(&self) -> Vec<Vec<(u32, T)>> {
        let mut rows = vec![Vec::new(); self.nrows];
        for (r, c, v) in &self.entries {
            rows[*r as usize].push((*c, v.clone()));
        }
        rows
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "shape mismatch");
        let rhs_rows = rhs.row_lists();
        let mut triplets: Vec<(usize, usize, T)> = Vec::new();
        let mut acc: std::collections::BTreeMap<u32, T> = Default::default();
        let mut current_row = u32::MAX;
        let flush = |row: u32,
                         acc: &mut std::collections::BTreeMap<u32, T>,
                         triplets: &mut Vec<(usize, usize, T)>| {
            for (c, v) in std::mem::take(acc) {
                if !v.is_zero() {
                    triplets.push((row as usize, c as usize, v));
                }
            }
        };
        for (r, k, v) in &self.entries {
            if *r != current_row {
                if current_row != u32::MAX {
                    flush(current_row, &mut acc, &mut triplets);
                }
                current_row = *r;
            }
            for (c, w) in &rhs_rows[*k as usize] {
                let slot = acc.entry(*c).or_insert_with(T::zero);
                *slot += v.clone() * w.clone();
            }
        }
        if current_row != u32::MAX {
            flush(current_row, &mut acc, &mut triplets);
        }
        Self::from_triplets(self.nrows, rhs.ncols, triplets)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut out = vec![T::zero(); self.nrows];
        for (r, c, v) in self.iter() {
            out[r] += v.clone() * x[c].clone();
        }
        out
    }
}

impl SparseMat<i64> {
    pub fn to_big(&self) -> SparseMat<BigInt> {
        self.map(|v| BigInt::from(*v))
    }
}

const MARKET_HEADER: &str = "%%MatrixMarket matrix coordinate integer general";

/// Writes the standard coordinate text format, 1-indexed, sorted by (row, col).
pub fn write_matrix_market<T: Int>(m: &SparseMat<T>, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{MARKET_HEADER}")?;
    writeln!(w, "{} {} {}", m.nrows, m.ncols, m.nnz())?;
    for (r, c, v) in m.iter() {
        writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn read_matrix_market(r: &mut impl BufRead) -> Result<SparseMat<BigInt>, LinalgError> {
    let bad = |msg: &str| LinalgError::Format(msg.to_string());
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty file"))?
        .map_err(|e| LinalgError::Format(e.to_string()))?;
    if header.trim() != MARKET_HEADER {
        return Err(bad("unsupported header"));
    }
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for line in lines {
        let line = line.map_err(|e| LinalgError::Format(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut it = line.split_whitespace();
        if dims.is_none() {
            let nr = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad size line"))?;
            let nc = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad size line"))?;
            let nnz = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad size line"))?;
            dims = Some((nr, nc, nnz));
            continue;
        }
        let row: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad entry"))?;
        let col: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad entry"))?;
        let val: BigInt =
            it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad entry"))?;
        if row == 0 || col == 0 {
            return Err(bad("indices are 1-based"));
        }
        triplets.push((row - 1, col - 1, val));
    }
    let (nr, nc, nnz) = dims.ok_or_else(|| bad("missing size line"))?;
    if triplets.len() != nnz {
        return Err(bad("entry count mismatch"));
    }
    let m = SparseMat::from_triplets(nr, nc, triplets);
    if m.nnz() != nnz {
        return Err(bad("duplicate or zero entries"));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_normalization() {
        let m = SparseMat::from_triplets(2, 3, vec![(0, 1, 2i64), (0, 1, -2), (1, 2, 5), (0, 0, 1)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![(0, 0, &1), (1, 2, &5)]);
    }

    #[test]
    fn product_matches_dense() {
        let a = SparseMat::from_dense_rows(&[vec![1i64, 2, 0], vec![0, -1, 3]]);
        let b = SparseMat::from_dense_rows(&[vec![1i64, 0], vec![4, 1], vec![0, 2]]);
        let c = a.mul(&b);
        assert_eq!(c.to_dense_rows(), vec![vec![9, 2], vec![-4, 5]]);
    }

    #[test]
    fn market_roundtrip_exact() {
        let m = SparseMat::from_dense_rows(&[vec![40i64, 0, -15], vec![40, -15, 0]]).to_big();
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate integer general\n2 3 4\n"));
        let back = read_matrix_market(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
        let mut buf2 = Vec::new();
        write_matrix_market(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }
}
