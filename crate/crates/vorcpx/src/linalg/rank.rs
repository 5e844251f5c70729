//! Exact rank of sparse integer matrices.
//!
//! The fast path eliminates modulo two distinct word-sized primes and accepts
//! on agreement; any disagreement falls back to fraction-free elimination over
//! the integers, so the result is unconditionally exact.

use crate::num::{content, modular_primes, Int};

use super::sparse::SparseMat;

/// Rank over the rationals.
pub fn rank<T: Int>(m: &SparseMat<T>) -> usize {
    if m.is_zero() {
        return 0;
    }
    let primes = modular_primes(2, 0x5eed);
    let r1 = rank_mod(m, primes[0]);
    let r2 = rank_mod(m, primes[1]);
    if r1 == r2 {
        r1
    } else {
        rank_exact(m)
    }
}

/// Rank modulo a prime; a lower bound for the rational rank.
pub fn rank_mod<T: Int>(m: &SparseMat<T>, p: u64) -> usize {
    let pt = T::from(p as i64);
    let mut rows: Vec<Vec<(u32, u64)>> = vec![Vec::new(); m.nrows()];
    for (r, c, v) in m.iter() {
        let res = v.mod_floor(&pt).to_u64().expect("residue fits u64");
        if res != 0 {
            rows[r].push((c as u32, res));
        }
    }
    rows.retain(|r| !r.is_empty());
    eliminate_mod(rows, m.ncols(), p)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Sparse elimination with a cheap pivot heuristic, densifying the residue
/// when fill-in takes over.
fn eliminate_mod(mut rows: Vec<Vec<(u32, u64)>>, ncols: usize, p: u64) -> usize {
    let mut rank = 0;
    loop {
        if rows.is_empty() {
            return rank;
        }
        let nnz: usize = rows.iter().map(Vec::len).sum();
        if ncols <= 8192 && nnz * 4 > rows.len() * ncols {
            return rank + eliminate_dense_mod(&rows, ncols, p);
        }
        // shortest row wins; stable order keeps this deterministic
        let pi = rows
            .iter()
            .enumerate()
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, _)| i)
            .expect("nonempty");
        let pivot_row = rows.swap_remove(pi);
        let mut col_count = std::collections::HashMap::new();
        for r in &rows {
            for (c, _) in r {
                *col_count.entry(*c).or_insert(0usize) += 1;
            }
        }
        let &(pc, pv) = pivot_row
            .iter()
            .min_by_key(|(c, _)| (col_count.get(c).copied().unwrap_or(0), *c))
            .expect("nonempty row");
        let pinv = inv_mod(pv, p);
        rank += 1;
        let mut next_rows = Vec::with_capacity(rows.len());
        for row in rows {
            match row.iter().find(|(c, _)| *c == pc) {
                None => next_rows.push(row),
                Some(&(_, v)) => {
                    let f = (v as u128 * pinv as u128 % p as u128) as u64;
                    let reduced = row_submul_mod(&row, &pivot_row, f, p);
                    if !reduced.is_empty() {
                        next_rows.push(reduced);
                    }
                }
            }
        }
        rows = next_rows;
    }
}

fn row_submul_mod(row: &[(u32, u64)], pivot: &[(u32, u64)], f: u64, p: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i]);
            i += 1;
        } else if take_piv {
            let (c, v) = pivot[j];
            let sub = (f as u128 * v as u128 % p as u128) as u64;
            if sub != 0 {
                out.push((c, p - sub));
            }
            j += 1;
        } else {
            let (c, v) = row[i];
            let sub = (f as u128 * pivot[j].1 as u128 % p as u128) as u64;
            let val = (v + p - sub) % p;
            if val != 0 {
                out.push((c, val));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn eliminate_dense_mod(rows: &[Vec<(u32, u64)>], ncols: usize, p: u64) -> usize {
    let mut dense: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut d = vec![0u64; ncols];
            for (c, v) in r {
                d[*c as usize] = *v;
            }
            d
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pi) = (rank..dense.len()).find(|&i| dense[i][col] != 0) else {
            continue;
        };
        dense.swap(rank, pi);
        let pinv = inv_mod(dense[rank][col], p);
        let (pivot, rest) = {
            let (a, b) = dense.split_at_mut(rank + 1);
            (&a[rank], b)
        };
        for r in rest.iter_mut() {
            if r[col] == 0 {
                continue;
            }
            let f = (r[col] as u128 * pinv as u128 % p as u128) as u64;
            for j in col..ncols {
                if pivot[j] != 0 {
                    let sub = (f as u128 * pivot[j] as u128 % p as u128) as u64;
                    r[j] = (r[j] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == dense.len() {
            break;
        }
    }
    rank
}

/// Fraction-free integer elimination; rows are divided by their content to
/// control growth (rank is unaffected).
pub fn rank_exact<T: Int>(m: &SparseMat<T>) -> usize {
    let mut rows: Vec<Vec<(u32, T)>> = m
        .row_lists()
        .into_iter()
        .filter(|r| !r.is_empty())
        .collect();
    let mut rank = 0;
    while !rows.is_empty() {
        let pi = rows
            .iter()
            .enumerate()
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, _)| i)
            .unwrap();
        let pivot_row = rows.swap_remove(pi);
        let mut col_count = std::collections::HashMap::new();
        for r in &rows {
            for (c, _) in r {
                *col_count.entry(*c).or_insert(0usize) += 1;
            }
        }
        let (pc, pv) = pivot_row
            .iter()
            .min_by_key(|(c, _)| (col_count.get(c).copied().unwrap_or(0), *c))
            .map(|(c, v)| (*c, v.clone()))
            .unwrap();
        rank += 1;
        let mut next_rows = Vec::with_capacity(rows.len());
        for row in rows {
            match row.iter().find(|(c, _)| *c == pc) {
                None => next_rows.push(row),
                Some((_, f)) => {
                    let f = f.clone();
                    let mut reduced = row_cross_sub(&row, &pivot_row, &pv, &f);
                    let g = content(&reduced.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
                    if !g.is_zero() && !g.is_one() {
                        for (_, v) in reduced.iter_mut() {
                            *v = v.clone() / g.clone();
                        }
                    }
                    if !reduced.is_empty() {
                        next_rows.push(reduced);
                    }
                }
            }
        }
        rows = next_rows;
    }
    rank
}

fn row_cross_sub<T: Int>(row: &[(u32, T)], pivot: &[(u32, T)], pv: &T, f: &T) -> Vec<(u32, T)> {
    // pv * row - f * pivot
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push((row[i].0, pv.clone() * row[i].1.clone()));
            i += 1;
        } else if take_piv {
            out.push((pivot[j].0, -(f.clone() * pivot[j].1.clone())));
            j += 1;
        } else {
            let v = pv.clone() * row[i].1.clone() - f.clone() * pivot[j].1.clone();
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank() {
        for k in [1usize, 4, 9] {
            assert_eq!(rank(&SparseMat::<i64>::identity(k)), k);
        }
        assert_eq!(rank(&SparseMat::<i64>::zero(3, 5)), 0);
    }

    #[test]
    fn known_small_matrix() {
        // six relations on seven generators, rank five
        let m = SparseMat::from_dense_rows(&[
            vec![-5i64, 0, -5, 0, -1, 0, 0],
            vec![0, -2, 0, 2, -2, 0, 0],
            vec![2, -2, 1, 0, 0, 0, 0],
            vec![0, 0, 2, 1, 0, 0, 0],
            vec![-1, -2, 1, 0, 1, 0, 0],
            vec![0, 4, 0, 0, 0, -1, -1],
        ]);
        assert_eq!(rank(&m), 5);
        assert_eq!(rank_exact(&m), 5);
    }

    #[test]
    fn modular_agrees_with_exact_randomized() {
        // light LCG so the test is reproducible without extra deps
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            state
        };
        for _ in 0..25 {
            let nr = 3 + (next() % 8) as usize;
            let nc = 3 + (next() % 8) as usize;
            let mut triplets = Vec::new();
            for i in 0..nr {
                for j in 0..nc {
                    if next() % 3 == 0 {
                        triplets.push((i, j, (next() % 19) as i64 - 9));
                    }
                }
            }
            let m = SparseMat::from_triplets(nr, nc, triplets);
            assert_eq!(rank(&m), rank_exact(&m));
        }
    }
}
