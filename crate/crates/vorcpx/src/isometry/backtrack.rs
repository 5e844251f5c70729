//! Backtracking over images of a vector configuration.
//!
//! Both form equivalence and cell equivalence reduce to the same search:
//! find an integral matrix mapping one ±pair configuration onto another while
//! preserving a fixed symmetric pairing. Candidate images are pruned by
//! per-pair fingerprints and partial inner products; every leaf is verified
//! by the caller before it counts.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::linalg::Mat;

use super::perm::Perm;

/// A ±pair configuration with its pairing table.
pub struct PairSystem {
    pub dim: usize,
    /// normalized pair representatives, sorted; index = pair id
    pub vecs: Vec<Vec<i64>>,
    /// pairing[i][j] = v_i^t G v_j for the chosen invariant form G
    pairing: Vec<Vec<i128>>,
    /// per-pair invariant: hash of (diagonal value, sorted |pairing| row)
    fp: Vec<u64>,
    fp_sorted: Vec<u64>,
}

impl PairSystem {
    /// `vecs` must already be normalized (first nonzero positive) and sorted.
    pub fn new(vecs: Vec<Vec<i64>>, g: &Mat<BigInt>) -> Self {
        let dim = g.nrows();
        let n = vecs.len();
        // pairing via G v products
        let gv: Vec<Vec<i128>> = vecs
            .iter()
            .map(|v| {
                (0..dim)
                    .map(|r| {
                        let mut acc = BigInt::from(0);
                        for c in 0..dim {
                            acc += &g[(r, c)] * v[c];
                        }
                        acc.to_i128().expect("pairing fits i128")
                    })
                    .collect()
            })
            .collect();
        let pairing: Vec<Vec<i128>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..dim).map(|r| vecs[i][r] as i128 * gv[j][r]).sum())
                    .collect()
            })
            .collect();
        let fp: Vec<u64> = (0..n)
            .map(|i| {
                let mut row: Vec<i128> = pairing[i].iter().map(|x| x.abs()).collect();
                row.sort_unstable();
                let mut h = DefaultHasher::new();
                pairing[i][i].hash(&mut h);
                row.hash(&mut h);
                h.finish()
            })
            .collect();
        let mut fp_sorted = fp.clone();
        fp_sorted.sort_unstable();
        PairSystem { dim, vecs, pairing, fp, fp_sorted }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    /// Necessary condition for an isometry between the systems to exist.
    pub fn compatible(&self, other: &PairSystem) -> bool {
        self.dim == other.dim
            && self.vecs.len() == other.vecs.len()
            && self.fp_sorted == other.fp_sorted
    }

    fn pair_index(&self, v: &[i64]) -> Option<usize> {
        self.vecs.binary_search_by(|w| w.as_slice().cmp(v)).ok()
    }
}

/// A verified solution: integral matrix with |det| = 1 mapping the pairs of
/// the source system onto the pairs of the target, plus its action as a
/// permutation of signed vectors (degree 2 * pairs: +v_i at i, -v_i at n+i).
pub struct Leaf {
    pub phi: Mat<i64>,
    pub perm: Perm,
    pub det: i8,
}

/// Signed-vector permutation of the global flip v -> -v.
pub fn flip_perm(npairs: usize) -> Perm {
    let images: Vec<u32> = (0..2 * npairs as u32)
        .map(|i| if (i as usize) < npairs { i + npairs as u32 } else { i - npairs as u32 })
        .collect();
    Perm::from_images(images)
}

/// Enumerates matrices phi with phi(S1) = ±S2 (bijectively on pairs) that
/// preserve the pairing, are integral with |det phi| = 1, and pass `verify`.
/// Images of the first basis vector are restricted to positive sign, so each
/// solution pair {phi, -phi} is reported once. Deterministic exploration
/// order; `on_found` may stop the search early.
pub fn search_isometries(
    s1: &PairSystem,
    s2: &PairSystem,
    verify: &dyn Fn(&Mat<i64>) -> bool,
    on_found: &mut dyn FnMut(Leaf) -> ControlFlow<()>,
) -> Result<(), SpanError> {
    if !s1.compatible(s2) {
        return Ok(());
    }
    let dim = s1.dim;
    let n = s1.len();

    // candidate class per source pair
    let class_size = |i: usize| s2.fp.iter().filter(|&&f| f == s1.fp[i]).count();
    // greedy basis: prefer small candidate classes, keep only rank-increasing
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (class_size(i), i));
    let mut basis: Vec<usize> = Vec::with_capacity(dim);
    let mut chosen_vecs: Vec<Vec<i64>> = Vec::new();
    for i in order {
        if basis.len() == dim {
            break;
        }
        chosen_vecs.push(s1.vecs[i].clone());
        if crate::linalg::vector_rank(&chosen_vecs) == basis.len() + 1 {
            basis.push(i);
        } else {
            chosen_vecs.pop();
        }
    }
    if basis.len() < dim {
        return Err(SpanError);
    }
    let u = Mat::from_fn(dim, dim, |r, c| s1.vecs[basis[c]][r]);
    let u_big = u.to_big();
    let det_u = u_big.det().to_i128().expect("basis det fits i128");
    let adj_u = u_big.adjugate().map(|x| x.to_i128().expect("adjugate fits i128"));

    let candidates: Vec<Vec<usize>> = basis
        .iter()
        .map(|&i| (0..n).filter(|&j| s2.fp[j] == s1.fp[i]).collect())
        .collect();

    let mut chosen: Vec<(usize, i64)> = Vec::with_capacity(dim);
    let mut used = vec![false; n];
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)]; // (candidate idx, sign idx)
    while let Some(&(ci, si)) = stack.last() {
        let level = stack.len() - 1;
        if ci >= candidates[level].len() {
            stack.pop();
            if let Some((j, _)) = chosen.pop() {
                used[j] = false;
            }
            if let Some(top) = stack.last_mut() {
                *top = advance(*top, level == 1);
            }
            continue;
        }
        let j = candidates[level][ci];
        let sign: i64 = if si == 0 { 1 } else { -1 };
        // diagonal value plus partial pairings against everything chosen
        let ok = !used[j]
            && s2.pairing[j][j] == s1.pairing[basis[level]][basis[level]]
            && chosen.iter().enumerate().all(|(k, &(jk, sk))| {
                (sk as i128) * (sign as i128) * s2.pairing[jk][j]
                    == s1.pairing[basis[k]][basis[level]]
            });
        if !ok {
            let top = stack.last_mut().unwrap();
            *top = advance(*top, level == 0);
            continue;
        }
        chosen.push((j, sign));
        used[j] = true;
        if chosen.len() == dim {
            if let Some(leaf) = try_leaf(s1, s2, &chosen, &adj_u, det_u) {
                if verify(&leaf.phi) {
                    if let ControlFlow::Break(()) = on_found(leaf) {
                        return Ok(());
                    }
                }
            }
            let (j, _) = chosen.pop().unwrap();
            used[j] = false;
            let top = stack.last_mut().unwrap();
            *top = advance(*top, level == 0);
            continue;
        }
        stack.push((0, 0));
    }
    Ok(())
}

/// Advances (candidate, sign); the first level only uses positive signs.
fn advance((ci, si): (usize, usize), first_level: bool) -> (usize, usize) {
    if first_level || si == 1 {
        (ci + 1, 0)
    } else {
        (ci, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanError;

fn try_leaf(
    s1: &PairSystem,
    s2: &PairSystem,
    chosen: &[(usize, i64)],
    adj_u: &Mat<i128>,
    det_u: i128,
) -> Option<Leaf> {
    let dim = s1.dim;
    let n = s1.len();
    // phi = W U^{-1} = (W adj U) / det U, must be integral
    let w = Mat::from_fn(dim, dim, |r, c| {
        let (j, s) = chosen[c];
        s as i128 * s2.vecs[j][r] as i128
    });
    let mut phi = Mat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let mut acc: i128 = 0;
            for k in 0..dim {
                acc += w[(r, k)] * adj_u[(k, c)];
            }
            if acc % det_u != 0 {
                return None;
            }
            phi[(r, c)] = i64::try_from(acc / det_u).ok()?;
        }
    }
    let det = phi.to_big().det().to_i128()?;
    if det != 1 && det != -1 {
        return None;
    }
    // image of every pair must land in the target pair list, bijectively
    let mut images = vec![0u32; 2 * n];
    let mut seen = vec![false; n];
    for (i, v) in s1.vecs.iter().enumerate() {
        let mut w: Vec<i64> = (0..dim)
            .map(|r| (0..dim).map(|c| phi[(r, c)] * v[c]).sum())
            .collect();
        let mut sign = 1i64;
        if let Some(first) = w.iter().find(|&&x| x != 0) {
            if *first < 0 {
                sign = -1;
                for x in w.iter_mut() {
                    *x = -*x;
                }
            }
        }
        let j = s2.pair_index(&w)?;
        if seen[j] {
            return None;
        }
        seen[j] = true;
        if sign > 0 {
            images[i] = j as u32;
            images[n + i] = (n + j) as u32;
        } else {
            images[i] = (n + j) as u32;
            images[n + i] = j as u32;
        }
    }
    Some(Leaf { phi, perm: Perm::from_images(images), det: det as i8 })
}
