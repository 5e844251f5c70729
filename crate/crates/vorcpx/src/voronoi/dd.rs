//! Facets of a polyhedral cone by the incremental double description method,
//! in exact integer arithmetic.
//!
//! The facets of cone(r_1, ..., r_M) are the extreme rays of the dual cone
//! {x : <r_i, x> >= 0}, so one double description pass over the inequalities
//! <r_i, .> >= 0 produces every facet with its incidence set.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::linalg::Mat;
use crate::num::reduce_content;

use super::VoronoiError;

/// A facet in span coordinates: inner normal vanishing on the incident rays
/// and strictly positive on all others.
#[derive(Clone, Debug)]
pub struct DdFacet {
    pub normal: Vec<BigInt>,
    pub incident: Vec<usize>,
}

/// All facets of the cone generated by `rays` (coordinates of points in some
/// R^d, full-dimensional in their span, pointed). The incidence sets index
/// into `rays`; normals live in the span coordinates described by the
/// returned basis row set.
pub struct ConeFacets {
    pub facets: Vec<DdFacet>,
    /// coordinate rows selected to parameterize the span
    pub span_rows: Vec<usize>,
    pub rank: usize,
}

pub fn cone_facets_raw(rays: &[Vec<i64>]) -> Result<ConeFacets, VoronoiError> {
    let span = crate::linalg::span_data(rays);
    let rank = span.rank();
    if rank < 2 {
        return Err(VoronoiError::DegenerateCone);
    }
    // project to span coordinates: restriction to the pivot rows is injective
    let rows = span.rows.clone();
    let proj: Vec<Vec<BigInt>> = rays
        .iter()
        .map(|r| rows.iter().map(|&i| BigInt::from(r[i])).collect())
        .collect();
    let facets = dual_extreme_rays(&proj, rank)?;
    Ok(ConeFacets { facets, span_rows: rows, rank })
}

/// Extreme rays of {x in R^k : <a_i, x> >= 0}, assuming the a_i span R^k and
/// the feasible cone is full-dimensional (true for the dual of a pointed
/// full-dimensional cone).
fn dual_extreme_rays(ineqs: &[Vec<BigInt>], k: usize) -> Result<Vec<DdFacet>, VoronoiError> {
    let m = ineqs.len();
    // deterministic insertion order: by (norm-ish, lex); the trace of the
    // underlying rank-one forms is monotone in this key for our callers
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let na: BigInt = ineqs[a].iter().map(|x| x * x).sum();
        let nb: BigInt = ineqs[b].iter().map(|x| x * x).sum();
        (na, &ineqs[a]).cmp(&(nb, &ineqs[b]))
    });
    // initial simplicial cone from k independent inequalities
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut picked: Vec<Vec<BigInt>> = Vec::new();
    for &i in &order {
        picked.push(ineqs[i].clone());
        if crate::linalg::vector_rank(&picked) == chosen.len() + 1 {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        } else {
            picked.pop();
        }
    }
    if chosen.len() < k {
        return Err(VoronoiError::DegenerateCone);
    }
    let b = Mat::from_fn(k, k, |r, c| ineqs[chosen[r]][c].clone());
    let det = b.det();
    let adj = b.adjugate(); // b * adj = det * I
    let sign_fix = if det.is_negative() { -BigInt::from(1) } else { BigInt::from(1) };
    let mut rays: Vec<Vec<BigInt>> = (0..k)
        .map(|j| {
            let mut col: Vec<BigInt> = (0..k).map(|r| &adj[(r, j)] * &sign_fix).collect();
            reduce_content(&mut col);
            col
        })
        .collect();

    let dot = |a: &[BigInt], x: &[BigInt]| -> BigInt { a.iter().zip(x).map(|(p, q)| p * q).sum() };

    // incidence bitsets over all m inequalities, maintained incrementally
    let words = m.div_ceil(64);
    let mut zero_sets: Vec<Vec<u64>> = rays
        .iter()
        .map(|r| {
            let mut bits = vec![0u64; words];
            for &i in &chosen {
                if dot(&ineqs[i], r).is_zero() {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            bits
        })
        .collect();

    let inserted_mask = {
        let mut bits = vec![0u64; words];
        for &i in &chosen {
            bits[i / 64] |= 1 << (i % 64);
        }
        bits
    };
    let mut inserted = inserted_mask;

    for &i in &order {
        if inserted[i / 64] >> (i % 64) & 1 == 1 {
            continue;
        }
        inserted[i / 64] |= 1 << (i % 64);
        let a = &ineqs[i];
        let values: Vec<BigInt> = rays.iter().map(|r| dot(a, r)).collect();
        if values.iter().all(|v| !v.is_negative()) {
            for (r, v) in values.iter().enumerate() {
                if v.is_zero() {
                    zero_sets[r][i / 64] |= 1 << (i % 64);
                }
            }
            continue;
        }
        let mut next_rays: Vec<Vec<BigInt>> = Vec::new();
        let mut next_zero: Vec<Vec<u64>> = Vec::new();
        for (r, v) in values.iter().enumerate() {
            if !v.is_negative() {
                let mut z = zero_sets[r].clone();
                if v.is_zero() {
                    z[i / 64] |= 1 << (i % 64);
                }
                next_rays.push(rays[r].clone());
                next_zero.push(z);
            }
        }
        for (p, vp) in values.iter().enumerate() {
            if !vp.is_positive() {
                continue;
            }
            for (q, vq) in values.iter().enumerate() {
                if !vq.is_negative() {
                    continue;
                }
                // adjacency: no third ray's zero set contains the meet
                let meet: Vec<u64> = zero_sets[p]
                    .iter()
                    .zip(&zero_sets[q])
                    .map(|(a, b)| a & b)
                    .collect();
                let dominated = (0..rays.len()).any(|t| {
                    t != p
                        && t != q
                        && meet.iter().zip(&zero_sets[t]).all(|(mw, tw)| mw & tw == *mw)
                });
                if dominated {
                    continue;
                }
                // vp * ray_q - vq * ray_p is zero on a and feasible
                let mut new_ray: Vec<BigInt> = rays[p]
                    .iter()
                    .zip(&rays[q])
                    .map(|(rp, rq)| vp * rq - vq * rp)
                    .collect();
                reduce_content(&mut new_ray);
                let mut z: Vec<u64> = meet;
                z[i / 64] |= 1 << (i % 64);
                next_rays.push(new_ray);
                next_zero.push(z);
            }
        }
        rays = next_rays;
        zero_sets = next_zero;
    }

    // assemble facets with exact incidence over all inequalities
    let mut facets: Vec<DdFacet> = rays
        .into_iter()
        .map(|normal| {
            let incident: Vec<usize> =
                (0..m).filter(|&j| dot(&ineqs[j], &normal).is_zero()).collect();
            DdFacet { normal, incident }
        })
        .collect();
    facets.sort_by(|a, b| a.incident.cmp(&b.incident));
    debug_assert!({
        let mut seen: Vec<&[usize]> = facets.iter().map(|f| f.incident.as_slice()).collect();
        seen.dedup();
        seen.len() == facets.len()
    });
    Ok(facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplicial_cone() {
        let rays = vec![vec![1i64, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let cf = cone_facets_raw(&rays).unwrap();
        assert_eq!(cf.rank, 3);
        assert_eq!(cf.facets.len(), 3);
        for f in &cf.facets {
            assert_eq!(f.incident.len(), 2);
        }
    }

    #[test]
    fn square_cone() {
        // four rays of a square-based cone in R^3
        let rays = vec![
            vec![1i64, 1, 1],
            vec![-1, 1, 1],
            vec![1, -1, 1],
            vec![-1, -1, 1],
        ];
        let cf = cone_facets_raw(&rays).unwrap();
        assert_eq!(cf.facets.len(), 4);
        for f in &cf.facets {
            assert_eq!(f.incident.len(), 2);
        }
    }

    #[test]
    fn degenerate_rejected() {
        let rays = vec![vec![1i64, 0], vec![2, 0]];
        assert!(matches!(cone_facets_raw(&rays), Err(VoronoiError::DegenerateCone)));
    }

    #[test]
    fn lower_dimensional_cone_in_big_space() {
        // 3 rays spanning a 3-dim subspace of R^6
        let rays = vec![
            vec![1i64, 0, 0, 1, 0, 0],
            vec![0, 1, 0, 1, 0, 0],
            vec![0, 0, 1, 1, 0, 0],
        ];
        let cf = cone_facets_raw(&rays).unwrap();
        assert_eq!(cf.rank, 3);
        assert_eq!(cf.facets.len(), 3);
    }
}
