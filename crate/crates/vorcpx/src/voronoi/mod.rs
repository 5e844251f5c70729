//! Classification of perfect forms by the neighbor walk over facets of
//! perfect cones.

mod dd;
mod walk;

pub use dd::{cone_facets_raw, ConeFacets, DdFacet};
pub use walk::contiguous_form;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use thiserror::Error;

use crate::forms::GramForm;
use crate::isometry::forms_equivalent;
use crate::linalg::{rank1_vec, Mat};
use crate::Group;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VoronoiError {
    #[error("cone spans dimension below two")]
    DegenerateCone,
    #[error("contiguity walk exceeded its iteration bound")]
    WalkDiverged,
    #[error("isometry backtracking failed: {0}")]
    Isometry(String),
}

impl From<crate::isometry::IsometryError> for VoronoiError {
    fn from(e: crate::isometry::IsometryError) -> Self {
        VoronoiError::Isometry(e.to_string())
    }
}

/// A facet of a perfect cone: integral primitive inner normal, vanishing on
/// the incident rays and positive on the rest.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: Mat<BigInt>,
    pub incident: Vec<usize>,
}

/// The cone over the minimal vectors of a perfect form.
pub struct PerfectCone {
    pub form: GramForm,
    /// minimal vector ±pair representatives, normalized and sorted
    pub pairs: Vec<Vec<i64>>,
    /// rank-one forms of the pairs
    pub rays: Vec<Mat<i64>>,
    pub facets: Vec<Facet>,
}

/// Facets of the cone spanned by the rank-one forms of `pairs`, as symmetric
/// integral normal matrices (full-dimensional cones only).
pub fn cone_facets(form: &GramForm) -> Result<PerfectCone, VoronoiError> {
    let (_, pairs) = form.minimal_vectors();
    let pairs: Vec<Vec<i64>> = pairs.vectors().to_vec();
    let n = form.dim();
    let coords: Vec<Vec<i64>> = pairs.iter().map(|v| rank1_vec(v)).collect();
    let raw = cone_facets_raw(&coords)?;
    let dim = crate::linalg::sym_dim(n);
    if raw.rank != dim {
        return Err(VoronoiError::DegenerateCone);
    }
    let facets = raw
        .facets
        .iter()
        .map(|f| {
            // span rows cover every coordinate here; lift and symmetrize
            let mut full = vec![BigInt::from(0); dim];
            for (k, &row) in raw.span_rows.iter().enumerate() {
                full[row] = f.normal[k].clone();
            }
            let normal = normal_to_sym(n, &full);
            Facet { normal, incident: f.incident.clone() }
        })
        .collect();
    let rays = pairs.iter().map(|v| crate::forms::vhat(v).expect("nonzero")).collect();
    Ok(PerfectCone { form: form.clone(), pairs, rays, facets })
}

/// Functional coordinates to a symmetric matrix: with the rank-one
/// vectorization (v_i^2, 2 v_i v_j), a functional eta pairs with vhat(v) as
/// v^t Q v for Q_ii = eta_i and Q_ij = eta_ij.
fn normal_to_sym(n: usize, coords: &[BigInt]) -> Mat<BigInt> {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = coords[i].clone();
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = coords[k].clone();
            m[(j, i)] = coords[k].clone();
            k += 1;
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct WalkOptions {
    /// iteration bound per facet crossing; exceeding it signals a bug
    pub max_iters: usize,
    /// stop expanding new cones after this much wall time
    pub time_budget: Option<Duration>,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions { max_iters: 256, time_budget: None }
    }
}

/// Result of the classification walk.
pub struct Classification {
    pub group: Group,
    pub rank: usize,
    pub reps: Vec<GramForm>,
    /// false when a time budget stopped the closure early
    pub complete: bool,
}

/// Classifies perfect forms of the given rank up to the group action by
/// breadth-first closure under the contiguity walk, seeded at the A_N form.
/// Cheaper cones (fewer minimal vectors) are expanded first so that a time
/// budget still discovers many classes.
pub fn classify_perfect_forms(
    rank: usize,
    group: Group,
    opts: &WalkOptions,
) -> Result<Classification, VoronoiError> {
    assert!((2..=8).contains(&rank), "rank out of supported range");
    let start = Instant::now();
    let seed = GramForm::a_n(rank).primitive();
    let mut reps: Vec<GramForm> = vec![seed.clone()];
    let mut keys: Vec<(BigInt, i64, usize)> = vec![form_key(&seed)];
    // queue of rep indices, cheapest pair count first, then discovery order
    let mut queue: std::collections::BinaryHeap<std::cmp::Reverse<(usize, usize)>> =
        Default::default();
    queue.push(std::cmp::Reverse((seed.minimal_vectors().1.len(), 0)));
    let mut complete = true;
    while let Some(std::cmp::Reverse((_, idx))) = queue.pop() {
        if let Some(budget) = opts.time_budget {
            if start.elapsed() > budget {
                complete = false;
                break;
            }
        }
        let cone = cone_facets(&reps[idx].clone())?;
        // walking one facet per stabilizer orbit reaches the same classes
        let stab = crate::isometry::automorphisms(
            &cone.form,
            &cone.form.minimal_vectors().1.clone(),
            group,
        )?;
        let orbit_reps = facet_orbit_reps(&cone.facets, cone.pairs.len(), &stab.generators);
        log::debug!(
            "expanding rank-{rank} class {idx}: {} pairs, {} facets, {} orbits",
            cone.pairs.len(),
            cone.facets.len(),
            orbit_reps.len()
        );
        for fi in orbit_reps {
            if let Some(budget) = opts.time_budget {
                if start.elapsed() > budget {
                    complete = false;
                    break;
                }
            }
            let neighbor = contiguous_form(&cone, fi, opts.max_iters)?.primitive();
            let key = form_key(&neighbor);
            let mut known = false;
            for (i, rep) in reps.iter().enumerate() {
                if keys[i] == key && forms_equivalent(rep, &neighbor, group)?.is_some() {
                    known = true;
                    break;
                }
            }
            if !known {
                let pair_count = neighbor.minimal_vectors().1.len();
                reps.push(neighbor);
                keys.push(key);
                queue.push(std::cmp::Reverse((pair_count, reps.len() - 1)));
            }
        }
        if !complete {
            break;
        }
    }
    reps.sort_by_key(|f| {
        let rows: Vec<i64> = f.gram().rows().flat_map(|r| r.iter().copied()).collect();
        (f.det(), f.minimal_vectors().1.len(), rows)
    });
    Ok(Classification { group, rank, reps, complete })
}

fn form_key(f: &GramForm) -> (BigInt, i64, usize) {
    (f.det(), f.min(), f.minimal_vectors().1.len())
}

/// One facet index per orbit of the pair-permutation action.
fn facet_orbit_reps(
    facets: &[Facet],
    npairs: usize,
    gens: &[crate::isometry::Perm],
) -> Vec<usize> {
    let mut seen: std::collections::HashSet<Vec<u32>> = Default::default();
    let mut reps = Vec::new();
    for (fi, f) in facets.iter().enumerate() {
        let key: Vec<u32> = f.incident.iter().map(|&i| i as u32).collect();
        if seen.contains(&key) {
            continue;
        }
        reps.push(fi);
        let mut queue = vec![key.clone()];
        seen.insert(key);
        while let Some(s) = queue.pop() {
            for g in gens {
                let mut img: Vec<u32> =
                    s.iter().map(|&i| (g.apply(i as usize) % npairs) as u32).collect();
                img.sort_unstable();
                if seen.insert(img.clone()) {
                    queue.push(img);
                }
            }
        }
    }
    reps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(rank: usize) -> Classification {
        classify_perfect_forms(rank, Group::Gl, &WalkOptions::default()).unwrap()
    }

    #[test]
    fn rank2_single_class() {
        let c = classify(2);
        assert!(c.complete);
        assert_eq!(c.reps.len(), 1);
        // the neighbor of the hexagonal form across any facet stays in class
        let cone = cone_facets(&c.reps[0]).unwrap();
        assert_eq!(cone.facets.len(), 3);
        for fi in 0..3 {
            let nb = contiguous_form(&cone, fi, 256).unwrap();
            assert!(forms_equivalent(&c.reps[0], &nb.primitive(), Group::Gl)
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn rank3_single_class() {
        assert_eq!(classify(3).reps.len(), 1);
    }

    #[test]
    fn rank4_two_classes() {
        let c = classify(4);
        assert_eq!(c.reps.len(), 2);
        for f in &c.reps {
            assert!(f.is_perfect());
        }
    }

    #[test]
    fn rank5_three_classes() {
        let c = classify(5);
        assert_eq!(c.reps.len(), 3);
        let pair_counts: Vec<usize> =
            c.reps.iter().map(|f| f.minimal_vectors().1.len()).collect();
        assert!(pair_counts.contains(&20), "one class has 20 pairs, got {pair_counts:?}");
    }

    #[test]
    fn d4_walks_to_second_class() {
        let d4 = crate::forms::GramForm::from_rows(vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ])
        .unwrap();
        assert!(d4.is_perfect());
        let a4 = GramForm::a_n(4);
        let cone = cone_facets(&d4).unwrap();
        let mut found_other = false;
        for fi in 0..cone.facets.len() {
            let nb = contiguous_form(&cone, fi, 256).unwrap().primitive();
            if forms_equivalent(&a4, &nb, Group::Gl).unwrap().is_some() {
                found_other = true;
                break;
            }
        }
        assert!(found_other, "some facet neighbor of D4 is the A4 class");
    }

    #[test]
    fn contiguity_is_symmetric() {
        // walking back across the shared facet returns to the start class
        for rank in [2usize, 3] {
            let c = classify(rank);
            for rep in &c.reps {
                let cone = cone_facets(rep).unwrap();
                for fi in 0..cone.facets.len() {
                    let nb = contiguous_form(&cone, fi, 256).unwrap().primitive();
                    let nb_cone = cone_facets(&nb).unwrap();
                    let mut back_classes = Vec::new();
                    for fj in 0..nb_cone.facets.len() {
                        let back = contiguous_form(&nb_cone, fj, 256).unwrap().primitive();
                        back_classes
                            .push(forms_equivalent(rep, &back, Group::Gl).unwrap().is_some());
                    }
                    assert!(back_classes.iter().any(|&b| b));
                }
            }
        }
    }

    #[test]
    fn facet_oracle_small_ranks() {
        // independent facet check: a closed corank-one subset of rays is a
        // facet iff the (unique up to sign) functional vanishing on it keeps
        // every other ray strictly on one side
        use num_traits::{Signed, Zero};
        for rank in [2usize, 3] {
            let c = classify(rank);
            for rep in &c.reps {
                let cone = cone_facets(rep).unwrap();
                let coords: Vec<Vec<i64>> =
                    cone.pairs.iter().map(|v| crate::linalg::rank1_vec(v)).collect();
                let full_rank = crate::linalg::vector_rank(&coords);
                assert_eq!(full_rank, crate::linalg::sym_dim(rank));
                let mut facet_sets: Vec<Vec<usize>> = Vec::new();
                for mask in 1u32..(1 << coords.len()) {
                    let subset: Vec<usize> =
                        (0..coords.len()).filter(|i| mask >> i & 1 == 1).collect();
                    let sub: Vec<Vec<i64>> = subset.iter().map(|&i| coords[i].clone()).collect();
                    if crate::linalg::vector_rank(&sub) != full_rank - 1 {
                        continue;
                    }
                    // closure: exactly the rays inside the span
                    let closure: Vec<usize> = (0..coords.len())
                        .filter(|&i| {
                            let mut ext = sub.clone();
                            ext.push(coords[i].clone());
                            crate::linalg::vector_rank(&ext) == full_rank - 1
                        })
                        .collect();
                    if closure != subset || facet_sets.contains(&subset) {
                        continue;
                    }
                    // functional vanishing on the subset, as a kernel vector
                    let m = crate::linalg::SparseMat::from_dense_rows(&sub);
                    let kernel = crate::linalg::kernel_basis(&m);
                    assert_eq!(kernel.len(), 1, "full-dimensional cone");
                    let eta = &kernel[0];
                    let values: Vec<num_bigint::BigInt> = coords
                        .iter()
                        .map(|r| {
                            r.iter()
                                .zip(eta)
                                .map(|(a, b)| b * num_bigint::BigInt::from(*a))
                                .sum()
                        })
                        .collect();
                    let pos = values.iter().any(|v| v.is_positive());
                    let neg = values.iter().any(|v| v.is_negative());
                    if pos && neg {
                        continue; // not supporting
                    }
                    assert!(subset.iter().all(|&i| values[i].is_zero()));
                    facet_sets.push(subset);
                }
                facet_sets.sort();
                let mut dd_sets: Vec<Vec<usize>> =
                    cone.facets.iter().map(|f| f.incident.clone()).collect();
                dd_sets.sort();
                assert_eq!(dd_sets, facet_sets);
            }
        }
    }
}
