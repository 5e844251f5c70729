//! Top-down construction of the cell complex from the perfect-form
//! classification.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::forms::config_form;
use crate::isometry::PairSystem;
use crate::linalg::rank1_vec;
use crate::voronoi::{cone_facets_raw, Classification};
use crate::Group;

use super::{
    adjugate_pairing, canonical_key, cells_equivalent_sys, Cell, CellKey, ComplexError,
    FaceRecord, VoronoiComplex,
};

/// How faces of a representative are generated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FacesMode {
    /// double description on the cell's own rays (default)
    Dd,
    /// intersections with the facets of the host perfect cone (cross-check)
    Intersect,
}

impl FacesMode {
    pub fn parse(s: &str) -> Option<FacesMode> {
        match s {
            "dd" => Some(FacesMode::Dd),
            "intersect" => Some(FacesMode::Intersect),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub faces: FacesMode,
    /// verify that each top-cone facet walks to a known class
    pub verify_neighbors: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { faces: FacesMode::Dd, verify_neighbors: false }
    }
}

/// Facet pair-subsets of a cell, each a sorted list of indices into `pairs`.
fn facets_of_cell(
    pairs: &[Vec<i64>],
    mode: FacesMode,
    host_facet_sets: &[Vec<Vec<i64>>],
    own_rank: usize,
) -> Result<Vec<Vec<u32>>, ComplexError> {
    match mode {
        FacesMode::Dd => {
            let coords: Vec<Vec<i64>> = pairs.iter().map(|v| rank1_vec(v)).collect();
            let cf = cone_facets_raw(&coords)?;
            Ok(cf
                .facets
                .into_iter()
                .map(|f| f.incident.iter().map(|&i| i as u32).collect())
                .collect())
        }
        FacesMode::Intersect => {
            // every facet of a face of the host cone is its intersection
            // with a host facet; keep the corank-one intersections
            let mut out: Vec<Vec<u32>> = Vec::new();
            for fs in host_facet_sets {
                let subset: Vec<u32> = pairs
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| fs.binary_search(v).is_ok().then_some(i as u32))
                    .collect();
                if subset.is_empty() {
                    continue;
                }
                let sub_coords: Vec<Vec<i64>> =
                    subset.iter().map(|&i| rank1_vec(&pairs[i as usize])).collect();
                if crate::linalg::vector_rank(&sub_coords) == own_rank - 1
                    && !out.contains(&subset)
                {
                    out.push(subset);
                }
            }
            out.sort();
            Ok(out)
        }
    }
}

/// Builds the complex of well-rounded cells modulo the group action.
///
/// Levels run top-down from d(N) to N-1. Candidates at each level are the
/// facets of the representatives one level up, reduced by the equivalence
/// test; non-well-rounded faces lie on the boundary and are recorded but not
/// represented. The result is deterministic: representative order is the
/// first-discovery order under a fixed scan.
pub fn enumerate_cells(
    classification: &Classification,
    group: Group,
    opts: &BuildOptions,
) -> Result<VoronoiComplex, ComplexError> {
    if !classification.complete {
        return Err(ComplexError::PartialClassification);
    }
    let n = classification.rank;
    let top = crate::top_dim(n);
    let mut levels: BTreeMap<usize, Vec<Cell>> = BTreeMap::new();
    let mut faces: BTreeMap<(usize, usize), Vec<FaceRecord>> = BTreeMap::new();

    // top cells: one per perfect-form class
    let mut top_cells = Vec::new();
    for (host, form) in classification.reps.iter().enumerate() {
        let (_, pairs) = form.minimal_vectors();
        let cell = Cell::build(pairs.vectors().to_vec(), host, n, group)?;
        debug_assert_eq!(cell.dim, top);
        top_cells.push(cell);
    }
    if opts.verify_neighbors {
        verify_neighbors(classification, group)?;
    }
    // host facet pair-sets for the intersect mode
    let host_facet_sets: Vec<Vec<Vec<Vec<i64>>>> = if opts.faces == FacesMode::Intersect {
        top_cells
            .iter()
            .map(|cell| {
                let coords: Vec<Vec<i64>> = cell.pairs.iter().map(|v| rank1_vec(v)).collect();
                let cf = cone_facets_raw(&coords)?;
                Ok(cf
                    .facets
                    .iter()
                    .map(|f| {
                        let mut set: Vec<Vec<i64>> =
                            f.incident.iter().map(|&i| cell.pairs[i].clone()).collect();
                        set.sort();
                        set
                    })
                    .collect())
            })
            .collect::<Result<_, ComplexError>>()?
    } else {
        vec![Vec::new(); top_cells.len()]
    };
    levels.insert(top, top_cells);

    for dim in (n..=top).rev() {
        let level_len = levels[&dim].len();
        log::info!("{group}{n} level {dim}: {level_len} representatives");
        // candidate face subsets per representative, generated in parallel
        let parents: Vec<(Vec<Vec<i64>>, usize, usize)> = levels[&dim]
            .iter()
            .map(|c| (c.pairs.clone(), c.host, c.span.rank()))
            .collect();
        let facet_lists: Vec<Vec<Vec<u32>>> = parents
            .par_iter()
            .map(|(pairs, host, rank)| {
                facets_of_cell(pairs, opts.faces, &host_facet_sets[*host], *rank)
            })
            .collect::<Result<_, _>>()?;

        let mut registry: HashMap<CellKey, Vec<usize>> = HashMap::new();
        let mut next_level: Vec<Cell> = Vec::new();
        let mut next_systems: Vec<PairSystem> = Vec::new();
        for (ci, facet_list) in facet_lists.iter().enumerate() {
            let parent_pairs = parents[ci].0.clone();
            let host = parents[ci].1;
            let mut records: Vec<FaceRecord> = Vec::new();
            // precompute candidate data in parallel: keys, systems, configs
            let prepared: Vec<(Vec<Vec<i64>>, crate::linalg::Mat<i64>, bool, CellKey)> =
                facet_list
                    .par_iter()
                    .map(|subset| {
                        let fp: Vec<Vec<i64>> =
                            subset.iter().map(|&i| parent_pairs[i as usize].clone()).collect();
                        let config = config_form(&fp);
                        let wr = config.is_positive_definite();
                        let key = canonical_key(&fp);
                        (fp, config, wr, key)
                    })
                    .collect();
            for (subset, (face_pairs, config, well_rounded, key)) in
                facet_list.iter().zip(prepared)
            {
                if !well_rounded {
                    records.push(FaceRecord {
                        subset: subset.clone(),
                        rep: None,
                        witness: None,
                    });
                    continue;
                }
                let sys2 = PairSystem::new(face_pairs.clone(), &adjugate_pairing(&config));
                let mut matched: Option<(usize, crate::linalg::Mat<i64>)> = None;
                if let Some(bucket) = registry.get(&key) {
                    for &ri in bucket {
                        if let Some(phi) = cells_equivalent_sys(
                            &next_level[ri],
                            &next_systems[ri],
                            &sys2,
                            &config,
                            group,
                        )? {
                            matched = Some((ri, phi));
                            break;
                        }
                    }
                }
                let (rep, witness) = match matched {
                    Some((ri, phi)) => (ri, phi),
                    None => {
                        let cell = Cell::build(face_pairs.clone(), host, n, group)?;
                        debug_assert_eq!(cell.dim + 1, dim);
                        let sys = cell.pair_system();
                        registry.entry(key).or_default().push(next_level.len());
                        next_level.push(cell);
                        next_systems.push(sys);
                        let id = crate::linalg::Mat::identity(n);
                        (next_level.len() - 1, id)
                    }
                };
                debug_assert!(
                    super::verify_witness(&next_level[rep], &face_pairs, &witness).is_ok()
                );
                records.push(FaceRecord {
                    subset: subset.clone(),
                    rep: Some(rep as u32),
                    witness: Some(witness),
                });
            }
            faces.insert((dim, ci), records);
        }
        levels.insert(dim - 1, next_level);
    }
    Ok(VoronoiComplex { n, group, levels, faces })
}

/// Recomputes the face records of a complex whose representative cells are
/// already fixed (used after reading a complex from its file form). Every
/// well-rounded face must match a stored representative one level down.
pub(crate) fn attach_faces(mut cx: VoronoiComplex) -> Result<VoronoiComplex, ComplexError> {
    let bottom = *cx.levels.keys().next().expect("nonempty complex");
    let dims: Vec<usize> = cx.levels.keys().copied().collect();
    let mut faces = BTreeMap::new();
    for &dim in dims.iter().rev() {
        if dim == bottom {
            break;
        }
        let lower = &cx.levels[&(dim - 1)];
        let lower_systems: Vec<PairSystem> = lower.par_iter().map(|c| c.pair_system()).collect();
        let mut lower_by_key: HashMap<&CellKey, Vec<usize>> = HashMap::new();
        for (i, c) in lower.iter().enumerate() {
            lower_by_key.entry(&c.key).or_default().push(i);
        }
        let level = &cx.levels[&dim];
        let level_records: Vec<Vec<FaceRecord>> = level
            .par_iter()
            .map(|cell| -> Result<Vec<FaceRecord>, ComplexError> {
                let facet_list =
                    facets_of_cell(&cell.pairs, FacesMode::Dd, &[], cell.span.rank())?;
                let mut records = Vec::with_capacity(facet_list.len());
                for subset in facet_list {
                    let face_pairs: Vec<Vec<i64>> =
                        subset.iter().map(|&i| cell.pairs[i as usize].clone()).collect();
                    let config = config_form(&face_pairs);
                    if !config.is_positive_definite() {
                        records.push(FaceRecord { subset, rep: None, witness: None });
                        continue;
                    }
                    let key = canonical_key(&face_pairs);
                    let sys2 = PairSystem::new(face_pairs.clone(), &adjugate_pairing(&config));
                    let mut matched = None;
                    for &ri in lower_by_key.get(&key).map_or(&Vec::new(), |v| v) {
                        if let Some(phi) = cells_equivalent_sys(
                            &lower[ri],
                            &lower_systems[ri],
                            &sys2,
                            &config,
                            cx.group,
                        )? {
                            matched = Some((ri, phi));
                            break;
                        }
                    }
                    let Some((rep, witness)) = matched else {
                        return Err(ComplexError::Parse(
                            "face matches no stored representative".to_string(),
                        ));
                    };
                    records.push(FaceRecord {
                        subset,
                        rep: Some(rep as u32),
                        witness: Some(witness),
                    });
                }
                Ok(records)
            })
            .collect::<Result<_, _>>()?;
        for (ci, records) in level_records.into_iter().enumerate() {
            faces.insert((dim, ci), records);
        }
    }
    cx.faces = faces;
    Ok(cx)
}

/// Optional cross-check: every top-cone facet must walk to a form in the
/// classification.
fn verify_neighbors(classification: &Classification, group: Group) -> Result<(), ComplexError> {
    for form in &classification.reps {
        let cone = crate::voronoi::cone_facets(form)?;
        for fi in 0..cone.facets.len() {
            let neighbor = crate::voronoi::contiguous_form(&cone, fi, 256)?.primitive();
            let known = classification.reps.iter().any(|rep| {
                crate::isometry::forms_equivalent(rep, &neighbor, group)
                    .map(|w| w.is_some())
                    .unwrap_or(false)
            });
            if !known {
                return Err(ComplexError::IncompleteClassification);
            }
        }
    }
    Ok(())
}
