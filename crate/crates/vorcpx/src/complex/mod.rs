//! The Voronoi cell complex: representatives of well-rounded cells modulo
//! GL_N(Z) or SL_N(Z), with stabilizers, orientations and face incidences.

mod build;
mod io;

pub use build::{enumerate_cells, BuildOptions, FacesMode};
pub use io::{read_complex, write_complex};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::forms::config_form;
use crate::isometry::{scan_stabilizer, IsometryWitness, PairSystem, StabilizerScan};
use crate::linalg::{rank1_vec, span_data, Mat, SpanData};
use crate::Group;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("a facet leads outside the supplied classification")]
    IncompleteClassification,
    #[error("classification is incomplete (budget-limited); refusing to build")]
    PartialClassification,
    #[error("matrix does not stabilize the cell")]
    NotStabilizing,
    #[error("candidate is not a face of the cell")]
    NotAFace,
    #[error("witness does not map the representative onto the face")]
    WitnessInvalid,
    #[error("isometry error: {0}")]
    Isometry(String),
    #[error("cone error: {0}")]
    Voronoi(String),
    #[error("complex file: {0}")]
    Parse(String),
}

impl From<crate::isometry::IsometryError> for ComplexError {
    fn from(e: crate::isometry::IsometryError) -> Self {
        ComplexError::Isometry(e.to_string())
    }
}

impl From<crate::voronoi::VoronoiError> for ComplexError {
    fn from(e: crate::voronoi::VoronoiError) -> Self {
        ComplexError::Voronoi(e.to_string())
    }
}

/// Equivalence-invariant key: dimension, determinant of the configuration
/// form, and the multiset of its values on the cell's vectors. Equal keys are
/// necessary (not sufficient) for equivalence.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct CellKey {
    pub dim: usize,
    pub det: BigInt,
    pub values: Vec<i64>,
}

/// A representative cell, described by the ±pairs of its minimal vectors.
pub struct Cell {
    /// normalized (first nonzero positive), lexicographically sorted
    pub pairs: Vec<Vec<i64>>,
    /// cell dimension: dim R(sigma) - 1
    pub dim: usize,
    /// configuration form b = sum of rank-one forms over the pairs
    pub config: Mat<i64>,
    pub key: CellKey,
    /// span of the rank-one coordinates; `span.basis` is the orientation
    /// basis (lexicographically first independent pairs), whose order fixes
    /// the reference orientation
    pub span: SpanData,
    /// full stabilizer data for both groups
    pub scan: StabilizerScan,
    /// true when every stabilizer generator (in the complex's group)
    /// preserves the reference orientation
    pub orientable: bool,
    /// positive definite configuration form, i.e. the cell meets X_N
    pub well_rounded: bool,
    /// index of the perfect-form class whose top cone first produced this
    /// representative
    pub host: usize,
}

impl Cell {
    /// Builds a representative from its pair set; `group` decides which
    /// stabilizer drives orientability.
    pub fn build(
        pairs: Vec<Vec<i64>>,
        host: usize,
        ambient: usize,
        group: Group,
    ) -> Result<Cell, ComplexError> {
        let config = config_form(&pairs);
        let well_rounded = config.is_positive_definite();
        let coords: Vec<Vec<i64>> = pairs.iter().map(|v| rank1_vec(v)).collect();
        let span = span_data(&coords);
        let dim = span.rank() - 1;
        let key = canonical_key_parts(dim, &config, &pairs);
        let sys = PairSystem::new(pairs.clone(), &adjugate_pairing(&config));
        let b = config.clone();
        let verify = move |phi: &Mat<i64>| phi.mul(&b).mul(&phi.transpose()) == b;
        let mut scan = scan_stabilizer(&sys, ambient, &verify)?;
        for pg in [&mut scan.gl, &mut scan.sl] {
            pg.generator_orientation_signs = pg
                .generator_matrices
                .iter()
                .map(|m| orientation_sign_raw(m, &pairs, &span))
                .collect();
        }
        let orientable = well_rounded
            && group_perm(&scan, group)
                .generator_orientation_signs
                .iter()
                .all(|&s| s == 1);
        Ok(Cell {
            pairs,
            dim,
            config,
            key,
            span,
            scan,
            orientable,
            well_rounded,
            host,
        })
    }

    pub fn npairs(&self) -> usize {
        self.pairs.len()
    }

    /// Stabilizer order in the chosen group (matrix group, including -Id
    /// when it belongs to the group).
    pub fn stabilizer_order(&self, group: Group) -> &BigInt {
        match group {
            Group::Gl => &self.scan.gl_order,
            Group::Sl => &self.scan.sl_order,
        }
    }

    pub fn orientation_basis(&self) -> &[usize] {
        &self.span.basis
    }

    pub(crate) fn pair_system(&self) -> PairSystem {
        PairSystem::new(self.pairs.clone(), &adjugate_pairing(&self.config))
    }
}

fn group_perm(scan: &StabilizerScan, group: Group) -> &crate::isometry::PermGroup {
    match group {
        Group::Gl => &scan.gl,
        Group::Sl => &scan.sl,
    }
}

/// Pairing preserved by cell isometries: the adjugate of the configuration
/// form (det * inverse), which stays integral.
pub(crate) fn adjugate_pairing(config: &Mat<i64>) -> Mat<BigInt> {
    config.to_big().adjugate()
}

fn canonical_key_parts(dim: usize, config: &Mat<i64>, pairs: &[Vec<i64>]) -> CellKey {
    let det = config.to_big().det();
    let mut values: Vec<i64> = pairs
        .iter()
        .map(|v| config.eval_form(v).to_i64().expect("configuration value fits i64"))
        .collect();
    values.sort_unstable();
    CellKey { dim, det, values }
}

/// Equivalence-invariant key of a cell given by its pair set.
pub fn canonical_key(pairs: &[Vec<i64>]) -> CellKey {
    let config = config_form(pairs);
    let coords: Vec<Vec<i64>> = pairs.iter().map(|v| rank1_vec(v)).collect();
    let dim = crate::linalg::vector_rank(&coords) - 1;
    canonical_key_parts(dim, &config, pairs)
}

/// Sign of the orientation action of phi on the span of the cell's rank-one
/// forms: the map q -> phi q phi^t restricted to R(sigma).
fn orientation_sign_raw(phi: &Mat<i64>, pairs: &[Vec<i64>], span: &SpanData) -> i8 {
    let images: Vec<Vec<BigInt>> = span
        .basis
        .iter()
        .map(|&b| {
            let v = &pairs[b];
            let n = v.len();
            let img: Vec<i64> =
                (0..n).map(|r| (0..n).map(|c| phi[(r, c)] * v[c]).sum()).collect();
            rank1_vec(&img).iter().map(|&x| BigInt::from(x)).collect()
        })
        .collect();
    span.det_sign(&images).expect("stabilizer preserves the span")
}

/// Sign of the determinant of q -> phi q phi^t restricted to R(sigma), for a
/// matrix phi whose action permutes the ±pairs of the cell.
pub fn orientation_sign(phi: &Mat<i64>, cell: &Cell) -> Result<i8, ComplexError> {
    // phi must permute the pairs
    let mut mapped: Vec<Vec<i64>> = cell
        .pairs
        .iter()
        .map(|v| {
            let n = v.len();
            let mut w: Vec<i64> =
                (0..n).map(|r| (0..n).map(|c| phi[(r, c)] * v[c]).sum()).collect();
            crate::num::normalize_signs(&mut w);
            w
        })
        .collect();
    mapped.sort();
    if mapped != cell.pairs {
        return Err(ComplexError::NotStabilizing);
    }
    Ok(orientation_sign_raw(phi, &cell.pairs, &cell.span))
}

/// A face of a representative cell, as a subset of its pair indices, with
/// the representative it is equivalent to and a witness mapping.
pub struct FaceRecord {
    pub subset: Vec<u32>,
    /// index into the level one dimension down; None for boundary faces
    pub rep: Option<u32>,
    /// phi with phi(pairs of rep) = ±(pairs of face); identity for the face
    /// that became the representative itself
    pub witness: Option<Mat<i64>>,
}

/// The assembled complex: per-dimension representative lists plus the face
/// records of every representative.
pub struct VoronoiComplex {
    pub n: usize,
    pub group: Group,
    pub levels: BTreeMap<usize, Vec<Cell>>,
    /// keyed by (dim, index in level)
    pub faces: BTreeMap<(usize, usize), Vec<FaceRecord>>,
}

impl VoronoiComplex {
    pub fn top_dim(&self) -> usize {
        crate::top_dim(self.n)
    }

    pub fn bottom_dim(&self) -> usize {
        self.n - 1
    }

    pub fn level(&self, dim: usize) -> &[Cell] {
        self.levels.get(&dim).map_or(&[], |v| v.as_slice())
    }

    /// Cells of Sigma_n (the orientable sublist), as indices into the level.
    pub fn orientable_indices(&self, dim: usize) -> Vec<usize> {
        self.level(dim)
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.orientable.then_some(i))
            .collect()
    }

    pub fn sigma_star_count(&self, dim: usize) -> usize {
        self.level(dim).len()
    }

    pub fn sigma_count(&self, dim: usize) -> usize {
        self.orientable_indices(dim).len()
    }

    /// Exact stabilizer orders of all representatives, for both groups.
    pub fn stabilizer_order_table(&self) -> BTreeMap<(usize, usize), (BigInt, BigInt)> {
        let mut out = BTreeMap::new();
        for (&dim, cells) in &self.levels {
            for (i, c) in cells.iter().enumerate() {
                out.insert((dim, i), (c.scan.gl_order.clone(), c.scan.sl_order.clone()));
            }
        }
        out
    }
}

/// Searches for a witness mapping cell `c1` onto cell `c2`: a matrix phi
/// with phi(pairs of c1) = ±(pairs of c2), phi b1 phi^t = b2, det phi = +1
/// when the group is SL. Keys are compared first.
pub fn cells_equivalent(
    c1: &Cell,
    c2_pairs: &[Vec<i64>],
    group: Group,
) -> Result<Option<Mat<i64>>, ComplexError> {
    if c1.key != canonical_key(c2_pairs) {
        return Ok(None);
    }
    let sys2 = PairSystem::new(c2_pairs.to_vec(), &adjugate_pairing(&config_form(c2_pairs)));
    cells_equivalent_sys(c1, &c1.pair_system(), &sys2, &config_form(c2_pairs), group)
}

/// Engine-level variant used by the builder, with precomputed systems.
pub(crate) fn cells_equivalent_sys(
    c1: &Cell,
    sys1: &PairSystem,
    sys2: &PairSystem,
    config2: &Mat<i64>,
    group: Group,
) -> Result<Option<Mat<i64>>, ComplexError> {
    use std::ops::ControlFlow;
    let b1 = c1.config.clone();
    let b2 = config2.clone();
    let verify = move |phi: &Mat<i64>| phi.mul(&b1).mul(&phi.transpose()) == b2;
    let mut witness: Option<Mat<i64>> = None;
    crate::isometry::search_isometries(sys1, sys2, &verify, &mut |leaf| {
        witness = Some(leaf.phi);
        ControlFlow::Break(())
    })
    .map_err(|e| ComplexError::Isometry(format!("{e:?}")))?;
    let Some(phi) = witness else {
        return Ok(None);
    };
    if group == Group::Gl {
        return Ok(Some(phi));
    }
    if phi.to_big().det() == BigInt::from(1) {
        return Ok(Some(phi));
    }
    // compose with a det -1 automorphism of the representative, if any
    match &c1.scan.neg_det_auto {
        Some(alpha) => Ok(Some(phi.mul(alpha))),
        None => Ok(None),
    }
}

/// Checks a stored witness exactly: phi maps the representative's pairs onto
/// the face's pairs and transports the configuration form.
pub fn verify_witness(
    rep: &Cell,
    face_pairs: &[Vec<i64>],
    phi: &Mat<i64>,
) -> Result<(), ComplexError> {
    let mut mapped: Vec<Vec<i64>> = rep
        .pairs
        .iter()
        .map(|v| {
            let n = v.len();
            let mut w: Vec<i64> =
                (0..n).map(|r| (0..n).map(|c| phi[(r, c)] * v[c]).sum()).collect();
            crate::num::normalize_signs(&mut w);
            w
        })
        .collect();
    mapped.sort();
    let mut target = face_pairs.to_vec();
    target.sort();
    if mapped != target {
        return Err(ComplexError::WitnessInvalid);
    }
    let b2 = config_form(face_pairs);
    if phi.mul(&rep.config).mul(&phi.transpose()) != b2 {
        return Err(ComplexError::WitnessInvalid);
    }
    Ok(())
}

/// The IsometryWitness in the group-action convention gamma^t b gamma = b'.
pub fn witness_to_group_element(phi: &Mat<i64>) -> IsometryWitness {
    let det = phi.to_big().det().to_i64().expect("unimodular");
    IsometryWitness { matrix: phi.transpose(), det: det as i8 }
}
