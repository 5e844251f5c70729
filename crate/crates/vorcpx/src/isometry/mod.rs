//! Equivalence and automorphisms of integral forms and vector configurations
//! under GL_N(Z) and SL_N(Z).

mod backtrack;
mod perm;

pub use backtrack::{flip_perm, search_isometries, Leaf, PairSystem};
pub use perm::{group_order, Perm, StabChain};

use std::ops::ControlFlow;

use num_bigint::BigInt;
use thiserror::Error;

use crate::forms::{GramForm, MinVecSet};
use crate::linalg::Mat;
use crate::Group;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum IsometryError {
    #[error("forms have different dimensions")]
    DimensionMismatch,
    #[error("vector configuration does not span the space")]
    SpanDeficient,
}

/// A group element taking one form to another: gamma^t b gamma = b'.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsometryWitness {
    pub matrix: Mat<i64>,
    pub det: i8,
}

impl IsometryWitness {
    pub fn verifies(&self, b: &Mat<i64>, b2: &Mat<i64>) -> bool {
        let g = &self.matrix;
        g.transpose().mul(&b.clone()).mul(g) == *b2
    }
}

/// Stabilizer as a permutation group on signed minimal vectors (+v_i at
/// index i, -v_i at npairs + i), which is a faithful representation.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub degree: usize,
    pub generators: Vec<Perm>,
    /// matrix realizing each generator (acts by v -> phi v on vectors)
    pub generator_matrices: Vec<Mat<i64>>,
    pub generator_dets: Vec<i8>,
    /// filled by the cell-complex layer once a reference orientation exists
    pub generator_orientation_signs: Vec<i8>,
    pub order: BigInt,
}

impl PermGroup {
    fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            generator_matrices: Vec::new(),
            generator_dets: Vec::new(),
            generator_orientation_signs: Vec::new(),
            order: BigInt::from(1),
        }
    }
}

/// Full stabilizer scan of a pair configuration: GL and SL permutation
/// groups, exact matrix-group orders, and a negative-determinant element if
/// one exists.
pub struct StabilizerScan {
    pub gl: PermGroup,
    pub sl: PermGroup,
    pub gl_order: BigInt,
    pub sl_order: BigInt,
    pub neg_det_auto: Option<Mat<i64>>,
}

/// Enumerates the full automorphism group of a pair system (one matrix per
/// {phi, -phi} class) and extracts generating sets incrementally.
///
/// `verify` must accept exactly the matrices stabilizing the underlying
/// object; `dim` parity decides how -Id interacts with determinants.
pub fn scan_stabilizer(
    sys: &PairSystem,
    dim: usize,
    verify: &dyn Fn(&Mat<i64>) -> bool,
) -> Result<StabilizerScan, IsometryError> {
    let npairs = sys.len();
    let degree = 2 * npairs;
    let flip = flip_perm(npairs);
    let neg_id = Mat::from_fn(dim, dim, |i, j| if i == j { -1i64 } else { 0 });

    let mut gl_chain = StabChain::new(degree);
    let mut sl_chain = StabChain::new(degree);
    let mut gl = PermGroup::trivial(degree);
    let mut sl = PermGroup::trivial(degree);

    // -Id is always an automorphism; it lies in SL exactly when N is even
    let add_gl = |g: &mut PermGroup, chain: &mut StabChain, p: Perm, m: Mat<i64>, det: i8| {
        if chain.extend(&p) {
            g.generators.push(p);
            g.generator_matrices.push(m);
            g.generator_dets.push(det);
        }
    };
    let neg_det: i8 = if dim % 2 == 0 { 1 } else { -1 };
    add_gl(&mut gl, &mut gl_chain, flip.clone(), neg_id.clone(), neg_det);
    if dim % 2 == 0 {
        add_gl(&mut sl, &mut sl_chain, flip.clone(), neg_id.clone(), 1);
    }

    let mut leaves: u64 = 0;
    let mut det_pos_leaves: u64 = 0;
    let mut neg_det_auto: Option<Mat<i64>> = None;
    search_isometries(sys, sys, verify, &mut |leaf: Leaf| {
        leaves += 1;
        if leaf.det == 1 {
            det_pos_leaves += 1;
        }
        if leaf.det == -1 && neg_det_auto.is_none() {
            neg_det_auto = Some(leaf.phi.clone());
        }
        add_gl(&mut gl, &mut gl_chain, leaf.perm.clone(), leaf.phi.clone(), leaf.det);
        // SL part: for odd N exactly one of ±phi has det +1
        if dim % 2 == 0 {
            if leaf.det == 1 {
                add_gl(&mut sl, &mut sl_chain, leaf.perm.clone(), leaf.phi.clone(), 1);
            }
        } else {
            let (p, m) = if leaf.det == 1 {
                (leaf.perm.clone(), leaf.phi.clone())
            } else {
                (leaf.perm.then(&flip), neg_id.mul(&leaf.phi))
            };
            add_gl(&mut sl, &mut sl_chain, p, m, 1);
        }
        ControlFlow::Continue(())
    })
    .map_err(|_| IsometryError::SpanDeficient)?;

    let gl_order = BigInt::from(2) * BigInt::from(leaves);
    let sl_order = if dim % 2 == 0 {
        BigInt::from(2) * BigInt::from(det_pos_leaves)
    } else {
        BigInt::from(leaves)
    };
    gl.order = gl_order.clone();
    sl.order = sl_order.clone();
    debug_assert_eq!(gl_chain.order(), gl_order);
    debug_assert_eq!(sl_chain.order(), sl_order);
    if dim % 2 == 1 {
        // -Id has det -1, so a negative witness always exists for odd N
        neg_det_auto.get_or_insert(neg_id);
    }
    Ok(StabilizerScan { gl, sl, gl_order, sl_order, neg_det_auto })
}

/// Vectors of h with value at most `bound` that span R^N, together with the
/// bound actually used. Minimal vectors suffice for well-rounded forms.
fn spanning_family(h: &GramForm, start: i64) -> (Vec<Vec<i64>>, i64) {
    let mut bound = start;
    loop {
        let mut vecs: Vec<Vec<i64>> = h.vectors_up_to(bound).into_iter().map(|(v, _)| v).collect();
        vecs.sort();
        if crate::linalg::vector_rank(&vecs) == h.dim() {
            return (vecs, bound);
        }
        bound += 1;
    }
}

/// Searches for gamma in the chosen group with gamma^t b gamma = b2.
///
/// The backtracking runs over images of a spanning family of vectors of `b`
/// (its minimal vectors, extended if they do not span), pruned by pairing
/// fingerprints.
pub fn forms_equivalent(
    b: &GramForm,
    b2: &GramForm,
    group: Group,
) -> Result<Option<IsometryWitness>, IsometryError> {
    if b.dim() != b2.dim() {
        return Err(IsometryError::DimensionMismatch);
    }
    if b.det() != b2.det() || b.min() != b2.min() {
        return Ok(None);
    }
    let (vecs1, bound) = spanning_family(b, b.min());
    let mut vecs2: Vec<Vec<i64>> = b2.vectors_up_to(bound).into_iter().map(|(v, _)| v).collect();
    vecs2.sort();
    if vecs1.len() != vecs2.len() {
        return Ok(None);
    }
    // the search maps psi = gamma^{-1}: vectors of b to vectors of b2,
    // preserving the respective Gram pairings
    let s1 = PairSystem::new(vecs1, &b.gram().to_big());
    let s2 = PairSystem::new(vecs2, &b2.gram().to_big());
    let verify = |_phi: &Mat<i64>| true; // final check happens on gamma below
    let mut witness: Option<IsometryWitness> = None;
    let b_mat = b.gram().clone();
    let b2_mat = b2.gram().clone();
    search_isometries(&s1, &s2, &verify, &mut |leaf: Leaf| {
        if group == Group::Sl && leaf.det != 1 {
            return ControlFlow::Continue(());
        }
        let gamma = invert_unimodular(&leaf.phi);
        let w = IsometryWitness { matrix: gamma, det: leaf.det };
        if w.verifies(&b_mat, &b2_mat) {
            witness = Some(w);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .map_err(|_| IsometryError::SpanDeficient)?;
    Ok(witness)
}

/// Inverse of a matrix with det ±1.
pub(crate) fn invert_unimodular(m: &Mat<i64>) -> Mat<i64> {
    let big = m.to_big();
    let det = big.det();
    let adj = big.adjugate();
    let inv = adj.map(|x| {
        let q = x / &det;
        num_traits::ToPrimitive::to_i64(&q).expect("inverse entry fits i64")
    });
    debug_assert_eq!(m.mul(&inv), Mat::identity(m.nrows()));
    inv
}

/// Automorphisms of a form that permute the given ±pair configuration,
/// reported as a permutation group on signed vectors with exact order.
///
/// `b` is either a form whose minimal vectors are `s`, in which case the
/// pairing is b itself, or the configuration form of `s` (sum of rank-one
/// forms), in which case the adjugate pairing is used.
pub fn automorphisms(
    b: &GramForm,
    s: &MinVecSet,
    group: Group,
) -> Result<PermGroup, IsometryError> {
    if !s.spans(b.dim()) {
        return Err(IsometryError::SpanDeficient);
    }
    let vecs: Vec<Vec<i64>> = s.vectors().to_vec();
    let sys = PairSystem::new(vecs, &b.gram().to_big());
    let b_mat = b.gram().clone();
    // phi ranges over gamma^{-1}; the stabilizer is closed under inversion
    let verify = move |phi: &Mat<i64>| {
        let gamma = invert_unimodular(phi);
        gamma.transpose().mul(&b_mat).mul(&gamma) == b_mat
    };
    let scan = scan_stabilizer(&sys, b.dim(), &verify)?;
    Ok(match group {
        Group::Gl => scan.gl,
        Group::Sl => scan.sl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::GramForm;

    #[test]
    fn reflexive_equivalence() {
        let f = GramForm::a_n(3);
        let w = forms_equivalent(&f, &f, Group::Gl).unwrap().unwrap();
        assert!(w.verifies(f.gram(), f.gram()));
    }

    #[test]
    fn determinant_obstruction() {
        let a2 = GramForm::a_n(2);
        let scaled = GramForm::from_rows(vec![vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(forms_equivalent(&a2, &scaled, Group::Gl).unwrap(), None);
    }

    #[test]
    fn random_conjugates_are_recognized() {
        // a few fixed unimodular matrices, dims 2..5
        let gammas: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![1, 1], vec![0, 1]],
            vec![vec![1, 0, 2], vec![0, 1, 0], vec![1, 0, 1]],
            vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]],
            vec![
                vec![1, 0, 0, 0, 1],
                vec![0, 1, 0, 0, 0],
                vec![2, 0, 1, 0, 0],
                vec![0, 0, -1, 1, 0],
                vec![0, 0, 0, 0, 1],
            ],
        ];
        for g in gammas {
            let n = g.len();
            let form = GramForm::a_n(n);
            let gamma = Mat::from_rows(g);
            let conj = gamma.transpose().mul(form.gram()).mul(&gamma);
            let other = GramForm::new(conj.clone()).unwrap();
            let w = forms_equivalent(&form, &other, Group::Gl).unwrap().expect("equivalent");
            assert!(w.verifies(form.gram(), other.gram()));
            // SL variant must also find a positive witness here: composing
            // with -Id fixes the determinant in odd dims, and these forms
            // have reflections in even dims
            let w = forms_equivalent(&form, &other, Group::Sl).unwrap().expect("sl witness");
            assert_eq!(w.det, 1);
            assert!(w.verifies(form.gram(), other.gram()));
        }
    }

    #[test]
    fn square_lattice_automorphisms() {
        let f = GramForm::identity(2);
        let (_, pairs) = f.minimal_vectors();
        let g = automorphisms(&f, &pairs.clone(), Group::Gl).unwrap();
        assert_eq!(g.order, BigInt::from(8));
        for (m, det) in g.generator_matrices.iter().zip(&g.generator_dets) {
            assert_eq!(m.to_big().det(), BigInt::from(*det));
            let gamma = invert_unimodular(m);
            assert_eq!(&gamma.transpose().mul(f.gram()).mul(&gamma), f.gram());
        }
        let sl = automorphisms(&f, &pairs.clone(), Group::Sl).unwrap();
        assert_eq!(sl.order, BigInt::from(4));
    }

    #[test]
    fn hexagonal_automorphisms() {
        let f = GramForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let (_, pairs) = f.minimal_vectors();
        let g = automorphisms(&f, &pairs.clone(), Group::Gl).unwrap();
        assert_eq!(g.order, BigInt::from(12));
    }

    #[test]
    fn equivalence_is_symmetric_and_transitive() {
        let base = GramForm::a_n(3);
        let g1 = Mat::from_rows(vec![vec![1, 2, 0], vec![0, 1, 0], vec![1, 0, 1]]);
        let g2 = Mat::from_rows(vec![vec![1, 0, 0], vec![3, 1, 0], vec![0, 1, 1]]);
        let f1 = GramForm::new(g1.transpose().mul(base.gram()).mul(&g1)).unwrap();
        let f2 = GramForm::new(g2.transpose().mul(base.gram()).mul(&g2)).unwrap();
        let w12 = forms_equivalent(&base, &f1, Group::Gl).unwrap().unwrap();
        let w21 = forms_equivalent(&f1, &base, Group::Gl).unwrap().unwrap();
        assert!(w12.verifies(base.gram(), f1.gram()));
        assert!(w21.verifies(f1.gram(), base.gram()));
        // composition takes f2 to f1 through base
        let w02 = forms_equivalent(&base, &f2, Group::Gl).unwrap().unwrap();
        let comp = w21.matrix.mul(&w02.matrix);
        let back = comp.transpose().mul(f1.gram()).mul(&comp);
        assert_eq!(back, *f2.gram());
    }
}
