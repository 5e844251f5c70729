//! The contiguity walk: crossing a facet of a perfect cone to the unique
//! neighboring perfect form, by exact rational search on the pencil
//! h + rho * q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::forms::{cholesky, enumerate_bounded, GramForm};
use crate::linalg::Mat;

use super::{PerfectCone, VoronoiError};

/// Scaled integral form den*h + num*q.
fn pencil(h: &Mat<BigInt>, q: &Mat<BigInt>, rho: &BigRational) -> Mat<BigInt> {
    let num = rho.numer();
    let den = rho.denom();
    Mat::from_fn(h.nrows(), h.ncols(), |i, j| &h[(i, j)] * den + &q[(i, j)] * num)
}

enum Probe {
    NotPositiveDefinite,
    /// minimum dropped below target; exact crossing parameters of the
    /// violating vectors
    Dropped(Vec<BigRational>),
    /// minimum still equals the target and these ±pairs attain it
    AtTarget(Vec<Vec<i64>>),
}

fn probe(h: &Mat<BigInt>, q: &Mat<BigInt>, rho: &BigRational, target_min: i64) -> Probe {
    let scaled = pencil(h, q, rho);
    let entries: Vec<BigInt> =
        scaled.rows().flat_map(|r| r.iter().cloned()).collect();
    let c = crate::num::content(&entries);
    let reduced = scaled.map(|x| x / &c);
    let Some(ch) = cholesky(&reduced) else {
        return Probe::NotPositiveDefinite;
    };
    let target = BigInt::from(target_min) * rho.denom();
    debug_assert!((&target % &c).is_zero());
    let bound = &target / &c;
    let found = enumerate_bounded(&ch, &bound);
    let mut at_target = Vec::new();
    let mut crossings = Vec::new();
    for (v, value) in found {
        let scaled_value = &value * &c;
        if scaled_value == target {
            at_target.push(v);
        } else {
            debug_assert!(scaled_value < target);
            // h(v) + rho_v q(v) = m with q(v) < 0
            let hv = BigInt::from(eval_big(h, &v));
            let qv = BigInt::from(eval_big(q, &v));
            debug_assert!(qv.is_negative());
            crossings.push(BigRational::new(BigInt::from(target_min) - hv, qv));
        }
    }
    if crossings.is_empty() {
        Probe::AtTarget(at_target)
    } else {
        Probe::Dropped(crossings)
    }
}

fn eval_big(m: &Mat<BigInt>, v: &[i64]) -> i128 {
    let n = m.nrows();
    let mut acc = BigInt::zero();
    for i in 0..n {
        for j in 0..n {
            acc += &m[(i, j)] * (v[i] as i128 * v[j] as i128);
        }
    }
    acc.to_i128().expect("form value fits i128")
}

/// The unique perfect neighbor of `cone.form` across the given facet.
///
/// Starting from rho = 1 the parameter doubles while the minimum is
/// untouched, shrinks onto exact crossing values when vectors fall below the
/// minimum, and bisects out of the indefinite region; it lands exactly on
/// the smallest rho where new minimal vectors appear.
pub fn contiguous_form(
    cone: &PerfectCone,
    facet_index: usize,
    max_iters: usize,
) -> Result<GramForm, VoronoiError> {
    let facet = &cone.facets[facet_index];
    let h = cone.form.gram().to_big();
    let q = &facet.normal;
    let target_min = cone.form.min();
    let incident: std::collections::BTreeSet<&Vec<i64>> =
        facet.incident.iter().map(|&i| &cone.pairs[i]).collect();

    let mut lo = BigRational::zero();
    let mut hi: Option<BigRational> = None;
    let mut cur = BigRational::one();
    for _ in 0..max_iters {
        match probe(&h, q, &cur, target_min) {
            Probe::NotPositiveDefinite => {
                hi = Some(cur.clone());
                cur = (&lo + &cur) / BigRational::from(BigInt::from(2));
            }
            Probe::Dropped(crossings) => {
                hi = Some(cur.clone());
                let next = crossings.into_iter().min().expect("nonempty");
                debug_assert!(next > lo && next < cur);
                cur = next;
            }
            Probe::AtTarget(pairs) => {
                let normalized: std::collections::BTreeSet<Vec<i64>> = pairs
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        crate::num::normalize_signs(&mut w);
                        w
                    })
                    .collect();
                debug_assert!(incident.iter().all(|v| normalized.contains(*v)));
                if normalized.len() > incident.len() {
                    // new minimal vectors appeared: this is the neighbor
                    return finish(&h, q, &cur);
                }
                // still strictly inside the cone
                lo = cur.clone();
                cur = match &hi {
                    Some(hi) => (&lo + hi) / BigRational::from(BigInt::from(2)),
                    None => &cur * BigRational::from(BigInt::from(2)),
                };
            }
        }
    }
    Err(VoronoiError::WalkDiverged)
}

fn finish(h: &Mat<BigInt>, q: &Mat<BigInt>, rho: &BigRational) -> Result<GramForm, VoronoiError> {
    let scaled = pencil(h, q, rho);
    let entries: Vec<BigInt> = scaled.rows().flat_map(|r| r.iter().cloned()).collect();
    let c = crate::num::content(&entries);
    let reduced = scaled.map(|x| x / &c);
    let gram = Mat::from_fn(reduced.nrows(), reduced.ncols(), |i, j| {
        reduced[(i, j)].to_i64().expect("neighbor form entries fit i64")
    });
    let form = GramForm::new(gram).map_err(|_| VoronoiError::WalkDiverged)?;
    if !form.is_perfect() {
        return Err(VoronoiError::WalkDiverged);
    }
    Ok(form)
}
