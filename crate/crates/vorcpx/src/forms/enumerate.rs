//! Shortest-vector enumeration by branch-and-bound over an exact rational
//! Cholesky decomposition. No floating point anywhere: bounds come from
//! integer square roots of rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::Mat;
use crate::num::rational_sqrt_floor;

/// Rational Cholesky data: q(x) = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2.
pub(crate) struct Cholesky {
    dim: usize,
    d: Vec<BigRational>,
    u: Vec<Vec<BigRational>>,
}

/// Decomposes a symmetric matrix; `None` unless positive definite.
pub(crate) fn cholesky(gram: &Mat<BigInt>) -> Option<Cholesky> {
    let n = gram.nrows();
    if n == 0 || !gram.is_symmetric() {
        return None;
    }
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from(gram[(i, j)].clone())).collect())
        .collect();
    let mut d = vec![BigRational::zero(); n];
    let mut u = vec![vec![BigRational::zero(); n]; n];
    for k in 0..n {
        let pivot = a[k][k].clone();
        if !pivot.is_positive() {
            return None;
        }
        d[k] = pivot.clone();
        for j in k + 1..n {
            u[k][j] = &a[k][j] / &pivot;
        }
        for i in k + 1..n {
            for j in i..n {
                let sub = &a[k][i] * &u[k][j];
                a[i][j] -= sub;
                let v = a[i][j].clone();
                a[j][i] = v;
            }
        }
    }
    Some(Cholesky { dim: n, d, u })
}

/// All vectors with q(v) <= bound, one per ±pair, with their values.
/// Vectors come out with the last nonzero coordinate positive; callers
/// re-normalize to their own convention.
pub(crate) fn enumerate_bounded(ch: &Cholesky, bound: &BigInt) -> Vec<(Vec<i64>, BigInt)> {
    let mut out = Vec::new();
    if bound.is_negative() {
        return out;
    }
    let n = ch.dim;
    let mut x = vec![0i64; n];
    let bound = BigRational::from(bound.clone());
    // depth-first from the last coordinate down
    struct Frame {
        hi: i64,
        cur: i64,
        rem: BigRational,     // remaining budget at this level
        center: BigRational,  // sum_{j>i} u_ij x_j
    }
    let mut stack: Vec<Frame> = Vec::with_capacity(n);
    let centers = |ch: &Cholesky, x: &[i64], i: usize| -> BigRational {
        let mut c = BigRational::zero();
        for j in i + 1..n {
            if x[j] != 0 {
                c += &ch.u[i][j] * BigRational::from(BigInt::from(x[j]));
            }
        }
        c
    };
    // exact integer range of x with d_i (x + center)^2 <= rem
    let level_range = |ch: &Cholesky, rem: &BigRational, center: &BigRational, i: usize| {
        let radicand = rem / &ch.d[i];
        let r = BigRational::from(rational_sqrt_floor(&radicand));
        let fits = |v: i64| {
            let s = center + BigRational::from(BigInt::from(v));
            &ch.d[i] * &s * &s <= *rem
        };
        // the floor of the sqrt only under-approximates; widen exactly
        let mut lo = div_ceil_rational(&(-&r - center));
        let mut hi = div_floor_rational(&(&r - center));
        while fits(hi + 1) {
            hi += 1;
        }
        while fits(lo - 1) {
            lo -= 1;
        }
        (lo, hi)
    };
    let top_center = BigRational::zero();
    let (lo, hi) = level_range(ch, &bound, &top_center, n - 1);
    // half-space: last nonzero coordinate positive
    stack.push(Frame { hi, cur: 0.max(lo), rem: bound.clone(), center: top_center });
    while !stack.is_empty() {
        let depth = stack.len();
        let i = n - depth;
        let frame = stack.last().unwrap();
        if frame.cur > frame.hi {
            stack.pop();
            if let Some(f) = stack.last_mut() {
                f.cur += 1;
            }
            continue;
        }
        x[i] = frame.cur;
        let shifted = &frame.center + BigRational::from(BigInt::from(frame.cur));
        let used = &ch.d[i] * &shifted * &shifted;
        let rem_next = &frame.rem - &used;
        debug_assert!(!rem_next.is_negative());
        if i == 0 {
            if x.iter().any(|&v| v != 0) {
                let value = &bound - &rem_next;
                debug_assert!(value.denom().is_one() || value.numer().is_zero());
                out.push((x.clone(), value.numer() / value.denom()));
            }
            stack.last_mut().unwrap().cur += 1;
            continue;
        }
        let center = centers(ch, &x, i - 1);
        let (mut lo, hi) = level_range(ch, &rem_next, &center, i - 1);
        // enforce the half-space convention when everything above is zero
        if x[i..].iter().all(|&v| v == 0) {
            lo = lo.max(0);
        }
        if lo > hi {
            stack.last_mut().unwrap().cur += 1;
            continue;
        }
        stack.push(Frame { hi, cur: lo, rem: rem_next, center });
    }
    out
}

fn div_floor_rational(r: &BigRational) -> i64 {
    let f = r.floor();
    big_to_i64(&(f.numer() / f.denom()))
}

fn div_ceil_rational(r: &BigRational) -> i64 {
    let c = r.ceil();
    big_to_i64(&(c.numer() / c.denom()))
}

fn big_to_i64(b: &BigInt) -> i64 {
    num_traits::ToPrimitive::to_i64(b).expect("coordinate bound fits i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;

    fn enumerate_i64(gram: &Mat<i64>, bound: i64) -> Vec<(Vec<i64>, i64)> {
        let ch = cholesky(&gram.to_big()).expect("positive definite");
        enumerate_bounded(&ch, &BigInt::from(bound))
            .into_iter()
            .map(|(v, val)| (v, num_traits::ToPrimitive::to_i64(&val).unwrap()))
            .collect()
    }

    #[test]
    fn identity_short_vectors() {
        let g = Mat::identity(2);
        let found = enumerate_i64(&g, 1);
        assert_eq!(found.len(), 2);
        for (_, val) in &found {
            assert_eq!(*val, 1);
        }
    }

    #[test]
    fn hexagonal_form() {
        let g = Mat::from_rows(vec![vec![2i64, 1], vec![1, 2]]);
        let found = enumerate_i64(&g, 2);
        assert_eq!(found.len(), 3);
    }

    #[test]
    fn agrees_with_box_search() {
        let cases = vec![
            Mat::from_rows(vec![vec![3i64, 1, 0], vec![1, 4, -2], vec![0, -2, 5]]),
            Mat::from_rows(vec![vec![2i64, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]),
            Mat::from_rows(vec![vec![6i64, 2, 1], vec![2, 5, 0], vec![1, 0, 4]]),
        ];
        for g in cases {
            let bound = 6i64;
            let mut fast: Vec<Vec<i64>> = enumerate_i64(&g, bound)
                .into_iter()
                .map(|(mut v, _)| {
                    crate::num::normalize_primitive(&mut v[..]);
                    v
                })
                .collect();
            // brute force over the box; entries this small keep all short
            // vectors within it
            let mut slow = Vec::new();
            let r = 4i64;
            for a in -r..=r {
                for b in -r..=r {
                    for c in -r..=r {
                        let v = vec![a, b, c];
                        if v.iter().all(|&x| x == 0) {
                            continue;
                        }
                        if g.eval_form(&v) <= bound as i128 {
                            let mut w = v.clone();
                            crate::num::normalize_primitive(&mut w[..]);
                            if !slow.contains(&w) {
                                slow.push(w);
                            }
                        }
                    }
                }
            }
            fast.sort();
            slow.sort();
            fast.dedup();
            assert_eq!(fast, slow, "gram {g:?}");
        }
    }
}
