//! Scalar abstraction and small number-theory helpers.
//!
//! All exact kernels in this crate are generic over [`Int`], so the same
//! elimination code runs on `i64`, `i128` or `BigInt`. The crate root fixes
//! concrete aliases for the public types.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{NumAssign, Signed, ToPrimitive, Zero};

/// Integer scalar for the exact linear-algebra kernels.
///
/// Automatically implemented for every type satisfying the bounds; the ones
/// used here are `i64`, `i128` and `BigInt`.
pub trait Int:
    Integer
    + Signed
    + NumAssign
    + Clone
    + Hash
    + Debug
    + Display
    + From<i64>
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Int for T where
    T: Integer
        + Signed
        + NumAssign
        + Clone
        + Hash
        + Debug
        + Display
        + From<i64>
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// gcd of all values, zero for an empty or all-zero slice.
pub fn content<T: Int>(values: &[T]) -> T {
    let mut g = T::zero();
    for v in values {
        if !v.is_zero() {
            g = g.gcd(v);
            if g.is_one() {
                return g;
            }
        }
    }
    g
}

/// Divides a vector by its content and flips signs so the first nonzero
/// coordinate is positive. Returns the zero vector unchanged.
pub fn normalize_primitive<T: Int>(v: &mut [T]) {
    let g = content(v);
    if g.is_zero() {
        return;
    }
    if !g.is_one() {
        for x in v.iter_mut() {
            *x = x.clone() / g.clone();
        }
    }
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Divides a vector by its content, preserving signs.
pub fn reduce_content<T: Int>(v: &mut [T]) {
    let g = content(v);
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        *x = x.clone() / g.clone();
    }
}

/// Flips signs so the first nonzero coordinate is positive.
pub fn normalize_signs<T: Int>(v: &mut [T]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Floor of the square root of a nonnegative rational.
pub fn rational_sqrt_floor(r: &BigRational) -> BigInt {
    assert!(!r.is_negative(), "negative radicand");
    if r.is_zero() {
        return BigInt::zero();
    }
    // initial guess from floor(num/den), then fix up exactly
    let mut x = (r.numer() / r.denom()).sqrt();
    let holds = |x: &BigInt| x * x * r.denom() <= *r.numer();
    loop {
        let next = &x + 1;
        if holds(&next) {
            x = next;
        } else {
            break;
        }
    }
    while !holds(&x) {
        x -= 1;
    }
    x
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // this base set is deterministic below 3.3 * 10^24
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic sequence of distinct word-sized primes in (2^30, 2^31),
/// scattered by a fixed multiplicative stride. Used for modular rank passes.
pub fn modular_primes(count: usize, seed: u64) -> Vec<u64> {
    let lo = 1u64 << 30;
    let span = 1u64 << 30;
    let mut out = Vec::with_capacity(count);
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    while out.len() < count {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut cand = lo + (state % span) | 1;
        while !is_prime_u64(cand) {
            cand += 2;
        }
        if cand < (1u64 << 31) && !out.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

/// Prime factorization by trial division; fine for stabilizer orders.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn primitive_normalization() {
        let mut v: Vec<i64> = vec![-6, 9, -3];
        normalize_primitive(&mut v);
        assert_eq!(v, vec![2, -3, 1]);
        let mut z: Vec<i64> = vec![0, 0];
        normalize_primitive(&mut z);
        assert_eq!(z, vec![0, 0]);
    }

    #[test]
    fn rational_sqrt() {
        let r = BigRational::new(BigInt::from(10), BigInt::from(3));
        assert_eq!(rational_sqrt_floor(&r), BigInt::from(1));
        let r = BigRational::new(BigInt::from(49), BigInt::from(1));
        assert_eq!(rational_sqrt_floor(&r), BigInt::from(7));
        let r = BigRational::new(BigInt::from(48), BigInt::from(1));
        assert_eq!(rational_sqrt_floor(&r), BigInt::from(6));
    }

    #[test]
    fn primes() {
        assert!(is_prime_u64(1_073_741_827));
        assert!(!is_prime_u64(1_073_741_825));
        let ps = modular_primes(2, 42);
        assert_eq!(ps.len(), 2);
        assert_ne!(ps[0], ps[1]);
        for p in ps {
            assert!(p > (1 << 30) && p < (1 << 31) && is_prime_u64(p));
        }
        assert_eq!(prime_factors_u64(51840), vec![2, 3, 5]);
    }
}
