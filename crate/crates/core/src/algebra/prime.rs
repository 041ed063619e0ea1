//! Primality testing for word-sized and multi-precision integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::group::mod_exp_big;

/// Bases for which Miller-Rabin is deterministic on every 64-bit input.
const U64_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103,
    107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251,
];

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for any `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let (d, r) = split_odd(n - 1);
    U64_WITNESSES.iter().all(|&a| miller_rabin_round_u64(n, a, d, r))
}

fn split_odd(mut d: u64) -> (u64, u32) {
    let r = d.trailing_zeros();
    d >>= r;
    (d, r)
}

fn miller_rabin_round_u64(n: u64, a: u64, d: u64, r: u32) -> bool {
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..r {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality test for arbitrary-size integers.
///
/// Inputs that fit in 64 bits are decided exactly. Larger inputs run
/// Miller-Rabin against the first 54 primes as fixed witnesses, so the
/// answer is reproducible; the error bound is below 4^-54 for random inputs.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let r = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> r;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = mod_exp_big(&BigUint::from(a), &d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    debug_assert!(n.is_odd());
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn agrees_with_trial_division_below_100k() {
        for n in 0..100_000u64 {
            assert_eq!(is_prime_u64(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_are_rejected() {
        // Strong pseudoprimes to several small bases.
        for n in [
            2047u64,
            1_373_653,
            25_326_001,
            3_215_031_751,
            3_825_123_056_546_413_051,
        ] {
            assert!(!is_prime_u64(n), "{n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn big_primes() {
        // 2^127 - 1 is a Mersenne prime; 2^128 + 1 is composite.
        let m127 = (BigUint::one() << 127usize) - 1u32;
        assert!(is_prime_big(&m127));
        let f7 = (BigUint::one() << 128usize) + 1u32;
        assert!(!is_prime_big(&f7));
        assert!(!is_prime_big(&(&m127 * &m127)));
    }
}
