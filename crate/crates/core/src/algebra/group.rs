//! Prime-order subgroups of Z_Q^* used by the subspace signature.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::prime::{is_prime_big, is_prime_u64, pow_mod_u64};
use super::AlgebraError;

/// `base^exp mod modulus` by left-to-right square-and-multiply.
pub fn mod_exp(base: u64, exp: u64, modulus: u64) -> Result<u64, AlgebraError> {
    if modulus < 2 {
        return Err(AlgebraError::ModulusTooSmall);
    }
    Ok(pow_mod_u64(base, exp, modulus))
}

/// Multi-precision counterpart of [`mod_exp`]. The modulus must be at least 2.
pub fn mod_exp_big(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> BigUint {
    debug_assert!(*modulus > BigUint::one());
    let base = base % modulus;
    let mut acc = BigUint::one() % modulus;
    for i in (0..exp.bits()).rev() {
        acc = (&acc * &acc) % modulus;
        if exp.bit(i) {
            acc = (&acc * &base) % modulus;
        }
    }
    acc
}

/// Word-sized copy of the group parameters, present when Q fits in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmallGroup {
    pub order: u64,
    pub modulus: u64,
    pub generator: u64,
}

/// A subgroup of prime order P inside Z_Q^*, generated by g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    order: BigUint,
    modulus: BigUint,
    generator: BigUint,
    small: Option<SmallGroup>,
}

impl GroupSpec {
    /// Validates `(P, Q, g)`: both prime, P | Q-1, g of order exactly P.
    pub fn new(order: BigUint, modulus: BigUint, generator: BigUint) -> Result<Self, AlgebraError> {
        let invalid = |msg: &str| Err(AlgebraError::InvalidGroup(msg.to_string()));
        if modulus.is_even() || !is_prime_big(&modulus) {
            return invalid("modulus Q is not an odd prime");
        }
        if !is_prime_big(&order) {
            return invalid("subgroup order P is not prime");
        }
        if !((&modulus - 1u32) % &order).is_zero() {
            return invalid("P does not divide Q - 1");
        }
        if generator <= BigUint::one() || generator >= modulus {
            return invalid("generator outside (1, Q)");
        }
        if !mod_exp_big(&generator, &order, &modulus).is_one() {
            return invalid("generator order does not divide P");
        }
        let small = match (order.to_u64(), modulus.to_u64(), generator.to_u64()) {
            (Some(order), Some(modulus), Some(generator)) => Some(SmallGroup {
                order,
                modulus,
                generator,
            }),
            _ => None,
        };
        Ok(GroupSpec {
            order,
            modulus,
            generator,
            small,
        })
    }

    pub fn from_u64(order: u64, modulus: u64, generator: u64) -> Result<Self, AlgebraError> {
        Self::new(order.into(), modulus.into(), generator.into())
    }

    /// Subgroup order P.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Modulus Q.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn generator(&self) -> &BigUint {
        &self.generator
    }

    /// Word-sized parameters, when Q < 2^64.
    pub fn small(&self) -> Option<SmallGroup> {
        self.small
    }

    /// True when arithmetic must go through multi-precision integers.
    pub fn is_slow_path(&self) -> bool {
        self.small.is_none()
    }

    pub fn order_bits(&self) -> u64 {
        self.order.bits()
    }

    /// ceil(log2 Q), the size of one public-key element.
    pub fn modulus_bits(&self) -> u64 {
        self.modulus.bits()
    }
}

fn random_bits<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    let bytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; bytes];
    rng.fill(buf.as_mut_slice());
    let mut n = BigUint::from_bytes_le(&buf);
    let excess = bytes as u64 * 8 - bits;
    if excess > 0 {
        n >>= excess;
    }
    n
}

/// Uniform integer in `[0, bound)`, by rejection.
fn random_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    loop {
        let n = random_bits(bound.bits(), rng);
        if n < *bound {
            return n;
        }
    }
}

/// Random prime with exactly `bits` bits.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    loop {
        let mut n = random_bits(bits, rng);
        n.set_bit(bits - 1, true);
        n.set_bit(0, true);
        if is_prime_big(&n) {
            return n;
        }
    }
}

/// Draws a generator of the order-P subgroup: h^((Q-1)/P) for random h.
fn find_generator<R: Rng + ?Sized>(order: &BigUint, modulus: &BigUint, rng: &mut R) -> BigUint {
    let cofactor = (modulus - 1u32) / order;
    let span = modulus - 3u32;
    loop {
        let h = random_below(&span, rng) + 2u32;
        let g = mod_exp_big(&h, &cofactor, modulus);
        if !g.is_one() {
            return g;
        }
    }
}

/// Searches primes P (`bits_p` bits) and Q = kP + 1 (`bits_q` bits) and a
/// generator of the order-P subgroup. Deterministic for a seeded `rng`.
///
/// Sizes beyond 64 bits work but run on the multi-precision path
/// ([`GroupSpec::is_slow_path`]); 160/1024 takes seconds.
pub fn make_group<R: Rng + ?Sized>(bits_p: u64, bits_q: u64, rng: &mut R) -> Result<GroupSpec, AlgebraError> {
    if bits_p < 8 || bits_q <= bits_p {
        return Err(AlgebraError::GroupSize { bits_p, bits_q });
    }
    let q_low = BigUint::one() << (bits_q - 1);
    let q_high = BigUint::one() << bits_q;
    loop {
        let order = random_prime(bits_p, rng);
        // k ranges over [ceil(2^(bq-1) / P), floor((2^bq - 1) / P)].
        let k_low = (&q_low + &order - 1u32) / &order;
        let k_high = (&q_high - 1u32) / &order;
        if k_high < k_low {
            continue;
        }
        let k_span = &k_high - &k_low + 1u32;
        for _ in 0..(8 * bits_q) {
            let k = &k_low + random_below(&k_span, rng);
            if k.is_odd() {
                continue;
            }
            let modulus = &k * &order + 1u32;
            if is_prime_big(&modulus) {
                let generator = find_generator(&order, &modulus, rng);
                return GroupSpec::new(order, modulus, generator);
            }
        }
    }
}

/// Safe-prime group Q = 2P + 1, with P of `bits_p` bits.
pub fn safe_prime_group<R: Rng + ?Sized>(bits_p: u64, rng: &mut R) -> Result<GroupSpec, AlgebraError> {
    if !(8..=62).contains(&bits_p) {
        return Err(AlgebraError::GroupSize {
            bits_p,
            bits_q: bits_p + 1,
        });
    }
    loop {
        let p: u64 = rng.gen_range((1u64 << (bits_p - 1))..(1u64 << bits_p)) | 1;
        if !is_prime_u64(p) {
            continue;
        }
        let q = 2 * p + 1;
        if !is_prime_u64(q) {
            continue;
        }
        // Squares generate the index-2 subgroup; skip the trivial ones.
        let mut h = 2u64;
        let g = loop {
            let g = pow_mod_u64(h, 2, q);
            if g != 1 {
                break g;
            }
            h += 1;
        };
        return GroupSpec::from_u64(p, q, g);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mod_exp_examples() {
        assert_eq!(mod_exp(2, 10, 1000).unwrap(), 24);
        assert_eq!(mod_exp(12345, 0, 23).unwrap(), 1);
        assert_eq!(mod_exp(5, 0, 1).err(), Some(AlgebraError::ModulusTooSmall));
        assert_eq!(
            mod_exp_big(&2u32.into(), &10u32.into(), &1000u32.into()),
            24u32.into()
        );
    }

    #[test]
    fn mod_exp_matches_repeated_multiplication() {
        for base in 0..30u64 {
            let mut expected = 1u64;
            for e in 0..40u64 {
                assert_eq!(mod_exp(base, e, 97).unwrap(), expected);
                expected = expected * base % 97;
            }
        }
    }

    #[test]
    fn safe_prime_23() {
        let g = GroupSpec::from_u64(11, 23, 4).unwrap();
        // Enumerate the powers of 4 mod 23: the first return to 1 is at 11.
        let mut x = 1u64;
        let mut order = 0;
        for i in 1..=22 {
            x = x * 4 % 23;
            if x == 1 {
                order = i;
                break;
            }
        }
        assert_eq!(order, 11);
        assert!(!g.is_slow_path());
        assert!(GroupSpec::from_u64(11, 23, 1).is_err());
        assert!(GroupSpec::from_u64(11, 23, 5).is_err()); // 5 generates all of Z_23^*
        assert!(GroupSpec::from_u64(7, 23, 4).is_err());
        assert!(GroupSpec::from_u64(11, 21, 4).is_err());
    }

    #[test]
    fn make_group_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = make_group(8, 16, &mut rng).unwrap();
            let s = g.small().unwrap();
            assert_eq!((s.modulus - 1) % s.order, 0);
            assert_eq!(mod_exp(s.generator, s.order, s.modulus).unwrap(), 1);
            assert_ne!(mod_exp(s.generator, 1, s.modulus).unwrap(), 1);
            assert_eq!(g.order_bits(), 8);
            assert_eq!(g.modulus_bits(), 16);
            assert!(is_prime_u64(s.order) && is_prime_u64(s.modulus));
        }
    }

    #[test]
    fn make_group_is_deterministic() {
        let a = make_group(16, 40, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = make_group(16, 40, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn make_group_rejects_bad_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(make_group(7, 16, &mut rng).is_err());
        assert!(make_group(16, 16, &mut rng).is_err());
    }

    #[test]
    fn multi_precision_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = make_group(64, 192, &mut rng).unwrap();
        assert!(g.is_slow_path());
        assert_eq!(g.modulus_bits(), 192);
        assert!(mod_exp_big(g.generator(), g.order(), g.modulus()).is_one());
    }

    #[test]
    fn desk_default_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = safe_prime_group(32, &mut rng).unwrap();
        let s = g.small().unwrap();
        assert!(s.order >= 1 << 31);
        assert_eq!(s.modulus, 2 * s.order + 1);
        assert_eq!(mod_exp(s.generator, s.order, s.modulus).unwrap(), 1);
    }
}
