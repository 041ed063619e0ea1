//! Field arithmetic for coding and hashing, and group arithmetic for the
//! subspace signature.

mod field;
mod group;
mod prime;

use thiserror::Error;

pub use field::{FieldElement, FieldSpec, Symbol};
pub use group::{make_group, mod_exp, mod_exp_big, random_prime, safe_prime_group, GroupSpec, SmallGroup};
pub use prime::{is_prime_big, is_prime_u64};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operands belong to different fields ({left} vs {right})")]
    FieldMismatch { left: FieldSpec, right: FieldSpec },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("binary extension width {0} is outside 2..=16")]
    UnsupportedWidth(u8),
    #[error("value {value} is not a reduced symbol of a field of order {order}")]
    OutOfRange { value: u64, order: u64 },
    #[error("modulus must be at least 2")]
    ModulusTooSmall,
    #[error("unsupported group size: P of {bits_p} bits, Q of {bits_q} bits")]
    GroupSize { bits_p: u64, bits_q: u64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn fields() -> Vec<FieldSpec> {
        vec![
            FieldSpec::gf256(),
            FieldSpec::binary(7).unwrap(),
            FieldSpec::binary(3).unwrap(),
            FieldSpec::binary(16).unwrap(),
            FieldSpec::prime(127).unwrap(),
            FieldSpec::prime(4_294_967_291).unwrap(),
        ]
    }

    fn field_and_triple() -> impl Strategy<Value = (FieldSpec, u64, u64, u64)> {
        proptest::sample::select(fields()).prop_flat_map(|f| {
            let q = f.order();
            (Just(f), 0..q, 0..q, 0..q)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn field_axioms((f, a, b, c) in field_and_triple()) {
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, 0), a);
            prop_assert_eq!(f.mul(a, 1), a);
            prop_assert_eq!(f.mul(a, 0), 0);
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }

        #[test]
        fn pow_adds_exponents((f, a, _b, _c) in field_and_triple(), i in 0u64..1000, j in 0u64..1000) {
            prop_assert_eq!(f.pow(a, i + j), f.mul(f.pow(a, i), f.pow(a, j)));
        }
    }
}
