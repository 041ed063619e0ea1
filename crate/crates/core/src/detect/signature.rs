//! Homomorphic subspace signature for per-packet checking.
//!
//! The source draws a secret vector u orthogonal (over F_P) to every source
//! vector w_i = e_i ‖ x_i and publishes h_j = g^(u_j) mod Q. A packet w is
//! accepted iff Π h_j^(w_j) = g^(u·w) = 1, which holds for every linear
//! combination of source vectors and, for any other vector, only when it
//! happens to be orthogonal to u (probability 1/P over the key).
//!
//! Packets are native F_P vectors: the coding field must be the prime field
//! of order P.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::algebra::{mod_exp_big, FieldSpec, GroupSpec, SmallGroup, Symbol};
use crate::rlnc::{CodedVector, Generation};

use super::DetectError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SigVerdict {
    Accept,
    Reject,
}

#[derive(Clone, Debug)]
enum PublicKey {
    /// Q < 2^64. `squares[j][b]` holds h_j^(2^b) mod Q for fixed-base
    /// exponentiation.
    Small {
        h: Vec<u64>,
        squares: Vec<Vec<u64>>,
    },
    Big {
        h: Vec<BigUint>,
    },
}

/// Public key for one generation: one group element per coordinate of
/// coeffs ‖ payload.
#[derive(Clone, Debug)]
pub struct SignatureKey {
    group: GroupSpec,
    generation: u64,
    key: PublicKey,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn square_table(base: u64, bits: u64, g: &SmallGroup) -> Vec<u64> {
    let mut out = Vec::with_capacity(bits as usize);
    let mut x = base;
    for _ in 0..bits {
        out.push(x);
        x = mul_mod(x, x, g.modulus);
    }
    out
}

impl SignatureKey {
    /// Rebuilds a key from its published elements h_j, one per coordinate of
    /// coeffs ‖ payload.
    pub fn from_elements(
        group: &GroupSpec,
        generation: u64,
        elements: Vec<BigUint>,
    ) -> Result<Self, DetectError> {
        signing_field(group)?;
        if elements.is_empty() {
            return Err(DetectError::DegenerateComplement);
        }
        if let Some(bad) = elements.iter().find(|h| *h >= group.modulus()) {
            return Err(DetectError::InvalidParams(format!(
                "key element {bad} is not reduced mod Q"
            )));
        }
        let key = match group.small() {
            Some(g) => {
                let bits = group.order_bits();
                let h: Vec<u64> = elements
                    .iter()
                    .map(|x| x.to_u64_digits().first().copied().unwrap_or(0))
                    .collect();
                let squares = h.iter().map(|&x| square_table(x, bits, &g)).collect();
                PublicKey::Small { h, squares }
            }
            None => PublicKey::Big { h: elements },
        };
        Ok(SignatureKey {
            group: group.clone(),
            generation,
            key,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Number of group elements, G + k_data.
    pub fn len(&self) -> usize {
        match &self.key {
            PublicKey::Small { h, .. } => h.len(),
            PublicKey::Big { h } => h.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Public key size, (G + k_data) * ceil(log2 Q) bits.
    pub fn size_bits(&self) -> u64 {
        self.len() as u64 * self.group.modulus_bits()
    }

    pub fn elements(&self) -> Vec<BigUint> {
        match &self.key {
            PublicKey::Small { h, .. } => h.iter().map(|&x| BigUint::from(x)).collect(),
            PublicKey::Big { h } => h.clone(),
        }
    }
}

/// The coding field F_P matching a signing group of order P.
pub fn signing_field(group: &GroupSpec) -> Result<FieldSpec, DetectError> {
    let p = group.small().map(|s| s.order).or_else(|| {
        let digits = group.order().to_u64_digits();
        (digits.len() == 1).then(|| digits[0])
    });
    match p {
        Some(p) => Ok(FieldSpec::Prime { modulus: p }),
        None => Err(DetectError::InvalidParams(
            "subgroup order must fit in 64 bits to act as the coding field".into(),
        )),
    }
}

/// Draws a key for `generation`.
///
/// With w_i = e_i ‖ x_i, u = (u_c ‖ u_d) is orthogonal to every w_i exactly
/// when u_c[i] = -u_d·x_i, so drawing u_d uniformly samples the orthogonal
/// complement uniformly. u = 0 is redrawn.
pub fn sig_keygen<R: Rng + ?Sized>(
    generation: &Generation,
    group: &GroupSpec,
    rng: &mut R,
) -> Result<SignatureKey, DetectError> {
    let field = signing_field(group)?;
    let params = &generation.params;
    if params.field() != field {
        return Err(DetectError::FieldMismatch {
            expected: field,
            got: params.field(),
        });
    }
    if params.hash_symbols() != 0 {
        return Err(DetectError::InvalidParams(
            "signed generations carry no hash symbols".into(),
        ));
    }
    let k = params.data_symbols();
    if k == 0 {
        return Err(DetectError::DegenerateComplement);
    }
    let u_data = loop {
        let u = field.random_vec(k, rng);
        if u.iter().any(|&s| s != 0) {
            break u;
        }
    };
    let mut secret: Vec<Symbol> = generation
        .source_payloads
        .iter()
        .map(|x| field.neg(field.dot(&u_data, x)))
        .collect();
    secret.extend_from_slice(&u_data);

    let key = match group.small() {
        Some(g) => {
            let bits = group.order_bits();
            let h: Vec<u64> = secret
                .iter()
                .map(|&u| crate::algebra::mod_exp(g.generator, u, g.modulus).expect("Q >= 2"))
                .collect();
            let squares = h.iter().map(|&x| square_table(x, bits, &g)).collect();
            PublicKey::Small { h, squares }
        }
        None => PublicKey::Big {
            h: secret
                .iter()
                .map(|&u| mod_exp_big(group.generator(), &BigUint::from(u), group.modulus()))
                .collect(),
        },
    };
    Ok(SignatureKey {
        group: group.clone(),
        generation: generation.id,
        key,
    })
}

/// Accepts iff Π h_j^(w_j) ≡ 1 (mod Q) for w = coeffs ‖ payload.
///
/// The all-zero vector is accepted: it lies in every subspace.
pub fn sig_verify(vector: &CodedVector, key: &SignatureKey) -> Result<SigVerdict, DetectError> {
    let expected_field = signing_field(&key.group)?;
    if vector.field != expected_field {
        return Err(DetectError::FieldMismatch {
            expected: expected_field,
            got: vector.field,
        });
    }
    let got = vector.coeffs.len() + vector.payload.len();
    if got != key.len() || !vector.hash.is_empty() {
        return Err(DetectError::LengthMismatch {
            expected: key.len(),
            got: got + vector.hash.len(),
        });
    }
    let w = vector.coeffs.iter().chain(&vector.payload);
    let accepted = match &key.key {
        PublicKey::Small { squares, .. } => {
            let g = key.group.small().expect("small key implies small group");
            let mut acc = 1u64;
            for (&e, table) in w.zip(squares) {
                let mut e = e;
                let mut b = 0;
                while e != 0 {
                    if e & 1 == 1 {
                        acc = mul_mod(acc, table[b], g.modulus);
                    }
                    e >>= 1;
                    b += 1;
                }
            }
            acc == 1
        }
        PublicKey::Big { h } => {
            let q = key.group.modulus();
            let acc = w.zip(h).fold(BigUint::one(), |acc, (&e, base)| {
                (acc * mod_exp_big(base, &BigUint::from(e), q)) % q
            });
            acc.is_one()
        }
    };
    Ok(if accepted {
        SigVerdict::Accept
    } else {
        SigVerdict::Reject
    })
}
