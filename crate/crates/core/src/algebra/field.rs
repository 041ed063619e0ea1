//! Finite fields used for coding and hashing.
//!
//! Two families are supported:
//!
//! * binary extension fields GF(2^w) for 2 <= w <= 16, each reduced by a
//!   fixed irreducible polynomial (the AES polynomial `0x11B` for w = 8);
//! * prime fields GF(q) for any prime q that fits in a `u64`.
//!
//! Symbols are stored as plain [`Symbol`] values in `[0, q)`. Vectors of
//! symbols carry their [`FieldSpec`] alongside, so hot loops never pay for
//! per-element field tags. [`FieldElement`] is the checked, self-describing
//! form used at API boundaries.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;

use super::prime::{is_prime_u64, mul_mod_u64, pow_mod_u64};
use super::AlgebraError;

/// A field symbol, always a reduced representative in `[0, q)`.
pub type Symbol = u64;

/// Irreducible polynomials for GF(2^w), indexed by w. Bit i is the
/// coefficient of x^i, including the leading term.
const BINARY_POLYS: [u32; 17] = [
    0, 0, 0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x83,    // x^7 + x + 1
    0x11B,   // x^8 + x^4 + x^3 + x + 1 (AES)
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4443,  // x^14 + x^10 + x^6 + x + 1
    0x8003,  // x^15 + x + 1
    0x1100B, // x^16 + x^12 + x^3 + x + 1
];

/// Description of a finite field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// GF(2^width) reduced by `poly`.
    Binary { width: u8, poly: u32 },
    /// Integers modulo a prime.
    Prime { modulus: u64 },
}

struct LogTables {
    /// exp[i] = gen^i, stored twice over so sums of two logs need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

static LOG_TABLES: [OnceLock<LogTables>; 17] = [const { OnceLock::new() }; 17];

/// Carry-less multiplication followed by reduction. Slow, table-free.
pub(crate) fn binary_mul_slow(mut a: u32, mut b: u32, width: u8, poly: u32) -> u32 {
    let top = 1u32 << width;
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    acc
}

fn build_tables(width: u8, poly: u32) -> LogTables {
    let order = 1usize << width;
    let group = order - 1;
    // The polynomials need not be primitive (0x11B is not), so search for a
    // generator of the multiplicative group instead of assuming x.
    let generator = (2..order as u32)
        .find(|&g| {
            let mut x = g;
            for i in 1..group {
                if x == 1 {
                    return i == group;
                }
                x = binary_mul_slow(x, g, width, poly);
            }
            x == 1
        })
        .expect("irreducible polynomial yields a cyclic multiplicative group");

    let mut exp = vec![0u32; 2 * group];
    let mut log = vec![0u32; order];
    let mut x = 1u32;
    for i in 0..group {
        exp[i] = x;
        exp[i + group] = x;
        log[x as usize] = i as u32;
        x = binary_mul_slow(x, generator, width, poly);
    }
    LogTables { exp, log }
}

impl FieldSpec {
    /// GF(2^width) with the fixed polynomial for that width.
    pub fn binary(width: u8) -> Result<Self, AlgebraError> {
        if !(2..=16).contains(&width) {
            return Err(AlgebraError::UnsupportedWidth(width));
        }
        Ok(FieldSpec::Binary {
            width,
            poly: BINARY_POLYS[width as usize],
        })
    }

    /// GF(2^8) with the AES polynomial, the default coding field.
    pub fn gf256() -> Self {
        FieldSpec::Binary {
            width: 8,
            poly: 0x11B,
        }
    }

    pub fn prime(modulus: u64) -> Result<Self, AlgebraError> {
        if !is_prime_u64(modulus) {
            return Err(AlgebraError::NotPrime(modulus));
        }
        Ok(FieldSpec::Prime { modulus })
    }

    /// Number of elements q.
    pub fn order(&self) -> u64 {
        match *self {
            FieldSpec::Binary { width, .. } => 1u64 << width,
            FieldSpec::Prime { modulus } => modulus,
        }
    }

    /// Bits needed to carry one symbol on the wire, ceil(log2 q).
    pub fn symbol_bits(&self) -> u32 {
        match *self {
            FieldSpec::Binary { width, .. } => width as u32,
            FieldSpec::Prime { modulus } => 64 - (modulus - 1).leading_zeros(),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, FieldSpec::Binary { .. })
    }

    #[inline]
    pub fn contains(&self, a: Symbol) -> bool {
        a < self.order()
    }

    fn tables(width: u8, poly: u32) -> &'static LogTables {
        LOG_TABLES[width as usize].get_or_init(|| build_tables(width, poly))
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        match *self {
            FieldSpec::Binary { .. } => a ^ b,
            FieldSpec::Prime { modulus } => {
                let s = a + b;
                if s >= modulus {
                    s - modulus
                } else {
                    s
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        match *self {
            FieldSpec::Binary { .. } => a,
            FieldSpec::Prime { modulus } => {
                if a == 0 {
                    0
                } else {
                    modulus - a
                }
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        match *self {
            FieldSpec::Binary { width, poly } => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let t = Self::tables(width, poly);
                t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as Symbol
            }
            FieldSpec::Prime { modulus } => mul_mod_u64(a, b, modulus),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a == 0 {
            return None;
        }
        Some(match *self {
            FieldSpec::Binary { width, poly } => {
                let t = Self::tables(width, poly);
                let group = (1u32 << width) - 1;
                t.exp[((group - t.log[a as usize]) % group) as usize] as Symbol
            }
            FieldSpec::Prime { modulus } => pow_mod_u64(a, modulus - 2, modulus),
        })
    }

    /// `a^e`, with 0^0 = 1.
    pub fn pow(&self, a: Symbol, e: u64) -> Symbol {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        match *self {
            FieldSpec::Binary { width, poly } => {
                let t = Self::tables(width, poly);
                let group = (1u64 << width) - 1;
                let l = (t.log[a as usize] as u64 * (e % group)) % group;
                t.exp[l as usize] as Symbol
            }
            FieldSpec::Prime { modulus } => pow_mod_u64(a, e, modulus),
        }
    }

    /// `acc + c * x` applied elementwise.
    pub fn axpy(&self, acc: &mut [Symbol], c: Symbol, x: &[Symbol]) {
        debug_assert_eq!(acc.len(), x.len());
        if c == 0 {
            return;
        }
        for (a, &v) in acc.iter_mut().zip(x) {
            *a = self.add(*a, self.mul(c, v));
        }
    }

    pub fn scale(&self, xs: &mut [Symbol], c: Symbol) {
        for x in xs {
            *x = self.mul(*x, c);
        }
    }

    pub fn dot(&self, a: &[Symbol], b: &[Symbol]) -> Symbol {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Symbol {
        rng.gen_range(0..self.order())
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Symbol {
        rng.gen_range(1..self.order())
    }

    pub fn random_vec<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<Symbol> {
        (0..len).map(|_| self.random(rng)).collect()
    }

    /// Wraps a raw value, rejecting values outside `[0, q)`.
    pub fn element(&self, value: Symbol) -> Result<FieldElement, AlgebraError> {
        if !self.contains(value) {
            return Err(AlgebraError::OutOfRange {
                value,
                order: self.order(),
            });
        }
        Ok(FieldElement { value, field: *self })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Binary { width, poly } => write!(f, "GF(2^{width}) mod {poly:#x}"),
            FieldSpec::Prime { modulus } => write!(f, "GF({modulus})"),
        }
    }
}

/// A field symbol tagged with the field it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: Symbol,
    field: FieldSpec,
}

impl FieldElement {
    pub fn value(&self) -> Symbol {
        self.value
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    fn same_field(&self, other: &FieldElement) -> Result<FieldSpec, AlgebraError> {
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        Ok(self.field)
    }

    fn with(&self, value: Symbol) -> FieldElement {
        FieldElement {
            value,
            field: self.field,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, AlgebraError> {
        let f = self.same_field(other)?;
        Ok(self.with(f.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, AlgebraError> {
        let f = self.same_field(other)?;
        Ok(self.with(f.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, AlgebraError> {
        let f = self.same_field(other)?;
        Ok(self.with(f.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElement, AlgebraError> {
        self.field
            .inv(self.value)
            .map(|v| self.with(v))
            .ok_or(AlgebraError::ZeroInverse)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.with(self.field.pow(self.value, e))
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
