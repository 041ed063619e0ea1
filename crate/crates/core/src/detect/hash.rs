//! Generation-level polynomial hash.
//!
//! Every source packet carries, for each block of k payload symbols
//! x_1..x_k, the hash symbol `h = Σ x_i^(i+1)`. Hash symbols ride through
//! recoding like any other symbol, so after a node decodes a (sub-)generation
//! each recovered source must again satisfy its own hash. The hash is
//! nonlinear: an adversary who has not seen the whole code cannot steer a
//! corruption so that the decoded sources stay consistent, except through a
//! root of a degree-(k+1) polynomial.

use crate::algebra::{FieldSpec, Symbol};
use crate::rlnc::{Decoded, SubGeneration};

use super::DetectError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HashParams {
    k: usize,
    s: usize,
    field: FieldSpec,
}

impl HashParams {
    /// `k` payload symbols per hash symbol; `s` degrees of freedom of the
    /// code hidden from the adversary.
    pub fn new(k: usize, s: usize, field: FieldSpec) -> Result<Self, DetectError> {
        if k == 0 || s == 0 {
            return Err(DetectError::InvalidParams(format!(
                "hash block length k={k} and secrecy s={s} must both be positive"
            )));
        }
        Ok(HashParams { k, s, field })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Hash symbols appended to a payload of `data_symbols`.
    pub fn symbols_for(&self, data_symbols: usize) -> usize {
        data_symbols.div_ceil(self.k)
    }

    /// Hash symbols as a share of payload plus hash, 1/(k+1).
    pub fn overhead_fraction(&self) -> f64 {
        1.0 / (self.k as f64 + 1.0)
    }

    /// Upper bound ((k+1)/q)^s on the chance a blind corruption goes unnoticed.
    pub fn miss_bound(&self) -> f64 {
        ((self.k as f64 + 1.0) / self.field.order() as f64)
            .powi(self.s as i32)
            .min(1.0)
    }

    pub fn detection_bound(&self) -> f64 {
        1.0 - self.miss_bound()
    }
}

/// Hash symbols for one payload. A short last block is zero-padded, which
/// leaves its sum unchanged.
pub fn gen_hash_append(payload: &[Symbol], params: &HashParams) -> Vec<Symbol> {
    let f = params.field;
    payload
        .chunks(params.k)
        .map(|block| {
            block
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &x)| f.add(acc, f.pow(x, i as u64 + 2)))
        })
        .collect()
}

/// Outcome of a full-generation hash check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Valid,
    Corrupted,
}

/// Outcome of checking a partial view of a generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubspanVerdict {
    Valid,
    Corrupted,
    /// The received span does not pin down every source it touches.
    Inconclusive,
}

fn hash_matches(payload: &[Symbol], hash: &[Symbol], params: &HashParams) -> Result<bool, DetectError> {
    let expected = params.symbols_for(payload.len());
    if hash.len() != expected {
        return Err(DetectError::LengthMismatch {
            expected,
            got: hash.len(),
        });
    }
    Ok(gen_hash_append(payload, params) == hash)
}

/// Checks every decoded source packet against its own hash symbols.
pub fn gen_hash_verify(decoded: &Decoded, params: &HashParams) -> Result<Verdict, DetectError> {
    let mut valid = decoded.consistent;
    for (payload, hash) in decoded.payloads.iter().zip(&decoded.hashes) {
        // Keep scanning after a mismatch so shape errors always surface.
        valid &= hash_matches(payload, hash, params)?;
    }
    Ok(if valid { Verdict::Valid } else { Verdict::Corrupted })
}

/// Verdict plus whatever the sub-generation revealed about its sources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspanCheck {
    pub verdict: SubspanVerdict,
    pub decode: crate::rlnc::PartialDecode,
}

/// Checks a sub-generation inside its own span.
///
/// Row-reduces the received combinations. A dependent combination with a
/// nonzero payload, or a recovered source whose hash disagrees, proves
/// corruption. If every source in the support is recovered and consistent the
/// unit is valid; otherwise the span is too small to decide.
pub fn check_subspan(sub: &SubGeneration, params: &HashParams) -> SubspanCheck {
    let decode = sub.decode_partial();
    let mismatch = decode.contradiction
        || decode
            .recovered
            .iter()
            .any(|r| !hash_matches(&r.payload, &r.hash, params).unwrap_or(false));
    let verdict = if mismatch {
        SubspanVerdict::Corrupted
    } else if decode.is_complete() {
        SubspanVerdict::Valid
    } else {
        SubspanVerdict::Inconclusive
    };
    SubspanCheck { verdict, decode }
}

pub fn gen_hash_verify_subspan(sub: &SubGeneration, params: &HashParams) -> SubspanVerdict {
    check_subspan(sub, params).verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rlnc::{decode, random_generation, subgeneration_view, GenerationParams, Packet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Evaluates Σ x_i^(i+1) with naive repeated multiplication.
    fn brute_hash(block: &[Symbol], f: &FieldSpec) -> Symbol {
        let mut acc = 0;
        for (i, &x) in block.iter().enumerate() {
            let mut term = 1;
            for _ in 0..i + 2 {
                term = f.mul(term, x);
            }
            acc = f.add(acc, term);
        }
        acc
    }

    #[test]
    fn hash_examples() {
        let f = FieldSpec::gf256();
        let p = HashParams::new(4, 1, f).unwrap();
        assert_eq!(gen_hash_append(&[0; 8], &p), vec![0, 0]);

        let p1 = HashParams::new(1, 1, f).unwrap();
        for a in 0..256 {
            assert_eq!(gen_hash_append(&[a], &p1), vec![f.mul(a, a)]);
        }

        let f3 = FieldSpec::binary(3).unwrap();
        let p3 = HashParams::new(3, 1, f3).unwrap();
        assert_eq!(gen_hash_append(&[1, 1, 1], &p3), vec![1]);
        assert_eq!(brute_hash(&[1, 1, 1], &f3), 1);
    }

    #[test]
    fn hash_matches_brute_force_with_padding() {
        let f = FieldSpec::binary(7).unwrap();
        let p = HashParams::new(5, 1, f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for len in 0..23 {
            let payload = f.random_vec(len, &mut rng);
            let expected: Vec<Symbol> = payload.chunks(5).map(|b| brute_hash(b, &f)).collect();
            assert_eq!(gen_hash_append(&payload, &p), expected);
            assert_eq!(expected.len(), p.symbols_for(len));
        }
    }

    #[test]
    fn paper_detection_bounds() {
        let p = HashParams::new(50, 5, FieldSpec::binary(7).unwrap()).unwrap();
        assert!(p.detection_bound() >= 0.989);
        assert!((p.overhead_fraction() - 0.02).abs() < 1e-3);
        let p = HashParams::new(100, 5, FieldSpec::gf256()).unwrap();
        assert!(p.detection_bound() >= 0.990);
        assert!((p.overhead_fraction() - 0.01).abs() < 1e-4);
        assert!(HashParams::new(0, 1, FieldSpec::gf256()).is_err());
    }

    fn hashed(g: usize, k_data: usize, k: usize) -> GenerationParams {
        let f = FieldSpec::gf256();
        GenerationParams::new(f, g, k_data, Some(HashParams::new(k, 1, f).unwrap())).unwrap()
    }

    #[test]
    fn untouched_generation_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (gen, _) = random_generation(0, hashed(6, 30, 10), &mut rng);
            let d = decode(&gen.encode_innovative(&mut rng), 6).unwrap();
            assert_eq!(
                gen_hash_verify(&d, gen.params.hash().unwrap()).unwrap(),
                Verdict::Valid
            );
        }
    }

    #[test]
    fn single_flip_miss_rate_within_root_bound() {
        // One payload symbol of one coded packet flipped, hash left alone.
        let k = 8;
        let params = hashed(4, k, k);
        let hp = params.hash().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let trials = 20_000;
        let mut misses = 0;
        for _ in 0..trials {
            let (gen, _) = random_generation(0, params.clone(), &mut rng);
            let mut coded = gen.encode_innovative(&mut rng);
            let j = rng.gen_range(0..coded.len());
            let t = rng.gen_range(0..k);
            let old = coded[j].vector.payload[t];
            coded[j].vector.payload[t] = (old + rng.gen_range(1..256)) % 256;
            let d = decode(&coded, 4).unwrap();
            if gen_hash_verify(&d, &hp).unwrap() == Verdict::Valid {
                misses += 1;
            }
        }
        let rate = misses as f64 / trials as f64;
        assert!(rate <= (k as f64 + 1.0) / 256.0, "miss rate {rate}");
    }

    #[test]
    fn verify_rejects_wrong_shape() {
        let f = FieldSpec::gf256();
        let hp = HashParams::new(4, 1, f).unwrap();
        let d = Decoded {
            generation: 0,
            payloads: vec![vec![1; 8]],
            hashes: vec![vec![0]],
            consistent: true,
        };
        assert!(matches!(
            gen_hash_verify(&d, &hp),
            Err(DetectError::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn subspan_verdicts() {
        let params = hashed(8, 12, 4);
        let hp = params.hash().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (gen, _) = random_generation(0, params, &mut rng);

        let half = gen.encode_innovative_over(&[0, 1, 2, 3], &mut rng);
        let sub = subgeneration_view(&half, 4).unwrap();
        assert_eq!(gen_hash_verify_subspan(&sub, &hp), SubspanVerdict::Valid);

        let full = gen.encode_innovative(&mut rng);
        assert_eq!(
            gen_hash_verify_subspan(&subgeneration_view(&full, 8).unwrap(), &hp),
            SubspanVerdict::Valid
        );

        let mut bad = half.clone();
        bad[1].vector.payload[5] ^= 0x40;
        assert_eq!(
            gen_hash_verify_subspan(&subgeneration_view(&bad, 4).unwrap(), &hp),
            SubspanVerdict::Corrupted
        );

        let one = gen.encode(1, &mut rng);
        assert_eq!(
            gen_hash_verify_subspan(&subgeneration_view(&one, 1).unwrap(), &hp),
            SubspanVerdict::Inconclusive
        );

        let empty = subgeneration_view::<Packet>(&[], 0).unwrap();
        assert_eq!(gen_hash_verify_subspan(&empty, &hp), SubspanVerdict::Valid);
    }
}
