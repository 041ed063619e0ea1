//! Byzantine corruption of the packet stream arriving at a node.
//!
//! Each packet is hit independently with probability p. Corruption happens
//! upstream of the observed node, and every corrupted packet is tagged
//! [`Origin::Corrupted`] and differs from the original in at least one symbol.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{FieldSpec, Symbol};
use crate::detect::hash::{gen_hash_append, HashParams};
use crate::rlnc::{Origin, Packet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("attack probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("cannot forge {s} packets out of {available}")]
    TooManyForgeries { s: usize, available: usize },
}

/// What a corrupted packet looks like.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttackMode {
    /// One uniformly chosen payload symbol replaced by a different value.
    RandomSymbol,
    /// The whole payload replaced; hash symbols untouched.
    RandomPayload,
    /// Payload replaced and the packet's own hash symbols recomputed to match.
    HashAwareForgery(HashParams),
    /// Forges `s` packets of a generation without reading the rest.
    BlindSPacket { s: usize, hash: HashParams },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackModel {
    p: f64,
    mode: AttackMode,
    seed: u64,
}

impl AttackModel {
    pub fn new(p: f64, mode: AttackMode, seed: u64) -> Result<Self, AdversaryError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(AdversaryError::InvalidProbability(p));
        }
        Ok(AttackModel { p, mode, seed })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> &AttackMode {
        &self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_p(&self, p: f64) -> Result<Self, AdversaryError> {
        Self::new(p, self.mode.clone(), self.seed)
    }

    fn forging_hash(&self) -> Option<&HashParams> {
        match &self.mode {
            AttackMode::HashAwareForgery(h) | AttackMode::BlindSPacket { hash: h, .. } => Some(h),
            _ => None,
        }
    }
}

fn nonzero_vec<R: Rng + ?Sized>(field: &FieldSpec, len: usize, rng: &mut R) -> Vec<Symbol> {
    loop {
        let v = field.random_vec(len, rng);
        if v.iter().any(|&s| s != 0) {
            return v;
        }
    }
}

/// Adds a nonzero random offset to the payload, which is the same as drawing
/// a uniformly random different payload.
fn replace_payload<R: Rng + ?Sized>(packet: &mut Packet, rng: &mut R) {
    let v = &mut packet.vector;
    let field = v.field;
    if v.payload.is_empty() {
        let t = rng.gen_range(0..v.coeffs.len());
        v.coeffs[t] = field.add(v.coeffs[t], field.random_nonzero(rng));
        return;
    }
    let offset = nonzero_vec(&field, v.payload.len(), rng);
    for (x, d) in v.payload.iter_mut().zip(offset) {
        *x = field.add(*x, d);
    }
}

fn refresh_hash(packet: &mut Packet, hash: &HashParams) {
    let v = &mut packet.vector;
    if v.hash.len() == hash.symbols_for(v.payload.len()) {
        v.hash = gen_hash_append(&v.payload, hash);
    }
}

/// Rewrites one packet according to `mode` and tags it corrupted.
pub fn corrupt_packet<R: Rng + ?Sized>(packet: &mut Packet, mode: &AttackMode, rng: &mut R) {
    let field = packet.vector.field;
    match mode {
        AttackMode::RandomSymbol => {
            let v = &mut packet.vector;
            let target = if v.payload.is_empty() {
                &mut v.coeffs
            } else {
                &mut v.payload
            };
            let t = rng.gen_range(0..target.len());
            target[t] = field.add(target[t], field.random_nonzero(rng));
        }
        AttackMode::RandomPayload => replace_payload(packet, rng),
        AttackMode::HashAwareForgery(h) | AttackMode::BlindSPacket { hash: h, .. } => {
            let before = packet.vector.clone();
            // Re-deriving the hash can in principle reproduce the original
            // packet exactly (when the payload offset lands on coeffs).
            loop {
                replace_payload(packet, rng);
                refresh_hash(packet, h);
                if packet.vector != before {
                    break;
                }
            }
        }
    }
    packet.origin = Origin::Corrupted;
}

/// Bernoulli(p) corruption of every packet, using a caller-supplied stream.
pub fn corrupt_stream_with<R: Rng + ?Sized>(
    mut packets: Vec<Packet>,
    model: &AttackModel,
    rng: &mut R,
) -> Vec<Packet> {
    for packet in &mut packets {
        if rng.gen_bool(model.p) {
            corrupt_packet(packet, &model.mode, rng);
        }
    }
    packets
}

/// Bernoulli(p) corruption seeded from the model; identical inputs give
/// identical outputs.
pub fn corrupt_stream(packets: Vec<Packet>, model: &AttackModel) -> Vec<Packet> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    corrupt_stream_with(packets, model, &mut rng)
}

/// Replaces `s` randomly placed packets of one generation with forgeries
/// built without reading any other packet: encoding vector kept, payload
/// drawn fresh and, if the model knows the hash, hash symbols made to match.
pub fn blind_forge_with<R: Rng + ?Sized>(
    mut packets: Vec<Packet>,
    s: usize,
    model: &AttackModel,
    rng: &mut R,
) -> Result<Vec<Packet>, AdversaryError> {
    if s > packets.len() {
        return Err(AdversaryError::TooManyForgeries {
            s,
            available: packets.len(),
        });
    }
    let mode = match model.forging_hash() {
        Some(h) => AttackMode::HashAwareForgery(h.clone()),
        None => AttackMode::RandomPayload,
    };
    for i in index::sample(rng, packets.len(), s) {
        corrupt_packet(&mut packets[i], &mode, rng);
    }
    Ok(packets)
}

pub fn blind_forge_generation(
    packets: Vec<Packet>,
    s: usize,
    model: &AttackModel,
) -> Result<Vec<Packet>, AdversaryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    blind_forge_with(packets, s, model, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rlnc::{random_generation, GenerationParams};

    fn stream(count: usize, hashed: bool) -> Vec<Packet> {
        let f = FieldSpec::gf256();
        let hash = hashed.then(|| HashParams::new(4, 1, f).unwrap());
        let params = GenerationParams::new(f, 4, 8, hash).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut out = Vec::new();
        let mut id = 0;
        while out.len() < count {
            let (gen, _) = random_generation(id, params.clone(), &mut rng);
            out.extend(gen.encode(4, &mut rng));
            id += 1;
        }
        out.truncate(count);
        out
    }

    #[test]
    fn extremes() {
        let s = stream(100, false);
        let none = AttackModel::new(0.0, AttackMode::RandomSymbol, 1).unwrap();
        assert_eq!(corrupt_stream(s.clone(), &none), s);
        let all = AttackModel::new(1.0, AttackMode::RandomSymbol, 1).unwrap();
        let out = corrupt_stream(s.clone(), &all);
        for (a, b) in out.iter().zip(&s) {
            assert!(a.is_corrupted());
            assert_ne!(a.vector, b.vector);
        }
        assert!(AttackModel::new(1.5, AttackMode::RandomSymbol, 1).is_err());
        assert!(AttackModel::new(-0.1, AttackMode::RandomSymbol, 1).is_err());
    }

    #[test]
    fn binomial_count() {
        let m = 100_000;
        let s = stream(m, false);
        let model = AttackModel::new(0.1, AttackMode::RandomSymbol, 5).unwrap();
        let hit = corrupt_stream(s, &model)
            .iter()
            .filter(|p| p.is_corrupted())
            .count();
        let sigma = (m as f64 * 0.1 * 0.9).sqrt();
        assert!((hit as f64 - 10_000.0).abs() <= 3.0 * sigma, "{hit}");
    }

    #[test]
    fn reproducible_and_always_different() {
        let s = stream(500, true);
        let h = HashParams::new(4, 1, FieldSpec::gf256()).unwrap();
        for mode in [
            AttackMode::RandomSymbol,
            AttackMode::RandomPayload,
            AttackMode::HashAwareForgery(h.clone()),
            AttackMode::BlindSPacket {
                s: 2,
                hash: h.clone(),
            },
        ] {
            let model = AttackModel::new(0.5, mode, 77).unwrap();
            let a = corrupt_stream(s.clone(), &model);
            assert_eq!(a, corrupt_stream(s.clone(), &model));
            for (x, y) in a.iter().zip(&s) {
                assert_eq!(x.is_corrupted(), x.vector != y.vector);
            }
        }
    }

    #[test]
    fn random_symbol_touches_one_symbol_and_not_the_hash() {
        let s = stream(200, true);
        let model = AttackModel::new(1.0, AttackMode::RandomSymbol, 3).unwrap();
        for (x, y) in corrupt_stream(s.clone(), &model).iter().zip(&s) {
            let diffs = x
                .vector
                .payload
                .iter()
                .zip(&y.vector.payload)
                .filter(|(a, b)| a != b)
                .count();
            assert_eq!(diffs, 1);
            assert_eq!(x.vector.hash, y.vector.hash);
            assert_eq!(x.vector.coeffs, y.vector.coeffs);
        }
    }

    #[test]
    fn hash_aware_forgery_is_self_consistent() {
        let s = stream(50, true);
        let h = HashParams::new(4, 1, FieldSpec::gf256()).unwrap();
        let model = AttackModel::new(1.0, AttackMode::HashAwareForgery(h.clone()), 3).unwrap();
        for x in corrupt_stream(s, &model) {
            assert_eq!(x.vector.hash, gen_hash_append(&x.vector.payload, &h));
        }
    }

    #[test]
    fn blind_forging() {
        let s = stream(8, true);
        let h = HashParams::new(4, 5, FieldSpec::gf256()).unwrap();
        let model = AttackModel::new(1.0, AttackMode::BlindSPacket { s: 3, hash: h }, 4).unwrap();
        assert_eq!(blind_forge_generation(s.clone(), 0, &model).unwrap(), s);
        let out = blind_forge_generation(s.clone(), 3, &model).unwrap();
        assert_eq!(out.iter().filter(|p| p.is_corrupted()).count(), 3);
        let all = blind_forge_generation(s.clone(), 8, &model).unwrap();
        assert!(all.iter().all(Packet::is_corrupted));
        assert_eq!(
            blind_forge_generation(s, 9, &model).unwrap_err(),
            AdversaryError::TooManyForgeries { s: 9, available: 8 }
        );
    }
}
