//! Random block linear network coding.
//!
//! A source cuts its data into generations of G packets. Every packet on the
//! wire carries its encoding vector (G coefficients over the source packets
//! of its generation), the payload symbols, and optionally polynomial-hash
//! symbols. Nodes recode by drawing fresh random combinations of what they
//! hold; packets of different generations are never mixed.

pub mod linalg;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{FieldSpec, Symbol};
use crate::detect::hash::{gen_hash_append, HashParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RlncError {
    #[error("no packets supplied")]
    Empty,
    #[error("packets from different generations or fields cannot be mixed")]
    MixedGenerations,
    #[error("{what}: expected {expected}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("not decodable: rank {rank} of {needed}")]
    NotDecodable { rank: usize, needed: usize },
    #[error("packet of {packet_bits} bits does not equal {symbols} symbols of {symbol_bits} bits")]
    Accounting {
        packet_bits: u64,
        symbols: usize,
        symbol_bits: u32,
    },
    #[error("a {packet_bits}-bit packet has no room for payload after {overhead} header symbols")]
    NoRoom { packet_bits: u64, overhead: usize },
    #[error("generation size must be at least 1")]
    EmptyGeneration,
}

/// Shape of every packet in a generation.
///
/// The wire size obeys `n = (G + k_data + hash symbols) * symbol_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationParams {
    field: FieldSpec,
    generation_size: usize,
    data_symbols: usize,
    hash: Option<HashParams>,
}

impl GenerationParams {
    pub fn new(
        field: FieldSpec,
        generation_size: usize,
        data_symbols: usize,
        hash: Option<HashParams>,
    ) -> Result<Self, RlncError> {
        if generation_size == 0 {
            return Err(RlncError::EmptyGeneration);
        }
        if let Some(h) = &hash {
            if h.field() != field {
                return Err(RlncError::MixedGenerations);
            }
        }
        Ok(GenerationParams {
            field,
            generation_size,
            data_symbols,
            hash,
        })
    }

    /// Like [`GenerationParams::new`], additionally checking the wire-size identity
    /// against a stated packet length in bits.
    pub fn with_packet_bits(
        field: FieldSpec,
        packet_bits: u64,
        generation_size: usize,
        data_symbols: usize,
        hash: Option<HashParams>,
    ) -> Result<Self, RlncError> {
        let params = Self::new(field, generation_size, data_symbols, hash)?;
        if params.packet_bits() != packet_bits {
            return Err(RlncError::Accounting {
                packet_bits,
                symbols: params.wire_symbols(),
                symbol_bits: field.symbol_bits(),
            });
        }
        Ok(params)
    }

    /// Largest payload that fits in `packet_bits` next to the encoding vector
    /// and hash symbols. The resulting wire size may fall short of
    /// `packet_bits` by less than one symbol.
    pub fn fit(
        field: FieldSpec,
        packet_bits: u64,
        generation_size: usize,
        hash: Option<HashParams>,
    ) -> Result<Self, RlncError> {
        let budget = (packet_bits / field.symbol_bits() as u64) as usize;
        let hash_for = |k: usize| hash.as_ref().map_or(0, |h| h.symbols_for(k));
        let mut k = budget.saturating_sub(generation_size);
        while k > 0 && generation_size + k + hash_for(k) > budget {
            k -= 1;
        }
        if k == 0 {
            return Err(RlncError::NoRoom {
                packet_bits,
                overhead: generation_size + hash_for(1),
            });
        }
        Self::new(field, generation_size, k, hash)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// G.
    pub fn generation_size(&self) -> usize {
        self.generation_size
    }

    /// k_data.
    pub fn data_symbols(&self) -> usize {
        self.data_symbols
    }

    pub fn hash(&self) -> Option<&HashParams> {
        self.hash.as_ref()
    }

    pub fn hash_symbols(&self) -> usize {
        self.hash.as_ref().map_or(0, |h| h.symbols_for(self.data_symbols))
    }

    pub fn wire_symbols(&self) -> usize {
        self.generation_size + self.data_symbols + self.hash_symbols()
    }

    /// n, the packet length on the wire.
    pub fn packet_bits(&self) -> u64 {
        self.wire_symbols() as u64 * self.field.symbol_bits() as u64
    }
}

/// Ground truth about a packet, kept out of reach of the detectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Valid,
    Corrupted,
}

/// The contents of a packet as seen on the wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedVector {
    pub generation: u64,
    pub field: FieldSpec,
    pub coeffs: Vec<Symbol>,
    pub payload: Vec<Symbol>,
    pub hash: Vec<Symbol>,
}

impl CodedVector {
    /// coeffs ‖ payload ‖ hash.
    pub fn augmented(&self) -> Vec<Symbol> {
        let mut v = Vec::with_capacity(self.coeffs.len() + self.payload.len() + self.hash.len());
        v.extend_from_slice(&self.coeffs);
        v.extend_from_slice(&self.payload);
        v.extend_from_slice(&self.hash);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs
            .iter()
            .chain(&self.payload)
            .chain(&self.hash)
            .all(|&s| s == 0)
    }

    fn same_shape(&self, other: &CodedVector) -> bool {
        self.generation == other.generation
            && self.field == other.field
            && self.coeffs.len() == other.coeffs.len()
            && self.payload.len() == other.payload.len()
            && self.hash.len() == other.hash.len()
    }
}

impl AsRef<CodedVector> for CodedVector {
    fn as_ref(&self) -> &CodedVector {
        self
    }
}

/// A coded vector plus its simulation-only ground-truth tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packet {
    pub vector: CodedVector,
    pub origin: Origin,
}

impl Packet {
    pub fn is_corrupted(&self) -> bool {
        self.origin == Origin::Corrupted
    }
}

impl AsRef<CodedVector> for Packet {
    fn as_ref(&self) -> &CodedVector {
        &self.vector
    }
}

/// G source packets, mixed only among themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generation {
    pub id: u64,
    pub params: GenerationParams,
    pub source_payloads: Vec<Vec<Symbol>>,
    pub source_hashes: Vec<Vec<Symbol>>,
}

impl Generation {
    /// Source packet i, with encoding vector e_i.
    pub fn source_vector(&self, i: usize) -> CodedVector {
        let mut coeffs = vec![0; self.params.generation_size()];
        coeffs[i] = 1;
        CodedVector {
            generation: self.id,
            field: self.params.field(),
            coeffs,
            payload: self.source_payloads[i].clone(),
            hash: self.source_hashes[i].clone(),
        }
    }

    pub fn source_packets(&self) -> Vec<Packet> {
        (0..self.params.generation_size())
            .map(|i| Packet {
                vector: self.source_vector(i),
                origin: Origin::Valid,
            })
            .collect()
    }

    /// Rows (e_i ‖ x_i ‖ h_i) spanning the valid subspace.
    pub fn augmented_rows(&self) -> Vec<Vec<Symbol>> {
        (0..self.params.generation_size())
            .map(|i| self.source_vector(i).augmented())
            .collect()
    }

    /// The valid packet with the given encoding vector.
    pub fn expected_vector(&self, coeffs: &[Symbol]) -> CodedVector {
        let f = self.params.field();
        let mut payload = vec![0; self.params.data_symbols()];
        let mut hash = vec![0; self.params.hash_symbols()];
        for (i, &c) in coeffs.iter().enumerate() {
            f.axpy(&mut payload, c, &self.source_payloads[i]);
            f.axpy(&mut hash, c, &self.source_hashes[i]);
        }
        CodedVector {
            generation: self.id,
            field: f,
            coeffs: coeffs.to_vec(),
            payload,
            hash,
        }
    }

    /// `count` random combinations of the source packets.
    pub fn encode<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Packet> {
        let f = self.params.field();
        (0..count)
            .map(|_| Packet {
                vector: self.expected_vector(&f.random_vec(self.params.generation_size(), rng)),
                origin: Origin::Valid,
            })
            .collect()
    }

    /// G random combinations whose encoding vectors are linearly independent,
    /// i.e. a full generation's worth of innovative packets.
    pub fn encode_innovative<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Packet> {
        self.encode_innovative_over(&(0..self.params.generation_size()).collect::<Vec<_>>(), rng)
    }

    /// `support.len()` random combinations of the listed source packets with
    /// independent encoding vectors, all zero outside `support`.
    pub fn encode_innovative_over<R: Rng + ?Sized>(&self, support: &[usize], rng: &mut R) -> Vec<Packet> {
        let f = self.params.field();
        let g = self.params.generation_size();
        loop {
            let local: Vec<Vec<Symbol>> = (0..support.len())
                .map(|_| f.random_vec(support.len(), rng))
                .collect();
            if linalg::rank(&f, local.clone()) < support.len() {
                continue;
            }
            return local
                .iter()
                .map(|row| {
                    let mut coeffs = vec![0; g];
                    for (&c, &i) in row.iter().zip(support) {
                        coeffs[i] = c;
                    }
                    Packet {
                        vector: self.expected_vector(&coeffs),
                        origin: Origin::Valid,
                    }
                })
                .collect();
        }
    }
}

/// Builds generation `id` from a G × k_data payload matrix. Source packet i
/// gets encoding vector e_i and, when the params carry a hash scheme, its
/// polynomial-hash symbols.
pub fn make_generation(
    id: u64,
    payloads: Vec<Vec<Symbol>>,
    params: GenerationParams,
) -> Result<(Generation, Vec<Packet>), RlncError> {
    if payloads.len() != params.generation_size() {
        return Err(RlncError::Shape {
            what: "source packets",
            expected: params.generation_size(),
            got: payloads.len(),
        });
    }
    let field = params.field();
    for row in &payloads {
        if row.len() != params.data_symbols() {
            return Err(RlncError::Shape {
                what: "payload symbols",
                expected: params.data_symbols(),
                got: row.len(),
            });
        }
        debug_assert!(row.iter().all(|&s| field.contains(s)));
    }
    let source_hashes = payloads
        .iter()
        .map(|row| params.hash().map_or_else(Vec::new, |h| gen_hash_append(row, h)))
        .collect();
    let generation = Generation {
        id,
        params,
        source_payloads: payloads,
        source_hashes,
    };
    let packets = generation.source_packets();
    Ok((generation, packets))
}

/// A generation with uniformly random payloads.
pub fn random_generation<R: Rng + ?Sized>(
    id: u64,
    params: GenerationParams,
    rng: &mut R,
) -> (Generation, Vec<Packet>) {
    let f = params.field();
    let payloads = (0..params.generation_size())
        .map(|_| f.random_vec(params.data_symbols(), rng))
        .collect();
    make_generation(id, payloads, params).expect("shape is correct by construction")
}

fn check_mixable(packets: &[Packet]) -> Result<(), RlncError> {
    let first = packets.first().ok_or(RlncError::Empty)?;
    if packets.iter().any(|p| !p.vector.same_shape(&first.vector)) {
        return Err(RlncError::MixedGenerations);
    }
    Ok(())
}

/// Σ c_j · packet_j over encoding vector, payload and hash alike. The result
/// is tagged corrupted if any input with a nonzero coefficient is.
pub fn combine_with(packets: &[Packet], coeffs: &[Symbol]) -> Result<Packet, RlncError> {
    check_mixable(packets)?;
    if coeffs.len() != packets.len() {
        return Err(RlncError::Shape {
            what: "combination coefficients",
            expected: packets.len(),
            got: coeffs.len(),
        });
    }
    let first = &packets[0].vector;
    let f = first.field;
    let mut out = CodedVector {
        generation: first.generation,
        field: f,
        coeffs: vec![0; first.coeffs.len()],
        payload: vec![0; first.payload.len()],
        hash: vec![0; first.hash.len()],
    };
    let mut origin = Origin::Valid;
    for (p, &c) in packets.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        f.axpy(&mut out.coeffs, c, &p.vector.coeffs);
        f.axpy(&mut out.payload, c, &p.vector.payload);
        f.axpy(&mut out.hash, c, &p.vector.hash);
        if p.is_corrupted() {
            origin = Origin::Corrupted;
        }
    }
    Ok(Packet { vector: out, origin })
}

/// Recodes: a combination with coefficients drawn uniformly from the field,
/// zero included.
pub fn random_combine<R: Rng + ?Sized>(packets: &[Packet], rng: &mut R) -> Result<Packet, RlncError> {
    check_mixable(packets)?;
    let coeffs = packets[0].vector.field.random_vec(packets.len(), rng);
    combine_with(packets, &coeffs)
}

/// Source packets recovered from a full-rank set of coded packets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub generation: u64,
    pub payloads: Vec<Vec<Symbol>>,
    pub hashes: Vec<Vec<Symbol>>,
    /// False when surplus packets contradict the solution; only possible
    /// if something was corrupted.
    pub consistent: bool,
}

/// Gaussian elimination over the coding field.
///
/// Fewer than G packets, or a coefficient matrix of rank below G, gives
/// [`RlncError::NotDecodable`]: an erasure, not a sign of corruption.
pub fn decode<V: AsRef<CodedVector>>(packets: &[V], generation_size: usize) -> Result<Decoded, RlncError> {
    let first = packets.first().ok_or(RlncError::NotDecodable {
        rank: 0,
        needed: generation_size,
    })?;
    let first = first.as_ref();
    if first.coeffs.len() != generation_size {
        return Err(RlncError::Shape {
            what: "encoding vector length",
            expected: generation_size,
            got: first.coeffs.len(),
        });
    }
    if packets.iter().any(|p| !p.as_ref().same_shape(first)) {
        return Err(RlncError::MixedGenerations);
    }
    let rows = packets.iter().map(|p| p.as_ref().augmented()).collect();
    let ech = linalg::reduce(&first.field, rows, generation_size);
    if ech.rank() < generation_size {
        return Err(RlncError::NotDecodable {
            rank: ech.rank(),
            needed: generation_size,
        });
    }
    let k = first.payload.len();
    let consistent = ech.residual_rows().iter().all(|r| r.iter().all(|&s| s == 0));
    let (payloads, hashes) = ech.rows[..generation_size]
        .iter()
        .map(|r| {
            (
                r[generation_size..generation_size + k].to_vec(),
                r[generation_size + k..].to_vec(),
            )
        })
        .unzip();
    Ok(Decoded {
        generation: first.generation,
        payloads,
        hashes,
        consistent,
    })
}

/// Received combinations of one generation, checked together as a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubGeneration {
    pub generation: u64,
    pub expected_count: usize,
    pub vectors: Vec<CodedVector>,
}

/// A source packet pinned down by a sub-generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredSource {
    pub index: usize,
    pub payload: Vec<Symbol>,
    pub hash: Vec<Symbol>,
}

/// What a sub-generation's span determines about its sources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialDecode {
    pub rank: usize,
    /// Source indices with a nonzero coefficient in some received vector.
    pub support: Vec<usize>,
    /// Sources whose unit vector lies in the received span.
    pub recovered: Vec<RecoveredSource>,
    /// A dependent combination carries nonzero payload or hash.
    pub contradiction: bool,
}

impl PartialDecode {
    pub fn is_complete(&self) -> bool {
        self.recovered.len() == self.support.len()
    }
}

impl SubGeneration {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn decode_partial(&self) -> PartialDecode {
        let Some(first) = self.vectors.first() else {
            return PartialDecode {
                rank: 0,
                support: Vec::new(),
                recovered: Vec::new(),
                contradiction: false,
            };
        };
        let g = first.coeffs.len();
        let k = first.payload.len();
        let support = (0..g)
            .filter(|&i| self.vectors.iter().any(|v| v.coeffs[i] != 0))
            .collect();
        let ech = linalg::reduce(
            &first.field,
            self.vectors.iter().map(CodedVector::augmented).collect(),
            g,
        );
        let recovered = ech
            .pivots
            .iter()
            .zip(&ech.rows)
            .filter(|(&col, row)| row[..g].iter().enumerate().all(|(j, &c)| j == col || c == 0))
            .map(|(&col, row)| RecoveredSource {
                index: col,
                payload: row[g..g + k].to_vec(),
                hash: row[g + k..].to_vec(),
            })
            .collect();
        let contradiction = ech.residual_rows().iter().any(|r| r[g..].iter().any(|&s| s != 0));
        PartialDecode {
            rank: ech.rank(),
            support,
            recovered,
            contradiction,
        }
    }
}

/// Groups received packets of one generation into a checkable unit.
pub fn subgeneration_view<V: AsRef<CodedVector>>(
    packets: &[V],
    expected_count: usize,
) -> Result<SubGeneration, RlncError> {
    let vectors: Vec<CodedVector> = packets.iter().map(|p| p.as_ref().clone()).collect();
    if let Some(first) = vectors.first() {
        if vectors.iter().any(|v| !v.same_shape(first)) {
            return Err(RlncError::MixedGenerations);
        }
    }
    Ok(SubGeneration {
        generation: vectors.first().map_or(0, |v| v.generation),
        expected_count,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(g: usize, k: usize) -> GenerationParams {
        GenerationParams::new(FieldSpec::gf256(), g, k, None).unwrap()
    }

    #[test]
    fn single_packet_generation() {
        let (gen, packets) = make_generation(0, vec![vec![7, 9]], params(1, 2)).unwrap();
        assert_eq!(packets.len(), 1);
        assert_eq!(packets[0].vector.coeffs, vec![1]);
        assert_eq!(gen.source_payloads, vec![vec![7, 9]]);
    }

    #[test]
    fn zero_payload_generation() {
        let (_, packets) = make_generation(3, vec![vec![0; 5]; 4], params(4, 5)).unwrap();
        for (i, p) in packets.iter().enumerate() {
            assert!(p.vector.payload.iter().all(|&s| s == 0));
            let unit: Vec<Symbol> = (0..4).map(|j| Symbol::from(i == j)).collect();
            assert_eq!(p.vector.coeffs, unit);
            assert_eq!(p.vector.generation, 3);
        }
    }

    #[test]
    fn hashed_generation_carries_one_symbol_per_block() {
        let f = FieldSpec::binary(7).unwrap();
        let h = HashParams::new(50, 5, f).unwrap();
        let p = GenerationParams::new(f, 50, 50, Some(h)).unwrap();
        assert_eq!(p.hash_symbols(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, packets) = random_generation(0, p, &mut rng);
        assert!(packets.iter().all(|p| p.vector.hash.len() == 1));
        let frac = packets[0].vector.hash.len() as f64 / 51.0;
        assert!((frac - 0.0196).abs() < 1e-3);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            make_generation(0, vec![vec![0; 2]; 3], params(4, 2)),
            Err(RlncError::Shape { .. })
        ));
        assert!(matches!(
            make_generation(0, vec![vec![0; 3]; 4], params(4, 2)),
            Err(RlncError::Shape { .. })
        ));
        assert_eq!(
            GenerationParams::new(FieldSpec::gf256(), 0, 1, None).err(),
            Some(RlncError::EmptyGeneration)
        );
    }

    #[test]
    fn wire_accounting() {
        let f = FieldSpec::gf256();
        let h = HashParams::new(50, 1, f).unwrap();
        let p = GenerationParams::fit(f, 1000, 10, Some(h.clone())).unwrap();
        assert_eq!((p.data_symbols(), p.hash_symbols()), (112, 3));
        assert_eq!(p.packet_bits(), 1000);
        assert!(GenerationParams::with_packet_bits(f, 1000, 10, 112, Some(h.clone())).is_ok());
        assert!(matches!(
            GenerationParams::with_packet_bits(f, 1000, 10, 111, Some(h)),
            Err(RlncError::Accounting { .. })
        ));
        assert!(matches!(
            GenerationParams::fit(f, 80, 10, None),
            Err(RlncError::NoRoom { .. })
        ));
    }

    #[test]
    fn combine_identity_and_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, packets) = random_generation(0, params(4, 6), &mut rng);
        let x = &packets[2];
        assert_eq!(combine_with(std::slice::from_ref(x), &[1]).unwrap(), *x);

        let two = [packets[0].clone(), packets[3].clone()];
        for _ in 0..50 {
            let c = random_combine(&two, &mut rng).unwrap();
            assert_eq!(c.vector.coeffs[1], 0);
            assert_eq!(c.vector.coeffs[2], 0);
        }
    }

    #[test]
    fn combine_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, a) = random_generation(0, params(2, 3), &mut rng);
        let (_, b) = random_generation(1, params(2, 3), &mut rng);
        assert_eq!(random_combine(&[], &mut rng).err(), Some(RlncError::Empty));
        assert_eq!(
            random_combine(&[a[0].clone(), b[0].clone()], &mut rng).err(),
            Some(RlncError::MixedGenerations)
        );
        assert!(matches!(combine_with(&a, &[1]), Err(RlncError::Shape { .. })));
    }

    #[test]
    fn corrupted_input_taints_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (_, mut packets) = random_generation(0, params(3, 3), &mut rng);
        packets[1].origin = Origin::Corrupted;
        assert_eq!(combine_with(&packets, &[1, 0, 1]).unwrap().origin, Origin::Valid);
        assert_eq!(
            combine_with(&packets, &[1, 1, 0]).unwrap().origin,
            Origin::Corrupted
        );
    }

    #[test]
    fn decode_sources_and_combinations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (gen, packets) = random_generation(0, params(8, 20), &mut rng);
        let d = decode(&packets, 8).unwrap();
        assert_eq!(d.payloads, gen.source_payloads);
        assert!(d.consistent);

        let coded = gen.encode_innovative(&mut rng);
        assert_eq!(decode(&coded, 8).unwrap().payloads, gen.source_payloads);

        let err = decode(&coded[..7], 8).unwrap_err();
        assert_eq!(err, RlncError::NotDecodable { rank: 7, needed: 8 });
        assert!(matches!(
            decode::<Packet>(&[], 8),
            Err(RlncError::NotDecodable { rank: 0, .. })
        ));
    }

    #[test]
    fn decode_reports_contradicting_surplus() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (gen, _) = random_generation(0, params(4, 5), &mut rng);
        let mut coded = gen.encode_innovative(&mut rng);
        let mut extra = gen.encode(1, &mut rng).remove(0);
        extra.vector.payload[0] ^= 1;
        coded.push(extra);
        assert!(!decode(&coded, 4).unwrap().consistent);
    }

    #[test]
    fn partial_decode_of_sub_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (gen, _) = random_generation(0, params(8, 6), &mut rng);
        let half = gen.encode_innovative_over(&[0, 1, 2, 3], &mut rng);
        let sub = subgeneration_view(&half, 4).unwrap();
        let pd = sub.decode_partial();
        assert_eq!(pd.support, vec![0, 1, 2, 3]);
        assert!(pd.is_complete());
        for r in &pd.recovered {
            assert_eq!(r.payload, gen.source_payloads[r.index]);
        }

        let one = gen.encode(1, &mut rng);
        let pd = subgeneration_view(&one, 1).unwrap().decode_partial();
        assert_eq!(pd.rank, 1);
        assert!(!pd.is_complete());

        let empty = subgeneration_view::<Packet>(&[], 0).unwrap().decode_partial();
        assert!(empty.is_complete() && !empty.contradiction);
    }
}
