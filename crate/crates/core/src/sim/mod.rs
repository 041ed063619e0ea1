//! Monte Carlo replay of the single-node overhead model and of the six-node
//! sub-generation scenario.

mod fig2;

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::adversary::{corrupt_stream_with, AdversaryError, AttackMode, AttackModel};
use crate::algebra::{safe_prime_group, AlgebraError, FieldSpec, GroupSpec};
use crate::analytic::{AnalyticError, OverheadPoint, Scheme, SchemeParams};
use crate::detect::{
    gen_hash_verify, sig_keygen, sig_verify, signing_field, DetectError, HashParams, SigVerdict, Verdict,
};
use crate::rlnc::{decode, random_generation, GenerationParams, RlncError};

pub use fig2::{simulate_fig2, simulate_fig2_with, Edge, Fig2Config, Fig2Report, Node, NodeReport};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Rlnc(#[from] RlncError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// How much of the machinery a trial runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fidelity {
    /// Real packets, real corruption, real signature and hash checks.
    Coded,
    /// Corruption tags only; detection assumed perfect. Orders of magnitude
    /// faster, for drop-frequency estimates.
    Tagged,
}

/// Field and hash used for coded traffic in generation mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingSetup {
    pub field: FieldSpec,
    pub hash: HashParams,
}

impl Default for CodingSetup {
    /// GF(2^8) with one hash symbol per 50 payload symbols (about 2%).
    fn default() -> Self {
        let field = FieldSpec::gf256();
        CodingSetup {
            field,
            hash: HashParams::new(50, 1, field).expect("valid hash parameters"),
        }
    }
}

/// A fixed signing group with P of 32 bits, shared by every packet-mode run.
pub fn default_signing_group() -> &'static GroupSpec {
    static GROUP: OnceLock<GroupSpec> = OnceLock::new();
    GROUP.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5167_6e61_7475_7265);
        safe_prime_group(32, &mut rng).expect("32-bit safe primes exist")
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialConfig {
    scheme: Scheme,
    params: SchemeParams,
    attack: AttackModel,
    trials: usize,
    seed: u64,
    fidelity: Fidelity,
    coding: CodingSetup,
}

impl TrialConfig {
    /// `trials` counts packets for the error-correction and packet schemes and
    /// generations for the generation scheme. The attack rate is `params.p`.
    pub fn new(
        scheme: Scheme,
        params: SchemeParams,
        mode: AttackMode,
        trials: usize,
        seed: u64,
    ) -> Result<Self, SimError> {
        params.validate()?;
        if trials == 0 {
            return Err(SimError::Config("at least one trial is required".into()));
        }
        Ok(TrialConfig {
            scheme,
            params,
            attack: AttackModel::new(params.p, mode, seed)?,
            trials,
            seed,
            fidelity: Fidelity::Coded,
            coding: CodingSetup::default(),
        })
    }

    pub fn with_fidelity(mut self, fidelity: Fidelity) -> Self {
        self.fidelity = fidelity;
        self
    }

    pub fn with_coding(mut self, coding: CodingSetup) -> Self {
        self.coding = coding;
        self
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn attack(&self) -> &AttackModel {
        &self.attack
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fidelity(&self) -> Fidelity {
        self.fidelity
    }

    pub fn coding(&self) -> &CodingSetup {
        &self.coding
    }
}

/// What node v observed over one run.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalReport {
    /// Mean overhead ratio, clamped to [0, 1].
    pub overhead_ratio: f64,
    /// Standard error of the unclamped per-unit mean.
    pub stderr: f64,
    /// Unclamped per-unit mean.
    pub raw_mean: f64,
    /// Valid data bits forwarded over all bits forwarded.
    pub goodput_fraction: f64,
    pub units: u64,
    pub packets_received: u64,
    pub packets_corrupted: u64,
    pub generations_dropped: u64,
    /// Corrupted traffic the detector let through.
    pub false_accepts: u64,
    /// Clean traffic the detector dropped.
    pub false_rejects: u64,
    pub bits_received: u64,
    pub bits_transmitted: u64,
}

/// splitmix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for one (seed, scheme, p, G) cell, so grid results do
/// not depend on evaluation order.
pub fn stream_rng(seed: u64, scheme: Scheme, p: f64, generation_size: usize) -> ChaCha8Rng {
    let tag = scheme as u64 + 1;
    let s = mix(mix(mix(seed) ^ tag) ^ p.to_bits());
    ChaCha8Rng::seed_from_u64(mix(s ^ generation_size as u64))
}

#[derive(Default)]
struct Tally {
    sum: f64,
    sum_sq: f64,
    units: u64,
    packets: u64,
    corrupted: u64,
    dropped_units: u64,
    false_accepts: u64,
    false_rejects: u64,
    bits_in: f64,
    bits_out: f64,
    data_out: f64,
}

impl Tally {
    fn unit(&mut self, ratio: f64) {
        self.sum += ratio;
        self.sum_sq += ratio * ratio;
        self.units += 1;
    }

    fn report(self) -> EmpiricalReport {
        let n = self.units as f64;
        let mean = self.sum / n;
        let var = if self.units > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        EmpiricalReport {
            overhead_ratio: mean.clamp(0.0, 1.0),
            stderr: (var / n).sqrt(),
            raw_mean: mean,
            goodput_fraction: if self.bits_out > 0.0 {
                self.data_out / self.bits_out
            } else {
                0.0
            },
            units: self.units,
            packets_received: self.packets,
            packets_corrupted: self.corrupted,
            generations_dropped: self.dropped_units,
            false_accepts: self.false_accepts,
            false_rejects: self.false_rejects,
            bits_received: self.bits_in.round() as u64,
            bits_transmitted: self.bits_out.round() as u64,
        }
    }
}

/// Runs node v for `config.trials()` units and scores overhead from ground
/// truth.
///
/// Per unit: forward-all charges every corrupted bit forwarded; per-packet
/// checking charges h_p minus the corrupted bits it dropped; per-generation
/// checking charges h_g plus the valid bits and minus the corrupted bits of a
/// dropped generation. The clamp at zero applies to the mean, not to units.
pub fn simulate_node(config: &TrialConfig) -> Result<EmpiricalReport, SimError> {
    let params = &config.params;
    let mut rng = stream_rng(config.seed, config.scheme, params.p, params.generation_size);
    let tally = match (config.scheme, config.fidelity) {
        (Scheme::ErrorCorrection, Fidelity::Tagged) | (Scheme::Packet, Fidelity::Tagged) => {
            per_packet_tagged(config, &mut rng)
        }
        (Scheme::Generation, Fidelity::Tagged) => per_generation_tagged(config, &mut rng),
        (Scheme::ErrorCorrection, Fidelity::Coded) => forward_all_coded(config, &mut rng)?,
        (Scheme::Packet, Fidelity::Coded) => signature_coded(config, &mut rng)?,
        (Scheme::Generation, Fidelity::Coded) => hash_coded(config, &mut rng)?,
    };
    Ok(tally.report())
}

/// Books one packet for the per-packet schemes.
fn score_packet(config: &TrialConfig, tally: &mut Tally, corrupted: bool, forwarded: bool) {
    let SchemeParams { n, h_p, .. } = config.params;
    tally.packets += 1;
    tally.bits_in += n;
    tally.corrupted += u64::from(corrupted);
    if forwarded {
        tally.bits_out += n;
    }
    match config.scheme {
        Scheme::ErrorCorrection => {
            if !corrupted {
                tally.data_out += n;
            }
            tally.unit(if corrupted { 1.0 } else { 0.0 });
        }
        _ => {
            if forwarded && !corrupted {
                tally.data_out += n - h_p;
            }
            tally.false_accepts += u64::from(forwarded && corrupted);
            tally.false_rejects += u64::from(!forwarded && !corrupted);
            tally.dropped_units += u64::from(!forwarded);
            let saved = if corrupted && !forwarded { n } else { 0.0 };
            tally.unit((h_p - saved) / n);
        }
    }
}

/// Books one generation of `g` packets, `corrupted` of them bad.
fn score_generation(config: &TrialConfig, tally: &mut Tally, corrupted: usize, forwarded: bool) {
    let SchemeParams { n, h_g, .. } = config.params;
    let g = config.params.generation_size;
    let valid = (g - corrupted) as f64;
    let bits = n * g as f64;
    tally.packets += g as u64;
    tally.corrupted += corrupted as u64;
    tally.bits_in += bits;
    tally.false_accepts += u64::from(forwarded && corrupted > 0);
    tally.false_rejects += u64::from(!forwarded && corrupted == 0);
    let ratio = if forwarded {
        tally.bits_out += bits;
        tally.data_out += valid * n * (1.0 - h_g / bits);
        h_g / bits
    } else {
        tally.dropped_units += 1;
        (h_g + valid * n - corrupted as f64 * n) / bits
    };
    tally.unit(ratio);
}

fn per_packet_tagged(config: &TrialConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::default();
    let p = config.params.p;
    for _ in 0..config.trials {
        let corrupted = rng.gen_bool(p);
        let forwarded = config.scheme == Scheme::ErrorCorrection || !corrupted;
        score_packet(config, &mut tally, corrupted, forwarded);
    }
    tally
}

fn per_generation_tagged(config: &TrialConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::default();
    let p = config.params.p;
    for _ in 0..config.trials {
        let corrupted = (0..config.params.generation_size)
            .filter(|_| rng.gen_bool(p))
            .count();
        score_generation(config, &mut tally, corrupted, corrupted == 0);
    }
    tally
}

fn packet_bits(params: &SchemeParams) -> u64 {
    params.n.round() as u64
}

fn forward_all_coded(config: &TrialConfig, rng: &mut ChaCha8Rng) -> Result<Tally, SimError> {
    let g = config.params.generation_size;
    let gp = GenerationParams::fit(config.coding.field, packet_bits(&config.params), g, None)?;
    let mut tally = Tally::default();
    let mut remaining = config.trials;
    let mut id = 0;
    while remaining > 0 {
        let (gen, _) = random_generation(id, gp.clone(), rng);
        let count = remaining.min(g);
        let packets = corrupt_stream_with(gen.encode(count, rng), &config.attack, rng);
        for packet in &packets {
            score_packet(config, &mut tally, packet.is_corrupted(), true);
        }
        remaining -= count;
        id += 1;
    }
    Ok(tally)
}

fn signature_coded(config: &TrialConfig, rng: &mut ChaCha8Rng) -> Result<Tally, SimError> {
    let group = default_signing_group();
    let g = config.params.generation_size;
    let gp = GenerationParams::fit(signing_field(group)?, packet_bits(&config.params), g, None)?;
    let mut tally = Tally::default();
    let mut remaining = config.trials;
    let mut id = 0;
    while remaining > 0 {
        let (gen, _) = random_generation(id, gp.clone(), rng);
        let key = sig_keygen(&gen, group, rng)?;
        let count = remaining.min(g);
        let packets = corrupt_stream_with(gen.encode(count, rng), &config.attack, rng);
        for packet in &packets {
            let forwarded = sig_verify(&packet.vector, &key)? == SigVerdict::Accept;
            score_packet(config, &mut tally, packet.is_corrupted(), forwarded);
        }
        remaining -= count;
        id += 1;
    }
    Ok(tally)
}

fn hash_coded(config: &TrialConfig, rng: &mut ChaCha8Rng) -> Result<Tally, SimError> {
    let g = config.params.generation_size;
    let hash = &config.coding.hash;
    let gp = GenerationParams::fit(
        config.coding.field,
        packet_bits(&config.params),
        g,
        Some(hash.clone()),
    )?;
    let mut tally = Tally::default();
    for id in 0..config.trials as u64 {
        let (gen, _) = random_generation(id, gp.clone(), rng);
        let packets = corrupt_stream_with(gen.encode_innovative(rng), &config.attack, rng);
        let corrupted = packets.iter().filter(|p| p.is_corrupted()).count();
        let verdict = match decode(&packets, g) {
            Ok(decoded) => gen_hash_verify(&decoded, hash)?,
            Err(RlncError::NotDecodable { .. }) => Verdict::Corrupted,
            Err(e) => return Err(e.into()),
        };
        score_generation(config, &mut tally, corrupted, verdict == Verdict::Valid);
    }
    Ok(tally)
}

/// Trial counts and stream settings shared by every point of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub params: SchemeParams,
    pub mode: AttackMode,
    /// Packets per point for the error-correction and packet schemes.
    pub packet_trials: usize,
    /// Generations per point for the generation scheme.
    pub generation_trials: usize,
    pub seed: u64,
    pub fidelity: Fidelity,
    pub coding: CodingSetup,
}

impl GridConfig {
    /// 10^5 packets or 10^4 generations per point, coded, single-symbol attack.
    pub fn new(params: SchemeParams, seed: u64) -> Self {
        GridConfig {
            params,
            mode: AttackMode::RandomSymbol,
            packet_trials: 100_000,
            generation_trials: 10_000,
            seed,
            fidelity: Fidelity::Coded,
            coding: CodingSetup::default(),
        }
    }

    pub fn trials_for(&self, scheme: Scheme) -> usize {
        match scheme {
            Scheme::Generation => self.generation_trials,
            _ => self.packet_trials,
        }
    }

    pub fn trial(&self, scheme: Scheme, p: f64) -> Result<TrialConfig, SimError> {
        Ok(TrialConfig::new(
            scheme,
            self.params.with_p(p)?,
            self.mode.clone(),
            self.trials_for(scheme),
            self.seed,
        )?
        .with_fidelity(self.fidelity)
        .with_coding(self.coding.clone()))
    }
}

/// Analytic and empirical overhead at every (scheme, p), scheme-major.
pub fn compare_grid(
    p_grid: &[f64],
    schemes: &[Scheme],
    config: &GridConfig,
) -> Result<Vec<(OverheadPoint, EmpiricalReport)>, SimError> {
    let mut out = Vec::with_capacity(p_grid.len() * schemes.len());
    for &scheme in schemes {
        for &p in p_grid {
            let trial = config.trial(scheme, p)?;
            let point = OverheadPoint::evaluate(scheme, *trial.params())?;
            out.push((point, simulate_node(&trial)?));
        }
    }
    Ok(out)
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}
