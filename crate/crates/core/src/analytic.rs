//! Closed-form overhead of the three countermeasures at a single node.
//!
//! A node receives m packets of n bits per time unit, each corrupted with
//! probability p. Overhead is the expected number of wasted bits (corrupted
//! bits forwarded, hash bits, valid bits dropped, net of corrupted bits
//! dropped) divided by the bits received.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("attack probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("packet size n = {0} must be positive")]
    PacketSize(f64),
    #[error("generation size must be at least 1")]
    GenerationSize,
    #[error("per-packet hash h_p = {h_p} must lie in [0, n = {n}]")]
    PacketHash { h_p: f64, n: f64 },
    #[error("per-generation hash h_g = {h_g} must lie in [0, nG = {limit}]")]
    GenerationHash { h_g: f64, limit: f64 },
    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),
}

/// The three ways a node can treat possibly corrupted traffic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Forward everything; destinations error-correct.
    ErrorCorrection,
    /// Check every packet's signature and drop failures.
    Packet,
    /// Check each decoded generation's hash and drop it whole on failure.
    Generation,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::ErrorCorrection, Scheme::Packet, Scheme::Generation];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ErrorCorrection => "error-correction",
            Scheme::Packet => "packet",
            Scheme::Generation => "generation",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = AnalyticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error-correction" | "ec" => Ok(Scheme::ErrorCorrection),
            "packet" => Ok(Scheme::Packet),
            "generation" => Ok(Scheme::Generation),
            other => Err(AnalyticError::UnknownScheme(other.to_string())),
        }
    }
}

fn check_p(p: f64) -> Result<(), AnalyticError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(AnalyticError::Probability(p))
    }
}

fn check_n(n: f64) -> Result<(), AnalyticError> {
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::PacketSize(n))
    }
}

fn check_g(g: usize) -> Result<(), AnalyticError> {
    if g >= 1 {
        Ok(())
    } else {
        Err(AnalyticError::GenerationSize)
    }
}

fn check_hp(n: f64, h_p: f64) -> Result<(), AnalyticError> {
    check_n(n)?;
    if (0.0..=n).contains(&h_p) {
        Ok(())
    } else {
        Err(AnalyticError::PacketHash { h_p, n })
    }
}

fn check_hg(n: f64, g: usize, h_g: f64) -> Result<(), AnalyticError> {
    check_n(n)?;
    check_g(g)?;
    let limit = n * g as f64;
    if (0.0..=limit).contains(&h_g) {
        Ok(())
    } else {
        Err(AnalyticError::GenerationHash { h_g, limit })
    }
}

/// How the per-generation hash size is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GenerationHashSize {
    /// h_g = fraction · nG, growing with the generation.
    Scaled(f64),
    /// h_g held at a fixed number of bits regardless of G.
    Fixed(f64),
}

impl GenerationHashSize {
    pub fn bits(&self, n: f64, g: usize) -> f64 {
        match *self {
            GenerationHashSize::Scaled(frac) => frac * n * g as f64,
            GenerationHashSize::Fixed(bits) => bits,
        }
    }
}

/// Every tunable of the overhead model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeParams {
    /// Packet size in bits.
    pub n: f64,
    /// Generation size G.
    pub generation_size: usize,
    /// Packets received per time unit.
    pub m: f64,
    /// Signature bits per packet.
    pub h_p: f64,
    /// Hash bits per generation.
    pub h_g: f64,
    /// Attack probability.
    pub p: f64,
}

pub const DEFAULT_PACKET_BITS: f64 = 1000.0;
pub const DEFAULT_HP_FRACTION: f64 = 0.06;
pub const DEFAULT_HG_FRACTION: f64 = 0.02;

impl SchemeParams {
    pub fn new(
        n: f64,
        generation_size: usize,
        m: f64,
        h_p: f64,
        h_g: f64,
        p: f64,
    ) -> Result<Self, AnalyticError> {
        let params = SchemeParams {
            n,
            generation_size,
            m,
            h_p,
            h_g,
            p,
        };
        params.validate()?;
        Ok(params)
    }

    /// n = 1000, h_p = 0.06n, h_g = 0.02nG.
    pub fn defaults(generation_size: usize, p: f64) -> Result<Self, AnalyticError> {
        let n = DEFAULT_PACKET_BITS;
        Self::new(
            n,
            generation_size,
            generation_size as f64,
            DEFAULT_HP_FRACTION * n,
            DEFAULT_HG_FRACTION * n * generation_size as f64,
            p,
        )
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        check_p(self.p)?;
        check_hp(self.n, self.h_p)?;
        check_hg(self.n, self.generation_size, self.h_g)?;
        if !(self.m >= 0.0) {
            return Err(AnalyticError::PacketSize(self.m));
        }
        Ok(())
    }

    pub fn with_p(&self, p: f64) -> Result<Self, AnalyticError> {
        let out = SchemeParams { p, ..*self };
        out.validate()?;
        Ok(out)
    }

    /// Bits per generation, nG.
    pub fn generation_bits(&self) -> f64 {
        self.n * self.generation_size as f64
    }
}

/// Forward-all: the wasted share is exactly the corrupted share, mnp / mn = p.
pub fn overhead_error_correction(p: f64) -> Result<f64, AnalyticError> {
    check_p(p)?;
    Ok(p)
}

/// Per-packet signatures: max{0, h_p − np} / n.
pub fn overhead_packet(p: f64, n: f64, h_p: f64) -> Result<f64, AnalyticError> {
    check_p(p)?;
    check_hp(n, h_p)?;
    Ok((h_p - n * p).max(0.0) / n)
}

/// Probability that a generation holds at least one corrupted packet.
pub fn drop_probability(p: f64, generation_size: usize) -> Result<f64, AnalyticError> {
    check_p(p)?;
    check_g(generation_size)?;
    Ok(1.0 - (1.0 - p).powi(generation_size as i32))
}

/// Ratios are floored at zero; the cap at one only bites when h_g is close
/// to nG.
fn unit_clamp(r: f64) -> f64 {
    r.clamp(0.0, 1.0)
}

/// Per-generation hash: max{0, h_g + p_g(1−p)nG − pnG} / nG with
/// p_g = 1 − (1−p)^G.
///
/// The dropped-valid term charges every dropped generation the mean valid
/// share (1−p)nG, as if drops were independent of how many packets were hit.
/// See [`overhead_generation_exact`] for the conditional expectation.
pub fn overhead_generation(p: f64, n: f64, generation_size: usize, h_g: f64) -> Result<f64, AnalyticError> {
    check_hg(n, generation_size, h_g)?;
    let p_g = drop_probability(p, generation_size)?;
    let bits = n * generation_size as f64;
    Ok(unit_clamp((h_g + p_g * (1.0 - p) * bits - p * bits) / bits))
}

/// Expected overhead of generation dropping when the valid bits lost are
/// counted per generation: E[(G − C)·1{C ≥ 1}] = G(1−p) − G(1−p)^G for
/// C ~ Binomial(G, p). Lower than [`overhead_generation`] by p(1−p)^G
/// before clamping.
pub fn overhead_generation_exact(
    p: f64,
    n: f64,
    generation_size: usize,
    h_g: f64,
) -> Result<f64, AnalyticError> {
    check_p(p)?;
    check_hg(n, generation_size, h_g)?;
    let g = generation_size as f64;
    let bits = n * g;
    let dropped_valid = g * (1.0 - p) - g * (1.0 - p).powi(generation_size as i32);
    Ok(unit_clamp((h_g + n * dropped_valid - p * bits) / bits))
}

/// Share of forwarded bits that are data under per-packet signatures.
pub fn goodput_fraction_packet(n: f64, h_p: f64) -> Result<f64, AnalyticError> {
    check_hp(n, h_p)?;
    Ok(1.0 - h_p / n)
}

/// Share of forwarded bits that are data under per-generation hashing.
pub fn goodput_fraction_generation(n: f64, generation_size: usize, h_g: f64) -> Result<f64, AnalyticError> {
    check_hg(n, generation_size, h_g)?;
    Ok(1.0 - h_g / (n * generation_size as f64))
}

/// Limit of the generation overhead as G → ∞ with h_g fixed: max{0, 1 − 2p}.
pub fn generation_limit(p: f64) -> Result<f64, AnalyticError> {
    check_p(p)?;
    Ok((1.0 - 2.0 * p).max(0.0))
}

/// Attack probability maximising the generation overhead when h_g ∝ nG.
///
/// Stationary point of (1 − (1−p)^G)(1−p) − p, i.e. (1−p)^G = 2/(G+1).
/// For G = 1 the curve is h − p², maximised at the boundary p = 0.
pub fn peak_attack_probability(generation_size: usize) -> Result<f64, AnalyticError> {
    check_g(generation_size)?;
    let g = generation_size as f64;
    Ok(1.0 - (2.0 / (g + 1.0)).powf(1.0 / g))
}

/// Attack probability where forward-all and per-packet signatures cost the
/// same: p = (h_p − np)/n, so p = h_p / 2n.
pub fn crossover_ec_vs_packet(n: f64, h_p: f64) -> Result<f64, AnalyticError> {
    check_hp(n, h_p)?;
    Ok(h_p / (2.0 * n))
}

/// Overhead ratio of `scheme` at `params`.
pub fn analytic_ratio(scheme: Scheme, params: &SchemeParams) -> Result<f64, AnalyticError> {
    params.validate()?;
    match scheme {
        Scheme::ErrorCorrection => overhead_error_correction(params.p),
        Scheme::Packet => overhead_packet(params.p, params.n, params.h_p),
        Scheme::Generation => overhead_generation(params.p, params.n, params.generation_size, params.h_g),
    }
}

/// Overhead in bits per time unit, ratio · mn.
pub fn overhead_bits_per_unit(scheme: Scheme, params: &SchemeParams) -> Result<f64, AnalyticError> {
    Ok(analytic_ratio(scheme, params)? * params.m * params.n)
}

/// One analytic point of an overhead curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverheadPoint {
    pub scheme: Scheme,
    pub params: SchemeParams,
    pub ratio: f64,
}

impl OverheadPoint {
    pub fn evaluate(scheme: Scheme, params: SchemeParams) -> Result<Self, AnalyticError> {
        Ok(OverheadPoint {
            scheme,
            params,
            ratio: analytic_ratio(scheme, &params)?,
        })
    }
}
