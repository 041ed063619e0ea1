//! The acceptance suite: nine checks of the overhead model, the detectors and
//! the coding layer, each reporting what it measured against what it expects.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{blind_forge_with, corrupt_packet, AttackMode, AttackModel};
use crate::algebra::{FieldSpec, Symbol};
use crate::analytic::{self, Scheme, SchemeParams};
use crate::detect::{
    gen_hash_verify, sig_keygen, sig_verify, signing_field, HashParams, SigVerdict, Verdict,
};
use crate::rlnc::{decode, make_generation, random_generation, GenerationParams, Packet, RlncError};
use crate::sim::{
    compare_grid, default_signing_group, linear_grid, simulate_fig2, simulate_node, Edge, Fidelity,
    GridConfig, Node, SimError, TrialConfig,
};

pub const DEFAULT_SEED: u64 = 2008;

/// The closed forms under test. Every method defaults to the library's
/// implementation; overriding one is how a deliberate fault is injected.
pub trait Formulas {
    fn error_correction(&self, p: f64) -> f64 {
        analytic::overhead_error_correction(p).unwrap_or(f64::NAN)
    }

    fn packet(&self, p: f64, n: f64, h_p: f64) -> f64 {
        analytic::overhead_packet(p, n, h_p).unwrap_or(f64::NAN)
    }

    fn generation(&self, p: f64, n: f64, g: usize, h_g: f64) -> f64 {
        analytic::overhead_generation(p, n, g, h_g).unwrap_or(f64::NAN)
    }

    fn crossover(&self, n: f64, h_p: f64) -> f64 {
        analytic::crossover_ec_vs_packet(n, h_p).unwrap_or(f64::NAN)
    }

    fn peak(&self, g: usize) -> f64 {
        analytic::peak_attack_probability(g).unwrap_or(f64::NAN)
    }

    fn drop_probability(&self, p: f64, g: usize) -> f64 {
        analytic::drop_probability(p, g).unwrap_or(f64::NAN)
    }

    fn ratio(&self, scheme: Scheme, params: &SchemeParams) -> f64 {
        match scheme {
            Scheme::ErrorCorrection => self.error_correction(params.p),
            Scheme::Packet => self.packet(params.p, params.n, params.h_p),
            Scheme::Generation => self.generation(params.p, params.n, params.generation_size, params.h_g),
        }
    }
}

pub struct ClosedForm;

impl Formulas for ClosedForm {}

/// Drops the factor of two from the crossover and halves the saved bits of
/// the packet scheme.
pub struct Tampered;

impl Formulas for Tampered {
    fn packet(&self, p: f64, n: f64, h_p: f64) -> f64 {
        (h_p / n - p / 2.0).max(0.0)
    }

    fn crossover(&self, n: f64, h_p: f64) -> f64 {
        h_p / n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Crossover = 1,
    Peak,
    Asymptote,
    DropProbability,
    MonteCarlo,
    HashBound,
    Signature,
    RoundTrip,
    Fig2,
}

impl Criterion {
    pub const ALL: [Criterion; 9] = [
        Criterion::Crossover,
        Criterion::Peak,
        Criterion::Asymptote,
        Criterion::DropProbability,
        Criterion::MonteCarlo,
        Criterion::HashBound,
        Criterion::Signature,
        Criterion::RoundTrip,
        Criterion::Fig2,
    ];

    pub fn number(&self) -> u8 {
        *self as u8
    }

    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Crossover => "crossover",
            Criterion::Peak => "peak",
            Criterion::Asymptote => "asymptote",
            Criterion::DropProbability => "drop-probability",
            Criterion::MonteCarlo => "monte-carlo",
            Criterion::HashBound => "hash-bound",
            Criterion::Signature => "signature",
            Criterion::RoundTrip => "round-trip",
            Criterion::Fig2 => "fig2",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s || c.number().to_string() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Criterion::ALL.iter().map(Criterion::name).collect();
                format!("unknown criterion '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{} {}] measured: {} | expected: {} | {:.2}s",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion.number(),
            self.criterion,
            self.measured,
            self.expected,
            self.elapsed.as_secs_f64()
        )
    }
}

struct Outcome {
    passed: bool,
    measured: String,
    expected: String,
}

pub fn run_criterion(criterion: Criterion, formulas: &dyn Formulas, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let outcome = match criterion {
        Criterion::Crossover => Ok(crossover(formulas)),
        Criterion::Peak => Ok(peak(formulas)),
        Criterion::Asymptote => Ok(asymptote(formulas)),
        Criterion::DropProbability => drop_frequency(formulas, seed),
        Criterion::MonteCarlo => monte_carlo(formulas, seed),
        Criterion::HashBound => hash_bound(seed),
        Criterion::Signature => signature(seed),
        Criterion::RoundTrip => round_trip(seed),
        Criterion::Fig2 => fig2(seed),
    };
    let outcome = outcome.unwrap_or_else(|e| Outcome {
        passed: false,
        measured: format!("error: {e}"),
        expected: "no error".into(),
    });
    CriterionReport {
        criterion,
        passed: outcome.passed,
        measured: outcome.measured,
        expected: outcome.expected,
        elapsed: start.elapsed(),
    }
}

/// Runs `only` or, when `None`, every criterion in order.
pub fn run_suite(only: Option<Criterion>, formulas: &dyn Formulas, seed: u64) -> Vec<CriterionReport> {
    Criterion::ALL
        .into_iter()
        .filter(|c| only.map_or(true, |o| o == *c))
        .map(|c| run_criterion(c, formulas, seed))
        .collect()
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let neg_lo = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn crossover(formulas: &dyn Formulas) -> Outcome {
    let (n, h_p) = (1000.0, 60.0);
    let closed = formulas.crossover(n, h_p);
    let root = bisect(0.0, 1.0, |p| {
        formulas.error_correction(p) - formulas.packet(p, n, h_p)
    });
    Outcome {
        passed: (closed - 0.03).abs() <= 1e-12 && (root - 0.03).abs() <= 1e-12,
        measured: format!("closed form {closed:.12}, bisection {root:.12}"),
        expected: "0.030000000000 within 1e-12".into(),
    }
}

fn grid_argmax(formulas: &dyn Formulas, g: usize) -> f64 {
    let h_g = 0.02 * 1000.0 * g as f64;
    (0..=10_000)
        .map(|i| i as f64 * 1e-4)
        .map(|p| (p, formulas.generation(p, 1000.0, g, h_g)))
        .fold(
            (0.0, f64::MIN),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
        .0
}

fn peak(formulas: &dyn Formulas) -> Outcome {
    let closed = formulas.peak(5);
    let grid = grid_argmax(formulas, 5);
    Outcome {
        passed: (0.15..=0.25).contains(&closed) && (closed - grid).abs() <= 1e-4,
        measured: format!("closed form {closed:.6}, grid argmax {grid:.4}"),
        expected: "in [0.15, 0.25], grid gap <= 1e-4".into(),
    }
}

fn asymptote(formulas: &dyn Formulas) -> Outcome {
    let gaps: Vec<(f64, f64)> = [0.1, 0.2, 0.3, 0.45]
        .into_iter()
        .map(|p| {
            (
                p,
                (formulas.generation(p, 1000.0, 500, 20.0) - (1.0 - 2.0 * p).max(0.0)).abs(),
            )
        })
        .collect();
    let worst = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    Outcome {
        passed: gaps.iter().all(|g| g.1 < 1e-3),
        measured: format!(
            "max gap {worst:.3e} ({})",
            gaps.iter()
                .map(|(p, g)| format!("p={p}: {g:.2e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        expected: "< 1e-3 at G=500, h_g=20".into(),
    }
}

fn drop_frequency(formulas: &dyn Formulas, seed: u64) -> Result<Outcome, SimError> {
    let trials = 1_000_000;
    let (p, g) = (0.01, 50);
    let config = TrialConfig::new(
        Scheme::Generation,
        SchemeParams::defaults(g, p)?,
        AttackMode::RandomSymbol,
        trials,
        seed,
    )?
    .with_fidelity(Fidelity::Tagged);
    let report = simulate_node(&config)?;
    let freq = report.generations_dropped as f64 / trials as f64;
    let expected = formulas.drop_probability(p, g);
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    Ok(Outcome {
        passed: (freq - expected).abs() <= 3.0 * sigma,
        measured: format!(
            "{freq:.6} over {trials} generations ({:+.2} sigma)",
            (freq - expected) / sigma
        ),
        expected: format!("{expected:.6} +- {:.6} (3 sigma)", 3.0 * sigma),
    })
}

fn monte_carlo(formulas: &dyn Formulas, seed: u64) -> Result<Outcome, SimError> {
    let grid = linear_grid(0.0, 1.0, 21);
    let config = GridConfig::new(SchemeParams::defaults(10, 0.0)?, seed);
    let rows = compare_grid(&grid, &Scheme::ALL, &config)?;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (point, report) in &rows {
        let analytic = formulas.ratio(point.scheme, &point.params);
        let tol = (3.0 * report.stderr).max(0.005);
        let gap = (report.overhead_ratio - analytic).abs();
        worst = worst.max(gap / tol);
        if gap > tol {
            failures.push(format!(
                "{} p={:.2}: {:.4} vs {:.4}",
                point.scheme, point.params.p, report.overhead_ratio, analytic
            ));
        }
    }
    let measured = if failures.is_empty() {
        format!("{} points agree, worst gap/tolerance {worst:.2}", rows.len())
    } else {
        format!(
            "{}/{} points off: {}",
            failures.len(),
            rows.len(),
            failures.join("; ")
        )
    };
    Ok(Outcome {
        passed: failures.is_empty(),
        measured,
        expected: "|empirical - analytic| <= max(3 stderr, 0.005) at 21 p values x 3 schemes".into(),
    })
}

fn blind_miss_rate(
    k: usize,
    width: u8,
    s: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64), SimError> {
    let field = FieldSpec::binary(width)?;
    let hash = HashParams::new(k, s, field)?;
    let params = GenerationParams::new(field, 8, k, Some(hash.clone()))?;
    let model = AttackModel::new(
        1.0,
        AttackMode::BlindSPacket {
            s,
            hash: hash.clone(),
        },
        0,
    )?;
    let mut missed = 0;
    for id in 0..trials as u64 {
        let (gen, _) = random_generation(id, params.clone(), rng);
        let packets = blind_forge_with(gen.encode_innovative(rng), s, &model, rng)?;
        let verdict = match decode(&packets, 8) {
            Ok(d) => gen_hash_verify(&d, &hash)?,
            Err(RlncError::NotDecodable { .. }) => Verdict::Corrupted,
            Err(e) => return Err(e.into()),
        };
        missed += usize::from(verdict == Verdict::Valid);
    }
    Ok((missed as f64 / trials as f64, hash.miss_bound()))
}

fn hash_bound(seed: u64) -> Result<Outcome, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6861_7368);
    let trials = 10_000;
    let (a, bound_a) = blind_miss_rate(50, 7, 5, trials, &mut rng)?;
    let (b, bound_b) = blind_miss_rate(100, 8, 5, trials, &mut rng)?;
    Ok(Outcome {
        passed: a <= 0.011 && b <= 0.010,
        measured: format!(
            "miss {a:.4} (k=50, q=2^7, s=5; bound {bound_a:.4}), {b:.4} (k=100, q=2^8, s=5; bound {bound_b:.4}) over {trials} forged generations each"
        ),
        expected: "<= 0.011 and <= 0.010".into(),
    })
}

fn signature(seed: u64) -> Result<Outcome, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7369_676e);
    let group = default_signing_group();
    let params = GenerationParams::fit(signing_field(group)?, 1000, 10, None)?;
    let (valid_total, bad_total) = (100_000, 10_000);
    let (mut accepted, mut rejected) = (0, 0);
    let mut id = 0;
    while id * 1000 < valid_total {
        let (gen, _) = random_generation(id as u64, params.clone(), &mut rng);
        let key = sig_keygen(&gen, group, &mut rng)?;
        for packet in gen.encode(1000, &mut rng) {
            accepted += usize::from(sig_verify(&packet.vector, &key)? == SigVerdict::Accept);
        }
        for mut packet in gen.encode(bad_total / 100, &mut rng) {
            corrupt_packet(&mut packet, &AttackMode::RandomSymbol, &mut rng);
            rejected += usize::from(sig_verify(&packet.vector, &key)? == SigVerdict::Reject);
        }
        id += 1;
    }
    let p_bits = group.order_bits();
    Ok(Outcome {
        passed: accepted == valid_total && rejected == bad_total && group.order() >= &(1u64 << 31).into(),
        measured: format!(
            "{accepted}/{valid_total} valid accepted, {rejected}/{bad_total} corrupted rejected, P of {p_bits} bits"
        ),
        expected: "all valid accepted, all corrupted rejected, P >= 2^31".into(),
    })
}

/// Row reduction written against bit-level field arithmetic, sharing no code
/// with the coding layer.
pub mod reference {
    use crate::algebra::{FieldSpec, Symbol};

    pub fn mul(field: &FieldSpec, a: Symbol, b: Symbol) -> Symbol {
        match *field {
            FieldSpec::Binary { width, poly } => {
                let mut product: u64 = 0;
                for i in 0..width {
                    if (b >> i) & 1 == 1 {
                        product ^= a << i;
                    }
                }
                for bit in (width as u32..2 * width as u32).rev() {
                    if (product >> bit) & 1 == 1 {
                        product ^= (poly as u64) << (bit - width as u32);
                    }
                }
                product
            }
            FieldSpec::Prime { modulus } => ((a as u128 * b as u128) % modulus as u128) as u64,
        }
    }

    pub fn add(field: &FieldSpec, a: Symbol, b: Symbol) -> Symbol {
        match *field {
            FieldSpec::Binary { .. } => a ^ b,
            FieldSpec::Prime { modulus } => ((a as u128 + b as u128) % modulus as u128) as u64,
        }
    }

    pub fn neg(field: &FieldSpec, a: Symbol) -> Symbol {
        match *field {
            FieldSpec::Binary { .. } => a,
            FieldSpec::Prime { modulus } => (modulus - a) % modulus,
        }
    }

    /// a^(q-2) by square and multiply.
    pub fn inv(field: &FieldSpec, a: Symbol) -> Symbol {
        let mut e = field.order() - 2;
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(field, acc, base);
            }
            base = mul(field, base, base);
            e >>= 1;
        }
        acc
    }

    /// Rank by plain row echelon elimination.
    pub fn rank(field: &FieldSpec, mut rows: Vec<Vec<Symbol>>) -> usize {
        let cols = rows.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(pivot) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
                continue;
            };
            rows.swap(r, pivot);
            let inv = inv(field, rows[r][c]);
            for i in r + 1..rows.len() {
                if rows[i][c] != 0 {
                    let factor = neg(field, mul(field, rows[i][c], inv));
                    for j in c..cols {
                        let t = mul(field, factor, rows[r][j]);
                        rows[i][j] = add(field, rows[i][j], t);
                    }
                }
            }
            r += 1;
        }
        r
    }
}

fn random_field(rng: &mut ChaCha8Rng) -> FieldSpec {
    const PRIMES: [u64; 6] = [3, 7, 257, 65_521, 2_147_483_647, 4_294_967_291];
    if rng.gen_bool(0.5) {
        FieldSpec::binary(rng.gen_range(2..=16)).expect("supported width")
    } else {
        FieldSpec::prime(PRIMES[rng.gen_range(0..PRIMES.len())]).expect("prime")
    }
}

fn round_trip(seed: u64) -> Result<Outcome, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x726c_6e63);
    let instances = 1000;
    let (mut exact, mut deficient, mut deficient_ok) = (0, 0, 0);
    let mut mismatches = Vec::new();
    for id in 0..instances as u64 {
        let field = random_field(&mut rng);
        let g = rng.gen_range(1..=12);
        let k = rng.gen_range(1..=12);
        let payloads: Vec<Vec<Symbol>> = (0..g).map(|_| field.random_vec(k, &mut rng)).collect();
        let (gen, _) = make_generation(id, payloads.clone(), GenerationParams::new(field, g, k, None)?)?;

        // Redraw until the oracle certifies full rank; every shortfall on the
        // way is itself a rank-deficient case.
        let full = loop {
            let packets = gen.encode(g + rng.gen_range(0..3), &mut rng);
            let coeffs: Vec<Vec<Symbol>> = packets.iter().map(|p| p.vector.coeffs.clone()).collect();
            let oracle_rank = reference::rank(&field, coeffs);
            if oracle_rank == g {
                break packets;
            }
            deficient += 1;
            match decode(&packets, g) {
                Err(RlncError::NotDecodable { rank, .. }) if rank == oracle_rank => deficient_ok += 1,
                other => mismatches.push(format!(
                    "{field} G={g}: oracle rank {oracle_rank}, decoder {other:?}"
                )),
            }
        };
        match decode(&full, g) {
            Ok(d) if d.payloads == payloads => exact += 1,
            other => mismatches.push(format!(
                "{field} G={g}: full-rank set gave {:?}",
                other.map(|d| d.payloads)
            )),
        }

        // A set of G vectors with one forced dependency.
        let mut short: Vec<Packet> = full[..g - 1].to_vec();
        let coeffs: Vec<Symbol> = field.random_vec(g - 1, &mut rng);
        short.push(crate::rlnc::combine_with(&full[..g - 1], &coeffs).unwrap_or_else(|_| full[0].clone()));
        if g == 1 {
            short = vec![Packet {
                vector: crate::rlnc::CodedVector {
                    coeffs: vec![0],
                    payload: vec![0; k],
                    ..full[0].vector.clone()
                },
                origin: full[0].origin,
            }];
        }
        let oracle_rank = reference::rank(&field, short.iter().map(|p| p.vector.coeffs.clone()).collect());
        deficient += 1;
        match decode(&short, g) {
            Err(RlncError::NotDecodable { rank, .. }) if rank == oracle_rank && oracle_rank < g => {
                deficient_ok += 1
            }
            other => mismatches.push(format!(
                "{field} G={g}: dependent set, oracle rank {oracle_rank}, decoder {:?}",
                other.map(|d| d.generation)
            )),
        }
    }
    Ok(Outcome {
        passed: exact == instances && deficient_ok == deficient && mismatches.is_empty(),
        measured: format!(
            "{exact}/{instances} decoded exactly, {deficient_ok}/{deficient} rank-deficient sets NotDecodable{}",
            mismatches.first().map(|m| format!(" (first mismatch: {m})")).unwrap_or_default()
        ),
        expected: "all exact, all deficient sets NotDecodable with the oracle's rank".into(),
    })
}

fn fig2(seed: u64) -> Result<Outcome, SimError> {
    let trials = 1000;
    let (mut injected, mut flagged, mut clean_after_flag, mut fired) = (0, 0, 0, 0);
    for t in 0..trials {
        let edges = [(Edge::AB, 0.2)].into_iter().collect();
        let r = simulate_fig2(8, edges, seed.wrapping_add(t))?;
        if r.injected_total() == 0 {
            continue;
        }
        injected += 1;
        if r.node(Node::B).flagged() {
            flagged += 1;
        }
        if r.first_flag.is_some() {
            fired += 1;
            clean_after_flag += usize::from(r.f_clean && !r.node(Node::F).flagged());
        }
    }
    let rate = flagged as f64 / injected.max(1) as f64;
    Ok(Outcome {
        passed: rate >= 0.98 && clean_after_flag == fired,
        measured: format!(
            "B flagged {flagged}/{injected} injected trials ({:.2}%), F clean in {clean_after_flag}/{fired} trials where a check fired",
            100.0 * rate
        ),
        expected: ">= 98% flagged at B, F clean whenever upstream fired".into(),
    })
}
