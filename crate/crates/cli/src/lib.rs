//! Building blocks of the `byzcode` binary: sweep rows, CSV output, the
//! accounting report and the six-node scenario summary.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::{bail, Context, Result};
use byzcode_core::algebra::FieldSpec;
use byzcode_core::analytic::{self, GenerationHashSize, Scheme, SchemeParams};
use byzcode_core::detect::{signing_field, HashParams};
use byzcode_core::rlnc::GenerationParams;
use byzcode_core::sim::{
    default_signing_group, simulate_fig2_with, simulate_node, CodingSetup, Edge, Fidelity, Fig2Config, Node,
    TrialConfig,
};
use byzcode_core::AttackMode;

pub const CSV_HEADER: [&str; 11] = [
    "scheme",
    "p",
    "n",
    "G",
    "h_p",
    "h_g",
    "analytic_ratio",
    "empirical_ratio",
    "stderr",
    "trials",
    "seed",
];

/// Model settings shared by every point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub schemes: Vec<Scheme>,
    pub p_grid: Vec<f64>,
    pub g_list: Vec<usize>,
    pub n: f64,
    pub hp_frac: f64,
    pub hg: GenerationHashSize,
    /// Units simulated per point; zero means analytic only.
    pub trials: usize,
    pub seed: u64,
    pub fidelity: Fidelity,
    pub coding: CodingSetup,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub params: SchemeParams,
    pub analytic_ratio: f64,
    pub empirical: Option<(f64, f64)>,
    pub trials: usize,
    pub seed: u64,
}

/// Checks a probability, fraction or size before it reaches the model.
pub fn check_unit(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        bail!("{name} = {value} is outside [0, 1]");
    }
    Ok(())
}

/// Evenly spaced points from `lo` to `hi` inclusive at `step`.
pub fn stepped_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        bail!("grid step must be positive");
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| round_grid(lo + step * i as f64)).collect())
}

/// Removes float noise from grid arithmetic so 0.1 + 0.2 prints as 0.3.
fn round_grid(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.g_list.contains(&0) {
        bail!("generation size G must be at least 1");
    }
    check_unit("--hp-frac", spec.hp_frac)?;
    for &p in &spec.p_grid {
        check_unit("p", p)?;
    }
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        for &g in &spec.g_list {
            for &p in &spec.p_grid {
                let h_g = spec.hg.bits(spec.n, g);
                let params = SchemeParams::new(spec.n, g, g as f64, spec.hp_frac * spec.n, h_g, p)?;
                let analytic_ratio = analytic::analytic_ratio(scheme, &params)?;
                let empirical = if spec.trials > 0 {
                    let config =
                        TrialConfig::new(scheme, params, AttackMode::RandomSymbol, spec.trials, spec.seed)?
                            .with_fidelity(spec.fidelity)
                            .with_coding(spec.coding.clone());
                    let report = simulate_node(&config)?;
                    Some((report.overhead_ratio, report.stderr))
                } else {
                    None
                };
                rows.push(SweepRow {
                    scheme,
                    params,
                    analytic_ratio,
                    empirical,
                    trials: spec.trials,
                    seed: spec.seed,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.scheme, a.params.p, a.params.generation_size)
            .partial_cmp(&(b.scheme, b.params.p, b.params.generation_size))
            .expect("grid values are finite")
    });
    Ok(rows)
}

/// `%g` with six significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let (emp, se) = match r.empirical {
            Some((e, s)) => (fmt_sig(e), fmt_sig(s)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            r.scheme.name().to_string(),
            fmt_sig(r.params.p),
            fmt_sig(r.params.n),
            r.params.generation_size.to_string(),
            fmt_sig(r.params.h_p),
            fmt_sig(r.params.h_g),
            fmt_sig(r.analytic_ratio),
            emp,
            se,
            r.trials.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Settings for the byte accounting report.
#[derive(Clone, Debug, PartialEq)]
pub struct AccountingSpec {
    pub n: f64,
    pub generation_size: usize,
    pub hp_frac: f64,
    pub hg_frac: f64,
    pub k: usize,
    pub s: usize,
    pub logq: u8,
}

fn percent(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

pub fn accounting_report(spec: &AccountingSpec) -> Result<String> {
    let g = spec.generation_size;
    if g == 0 {
        bail!("generation size G must be at least 1");
    }
    check_unit("--hp-frac", spec.hp_frac)?;
    check_unit("--hg-frac", spec.hg_frac)?;
    let n = spec.n;
    let h_p = spec.hp_frac * n;
    let h_g = spec.hg_frac * n * g as f64;
    let params = SchemeParams::new(n, g, g as f64, h_p, h_g, 0.0)?;
    let field = FieldSpec::binary(spec.logq)?;
    let hash = HashParams::new(spec.k, spec.s, field)?;
    let group = default_signing_group();
    let signed = GenerationParams::fit(signing_field(group)?, n.round() as u64, g, None)?;
    let key_elements = g + signed.data_symbols();
    let key_bits = key_elements as u64 * group.modulus_bits();

    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!(
        "packet size n               {} bits, generation size G = {g}",
        fmt_sig(n)
    ));
    line(format!(
        "per-packet signature h_p    {} bits = {} of n",
        fmt_sig(params.h_p),
        percent(params.h_p / n)
    ));
    line(format!(
        "per-generation hash h_g     {} bits = {} of nG ({} bits)",
        fmt_sig(params.h_g),
        percent(params.h_g / params.generation_bits()),
        fmt_sig(params.generation_bits())
    ));
    line(format!(
        "goodput fraction            packet {}, generation {}",
        fmt_sig(analytic::goodput_fraction_packet(n, h_p)?),
        fmt_sig(analytic::goodput_fraction_generation(n, g, h_g)?)
    ));
    line(format!(
        "crossover p (forward-all = packet) {}",
        fmt_sig(analytic::crossover_ec_vs_packet(n, h_p)?)
    ));
    line(format!(
        "polynomial hash             k = {}, log q = {}, s = {}: one symbol per {} payload symbols = {} of payload ({} of payload+hash)",
        spec.k,
        spec.logq,
        spec.s,
        spec.k,
        percent(1.0 / spec.k as f64),
        percent(hash.overhead_fraction())
    ));
    line(format!(
        "hash miss bound             ((k+1)/q)^s = {} (detection >= {})",
        fmt_sig(hash.miss_bound()),
        percent(hash.detection_bound())
    ));
    line(format!(
        "signature public key        {key_elements} elements x {} bits = {key_bits} bits per generation (P of {} bits); distributed once, not part of h_p",
        group.modulus_bits(),
        group.order_bits()
    ));
    Ok(out)
}

/// Parses `A->B=0.2` into an edge and its corruption probability.
pub fn parse_edge(s: &str) -> Result<(Edge, f64)> {
    let (name, p) = s.split_once('=').context("expected EDGE=P, e.g. A->B=0.2")?;
    let edge = Edge::ALL
        .into_iter()
        .find(|e| e.to_string().eq_ignore_ascii_case(name.trim()))
        .with_context(|| format!("unknown edge '{name}'"))?;
    let p: f64 = p
        .trim()
        .parse()
        .with_context(|| format!("bad probability '{p}'"))?;
    check_unit("edge probability", p)?;
    Ok((edge, p))
}

pub fn fig2_summary(g: usize, edges: &BTreeMap<Edge, f64>, trials: usize, seed: u64) -> Result<String> {
    let mut flagged: BTreeMap<Node, usize> = BTreeMap::new();
    let mut first: BTreeMap<String, usize> = BTreeMap::new();
    let (mut injected, mut f_clean, mut f_decoded, mut conserved) = (0, 0, 0, 0);
    for t in 0..trials as u64 {
        let config = Fig2Config::new(g, edges.clone(), seed.wrapping_add(t));
        let r = simulate_fig2_with(&config)?;
        injected += usize::from(r.injected_total() > 0);
        for n in &r.nodes {
            *flagged.entry(n.node).or_default() += usize::from(n.flagged());
        }
        *first
            .entry(r.first_flag.map_or("none".into(), |n| n.to_string()))
            .or_default() += 1;
        f_clean += usize::from(r.f_clean);
        f_decoded += usize::from(r.f_decoded);
        conserved +=
            usize::from(r.node(Node::F).received == r.node(Node::D).forwarded + r.node(Node::E).forwarded);
    }
    let mut out = String::new();
    let edges_txt: Vec<String> = edges.iter().map(|(e, p)| format!("{e}={p}")).collect();
    out.push_str(&format!(
        "G = {g}, trials = {trials}, seed = {seed}, corrupted edges: {}\n",
        if edges_txt.is_empty() {
            "none".into()
        } else {
            edges_txt.join(", ")
        }
    ));
    out.push_str(&format!("trials with injected corruption: {injected}\n"));
    for (node, count) in &flagged {
        out.push_str(&format!("node {node} flagged in {count} trials\n"));
    }
    let first_txt: Vec<String> = first.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    out.push_str(&format!("first node to flag: {}\n", first_txt.join(", ")));
    out.push_str(&format!(
        "F received only valid packets in {f_clean}/{trials} trials\n"
    ));
    out.push_str(&format!(
        "F decoded the full generation in {f_decoded}/{trials} trials\n"
    ));
    out.push_str(&format!(
        "F received = D forwarded + E forwarded in {conserved}/{trials} trials\n"
    ));
    Ok(out)
}
