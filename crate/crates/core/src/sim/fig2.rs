//! Six-node diamond: A splits a generation of G packets over B and C; B and C
//! each check a G/2 sub-generation, decode it and send one G/4 quarter to D
//! and the other to E; D and E check each G/4 quarter and forward; F checks
//! and decodes the full generation.
//!
//! Quarters: A→B carries Q1∪Q2, A→C carries Q3∪Q4; B→D Q1, B→E Q2, C→D Q3,
//! C→E Q4. A node drops a unit it proves corrupted and forwards everything
//! else.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::adversary::{corrupt_stream_with, AttackMode, AttackModel};
use crate::analytic::Scheme;
use crate::detect::{check_subspan, SubspanVerdict};
use crate::rlnc::{
    combine_with, linalg, random_generation, subgeneration_view, Generation, GenerationParams, Origin, Packet,
};

use super::{stream_rng, CodingSetup, SimError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Node {
    pub const ALL: [Node; 6] = [Node::A, Node::B, Node::C, Node::D, Node::E, Node::F];
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Edge {
    AB,
    AC,
    BD,
    BE,
    CD,
    CE,
    DF,
    EF,
}

impl Edge {
    pub const ALL: [Edge; 8] = [
        Edge::AB,
        Edge::AC,
        Edge::BD,
        Edge::BE,
        Edge::CD,
        Edge::CE,
        Edge::DF,
        Edge::EF,
    ];

    pub fn endpoints(&self) -> (Node, Node) {
        match self {
            Edge::AB => (Node::A, Node::B),
            Edge::AC => (Node::A, Node::C),
            Edge::BD => (Node::B, Node::D),
            Edge::BE => (Node::B, Node::E),
            Edge::CD => (Node::C, Node::D),
            Edge::CE => (Node::C, Node::E),
            Edge::DF => (Node::D, Node::F),
            Edge::EF => (Node::E, Node::F),
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "{a}->{b}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Config {
    pub generation_size: usize,
    /// Corruption probability per packet on each edge; missing edges are clean.
    pub edges: BTreeMap<Edge, f64>,
    pub mode: AttackMode,
    pub seed: u64,
    pub packet_bits: u64,
    pub coding: CodingSetup,
}

impl Fig2Config {
    pub fn new(generation_size: usize, edges: BTreeMap<Edge, f64>, seed: u64) -> Self {
        Fig2Config {
            generation_size,
            edges,
            mode: AttackMode::RandomSymbol,
            seed,
            packet_bits: 1000,
            coding: CodingSetup::default(),
        }
    }
}

/// Traffic and checks at one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeReport {
    pub node: Node,
    pub received: usize,
    pub forwarded: usize,
    /// One verdict per sub-generation unit checked, in arrival order.
    pub checks: Vec<SubspanVerdict>,
}

impl NodeReport {
    fn new(node: Node) -> Self {
        NodeReport {
            node,
            received: 0,
            forwarded: 0,
            checks: Vec::new(),
        }
    }

    pub fn flagged(&self) -> bool {
        self.checks.contains(&SubspanVerdict::Corrupted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fig2Report {
    pub nodes: Vec<NodeReport>,
    /// Packets corrupted on each edge.
    pub injected: BTreeMap<Edge, usize>,
    /// First node, in topological order, whose check fired.
    pub first_flag: Option<Node>,
    /// Rank of what F received.
    pub f_rank: usize,
    /// Every packet F received lies in the source span.
    pub f_clean: bool,
    /// F recovered all G source payloads exactly.
    pub f_decoded: bool,
}

impl Fig2Report {
    pub fn node(&self, node: Node) -> &NodeReport {
        &self.nodes[node as usize]
    }

    pub fn injected_total(&self) -> usize {
        self.injected.values().sum()
    }
}

/// `count` combinations of `inputs` whose coefficient rows are independent.
fn recode(inputs: &[Packet], count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Packet>, SimError> {
    if count == 0 || inputs.is_empty() {
        return Ok(Vec::new());
    }
    let field = inputs[0].vector.field;
    let rows = loop {
        let rows: Vec<Vec<u64>> = (0..count).map(|_| field.random_vec(inputs.len(), rng)).collect();
        if linalg::rank(&field, rows.clone()) == count.min(inputs.len()) {
            break rows;
        }
    };
    rows.iter().map(|c| Ok(combine_with(inputs, c)?)).collect()
}

/// Ground truth after recoding: valid iff the packet is the span member its
/// coefficients name.
fn retag(mut packet: Packet, gen: &Generation) -> Packet {
    packet.origin = if packet.vector == gen.expected_vector(&packet.vector.coeffs) {
        Origin::Valid
    } else {
        Origin::Corrupted
    };
    packet
}

/// A unit that survived its check, with its decoded sources when the span
/// pins them all down.
type Checked = (Vec<Packet>, Option<Vec<Packet>>);

struct Run<'a> {
    config: &'a Fig2Config,
    gen: Generation,
    rng: ChaCha8Rng,
    reports: Vec<NodeReport>,
    injected: BTreeMap<Edge, usize>,
}

impl Run<'_> {
    fn send(&mut self, edge: Edge, packets: Vec<Packet>) -> Result<Vec<Packet>, SimError> {
        let (from, to) = edge.endpoints();
        self.reports[from as usize].forwarded += packets.len();
        self.reports[to as usize].received += packets.len();
        let p = self.config.edges.get(&edge).copied().unwrap_or(0.0);
        let before: Vec<bool> = packets.iter().map(Packet::is_corrupted).collect();
        let model = AttackModel::new(p, self.config.mode.clone(), self.config.seed)?;
        let out = corrupt_stream_with(packets, &model, &mut self.rng);
        let hit = out
            .iter()
            .zip(before)
            .filter(|(p, was)| p.is_corrupted() && !was)
            .count();
        *self.injected.entry(edge).or_default() += hit;
        Ok(out)
    }

    /// Checks one unit at `node`; returns it with the recovered sources as
    /// packets, or `None` when dropped.
    fn check(&mut self, node: Node, unit: Vec<Packet>) -> Result<Option<Checked>, SimError> {
        if unit.is_empty() {
            return Ok(None);
        }
        let sub = subgeneration_view(&unit, unit.len())?;
        let check = check_subspan(&sub, &self.config.coding.hash);
        self.reports[node as usize].checks.push(check.verdict);
        if check.verdict == SubspanVerdict::Corrupted {
            return Ok(None);
        }
        let sources = check.decode.is_complete().then(|| {
            check
                .decode
                .recovered
                .iter()
                .map(|r| {
                    let mut v = self.gen.source_vector(r.index);
                    v.payload = r.payload.clone();
                    v.hash = r.hash.clone();
                    retag(
                        Packet {
                            vector: v,
                            origin: Origin::Valid,
                        },
                        &self.gen,
                    )
                })
                .collect()
        });
        Ok(Some((unit, sources)))
    }

    /// B or C: split a checked half into its two quarters.
    fn split(
        &mut self,
        node: Node,
        unit: Vec<Packet>,
        quarters: [&[usize]; 2],
    ) -> Result<[Vec<Packet>; 2], SimError> {
        let Some((unit, sources)) = self.check(node, unit)? else {
            return Ok([Vec::new(), Vec::new()]);
        };
        let Some(sources) = sources else {
            // Span too small to decode: pass the unit on unchanged.
            let half = unit.len() / 2;
            return Ok([unit[..half].to_vec(), unit[half..].to_vec()]);
        };
        let mut out = [Vec::new(), Vec::new()];
        for (slot, quarter) in out.iter_mut().zip(quarters) {
            let picked: Vec<Packet> = sources
                .iter()
                .filter(|s| {
                    quarter.contains(&s.vector.coeffs.iter().position(|&c| c != 0).unwrap_or(usize::MAX))
                })
                .cloned()
                .collect();
            *slot = recode(&picked, quarter.len(), &mut self.rng)?
                .into_iter()
                .map(|p| retag(p, &self.gen))
                .collect();
        }
        Ok(out)
    }

    /// D or E: check each quarter separately and recode within it.
    fn relay(&mut self, node: Node, units: [Vec<Packet>; 2]) -> Result<Vec<Packet>, SimError> {
        let mut out = Vec::new();
        for unit in units {
            if let Some((unit, _)) = self.check(node, unit)? {
                let n = unit.len();
                out.extend(
                    recode(&unit, n, &mut self.rng)?
                        .into_iter()
                        .map(|p| retag(p, &self.gen)),
                );
            }
        }
        Ok(out)
    }
}

/// Runs the diamond once with the default coding setup.
pub fn simulate_fig2(
    generation_size: usize,
    edges: BTreeMap<Edge, f64>,
    seed: u64,
) -> Result<Fig2Report, SimError> {
    simulate_fig2_with(&Fig2Config::new(generation_size, edges, seed))
}

pub fn simulate_fig2_with(config: &Fig2Config) -> Result<Fig2Report, SimError> {
    let g = config.generation_size;
    if g == 0 || g % 4 != 0 {
        return Err(SimError::Config(format!(
            "generation size {g} is not a positive multiple of 4"
        )));
    }
    for (&edge, &p) in &config.edges {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::Config(format!("edge {edge} has probability {p}")));
        }
    }
    let gp = GenerationParams::fit(
        config.coding.field,
        config.packet_bits,
        g,
        Some(config.coding.hash.clone()),
    )?;
    let mut rng = stream_rng(config.seed, Scheme::Generation, 0.0, g);
    let gen_id = rng.gen::<u32>() as u64;
    let (gen, _) = random_generation(gen_id, gp, &mut rng);
    let mut run = Run {
        config,
        gen,
        rng,
        reports: Node::ALL.iter().map(|&n| NodeReport::new(n)).collect(),
        injected: BTreeMap::new(),
    };

    let q = g / 4;
    let quarters: Vec<Vec<usize>> = (0..4).map(|i| (i * q..(i + 1) * q).collect()).collect();
    let half_b: Vec<usize> = quarters[0].iter().chain(&quarters[1]).copied().collect();
    let half_c: Vec<usize> = quarters[2].iter().chain(&quarters[3]).copied().collect();

    let to_b = run.gen.encode_innovative_over(&half_b, &mut run.rng);
    let to_c = run.gen.encode_innovative_over(&half_c, &mut run.rng);
    let at_b = run.send(Edge::AB, to_b)?;
    let at_c = run.send(Edge::AC, to_c)?;

    let [b_d, b_e] = run.split(Node::B, at_b, [&quarters[0], &quarters[1]])?;
    let [c_d, c_e] = run.split(Node::C, at_c, [&quarters[2], &quarters[3]])?;
    let d_from_b = run.send(Edge::BD, b_d)?;
    let e_from_b = run.send(Edge::BE, b_e)?;
    let d_from_c = run.send(Edge::CD, c_d)?;
    let e_from_c = run.send(Edge::CE, c_e)?;

    let from_d = run.relay(Node::D, [d_from_b, d_from_c])?;
    let from_e = run.relay(Node::E, [e_from_b, e_from_c])?;
    let mut at_f = run.send(Edge::DF, from_d)?;
    at_f.extend(run.send(Edge::EF, from_e)?);

    let f_clean = at_f.iter().all(|p| !p.is_corrupted());
    let (f_rank, f_decoded) = if at_f.is_empty() {
        (0, false)
    } else {
        let sub = subgeneration_view(&at_f, at_f.len())?;
        let check = check_subspan(&sub, &config.coding.hash);
        run.reports[Node::F as usize].checks.push(check.verdict);
        let exact = check.decode.recovered.len() == g
            && check
                .decode
                .recovered
                .iter()
                .all(|r| r.payload == run.gen.source_payloads[r.index]);
        (check.decode.rank, exact)
    };

    let first_flag = Node::ALL.into_iter().find(|&n| run.reports[n as usize].flagged());
    Ok(Fig2Report {
        nodes: run.reports,
        injected: run.injected,
        first_flag,
        f_rank,
        f_clean,
        f_decoded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(list: &[(Edge, f64)]) -> BTreeMap<Edge, f64> {
        list.iter().copied().collect()
    }

    #[test]
    fn clean_run() {
        for seed in 0..20 {
            let r = simulate_fig2(8, BTreeMap::new(), seed).unwrap();
            for n in &r.nodes[1..] {
                assert!(n.checks.iter().all(|&v| v == SubspanVerdict::Valid), "{r:?}");
            }
            assert_eq!(r.first_flag, None);
            assert!(r.f_clean && r.f_decoded);
            assert_eq!(r.f_rank, 8);
            assert_eq!(r.node(Node::B).received, 4);
            assert_eq!(r.node(Node::D).received, 4);
            assert_eq!(r.node(Node::D).checks.len(), 2);
            assert_eq!(r.node(Node::F).received, 8);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(simulate_fig2(6, BTreeMap::new(), 0).is_err());
        assert!(simulate_fig2(0, BTreeMap::new(), 0).is_err());
        assert!(simulate_fig2(8, edges(&[(Edge::AB, 1.5)]), 0).is_err());
    }

    #[test]
    fn corruption_on_a_to_b_is_caught_at_b() {
        let mut fired = 0;
        for seed in 0..200 {
            let r = simulate_fig2(8, edges(&[(Edge::AB, 0.2)]), seed).unwrap();
            assert_eq!(
                r.node(Node::F).received,
                r.node(Node::D).forwarded + r.node(Node::E).forwarded
            );
            if r.injected_total() == 0 {
                assert_eq!(r.first_flag, None);
                continue;
            }
            fired += 1;
            assert_eq!(r.first_flag, Some(Node::B), "{r:?}");
            assert!(!r.node(Node::C).flagged());
            assert!(r.f_clean);
            assert_eq!(r.node(Node::F).received, 4);
            assert!(!r.f_decoded);
        }
        assert!(fired > 100);
    }

    #[test]
    fn corruption_below_d_is_invisible_upstream() {
        for seed in 0..100 {
            let r = simulate_fig2(8, edges(&[(Edge::DF, 0.5)]), seed).unwrap();
            assert!(!r.node(Node::B).flagged() && !r.node(Node::C).flagged());
            assert!(!r.node(Node::D).flagged() && !r.node(Node::E).flagged());
            assert_eq!(r.first_flag.is_some(), r.injected_total() > 0);
            if r.injected_total() > 0 {
                assert_eq!(r.first_flag, Some(Node::F));
            }
        }
        for seed in 0..50 {
            let r = simulate_fig2(8, edges(&[(Edge::BD, 0.5)]), seed).unwrap();
            assert!(!r.node(Node::B).flagged() && !r.node(Node::C).flagged());
            if r.injected_total() > 0 {
                assert_eq!(r.first_flag, Some(Node::D));
                assert!(r.f_clean);
            }
        }
    }

    #[test]
    fn deterministic() {
        let e = edges(&[(Edge::AB, 0.3), (Edge::CE, 0.3)]);
        assert_eq!(
            simulate_fig2(12, e.clone(), 9).unwrap(),
            simulate_fig2(12, e, 9).unwrap()
        );
    }
}
