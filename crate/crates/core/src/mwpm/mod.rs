//! Baseline decoder: minimum-weight perfect matching on the defect
//! graph.
//!
//! Nonzero syndrome increments become graph vertices.  Edge weights
//! are shortest-path -log-likelihoods over the elementary space-time
//! error lattice (see `lattice`), so the minimum-weight matching is a
//! maximum-likelihood pairing of defects under independent elementary
//! faults.  Every defect also gets an edge to a shared boundary
//! vertex.  The matching itself is found exactly with an Edmonds
//! blossom implementation (see `blossom`); the decoder output is the
//! XOR of the crossing parities of all matched edges, which predicts
//! whether the fault chains flipped the measured data parity.

pub mod blossom;
mod lattice;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::layout::{CodeLayout, StabKind, N_STABS_PER_KIND};
use crate::sim::{ErrorParams, SyndromeSequence};

use lattice::Lattice;

/// Fixed-point scale turning -ln(p) path costs into integer weights.
const WEIGHT_SCALE: f64 = (1u64 << 20) as f64;

/// One nonzero syndrome increment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Defect {
    /// Stabilizer index within the family, 0..4.
    pub stab: usize,
    /// 1-based cycle of the increment; T+1 is the data readout.
    pub layer: usize,
}

/// Weighted edge between two graph vertices; `boundary` vertex id is
/// `defects.len()`.
#[derive(Clone, Copy, Debug)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    /// Shortest-path -log-likelihood, nonnegative.
    pub weight: f64,
    /// Parity of data-parity crossings along the minimal path.
    pub crossing: u8,
}

/// Complete defect graph for one sequence and one stabilizer family.
#[derive(Clone, Debug)]
pub struct MatchingGraph {
    pub defects: Vec<Defect>,
    /// All defect pairs, then one boundary edge per defect.
    pub edges: Vec<GraphEdge>,
    /// How edge probabilities were obtained.
    pub calibration: &'static str,
}

impl MatchingGraph {
    /// Vertex id of the boundary.
    pub fn boundary_vertex(&self) -> usize {
        self.defects.len()
    }
}

/// Result of matching a `MatchingGraph`.
#[derive(Clone, Debug, Default)]
pub struct Matching {
    /// Defect pairs matched to each other, lower index first.
    pub pairs: Vec<(usize, usize)>,
    /// Defects matched to the boundary.
    pub to_boundary: Vec<usize>,
    /// Total weight of the selected edges.
    pub total_weight: f64,
}

/// All-pairs shortest-path costs over one lattice, reused across
/// sequences of the same length.
pub struct DistanceTable {
    kind: StabKind,
    cycles: usize,
    with_final: bool,
    n_nodes: usize,
    dist: Vec<f64>,
    crossing: Vec<u8>,
}

impl DistanceTable {
    /// Run Dijkstra from every lattice node once.
    pub fn build(
        layout: &CodeLayout,
        kind: StabKind,
        params: &ErrorParams,
        cycles: usize,
    ) -> DistanceTable {
        let with_final = kind == StabKind::Z;
        let layers = if with_final { cycles + 1 } else { cycles };
        let n_nodes = N_STABS_PER_KIND * layers;
        let lat = Lattice::build(layout, kind, params, cycles, with_final);
        let stride = n_nodes + 1;
        let mut dist = vec![f64::INFINITY; n_nodes * stride];
        let mut crossing = vec![0u8; n_nodes * stride];
        for src in 0..n_nodes {
            let row = lat.distances(src);
            for (dst, cost) in row.iter().enumerate() {
                if let Some(c) = cost {
                    dist[src * stride + dst] = c.dist;
                    crossing[src * stride + dst] = c.crossing;
                }
            }
        }
        DistanceTable { kind, cycles, with_final, n_nodes, dist, crossing }
    }

    fn node(&self, d: Defect) -> usize {
        (d.layer - 1) * N_STABS_PER_KIND + d.stab
    }

    fn cost(&self, a: Defect, b: Defect) -> (f64, u8) {
        let i = self.node(a) * (self.n_nodes + 1) + self.node(b);
        (self.dist[i], self.crossing[i])
    }

    fn boundary_cost(&self, a: Defect) -> (f64, u8) {
        let i = self.node(a) * (self.n_nodes + 1) + self.n_nodes;
        (self.dist[i], self.crossing[i])
    }

    fn check(&self, kind: StabKind, cycles: usize) -> Result<()> {
        if kind != self.kind || cycles != self.cycles {
            return Err(Error::InvalidArgument(format!(
                "distance table built for {:?}/T={} used on {:?}/T={}",
                self.kind, self.cycles, kind, cycles
            )));
        }
        Ok(())
    }
}

/// Defects of one family in an increment stream.  `final_z` supplies
/// the data-readout increments as layer T+1 (Z family only).
fn collect_defects(increments: &[u8], final_z: Option<u8>, kind: StabKind) -> Vec<Defect> {
    let shift = match kind {
        StabKind::X => 0,
        StabKind::Z => N_STABS_PER_KIND,
    };
    let mut defects = Vec::new();
    for (i, &byte) in increments.iter().enumerate() {
        for stab in 0..N_STABS_PER_KIND {
            if (byte >> (shift + stab)) & 1 == 1 {
                defects.push(Defect { stab, layer: i + 1 });
            }
        }
    }
    if let Some(f) = final_z {
        debug_assert_eq!(kind, StabKind::Z);
        for stab in 0..N_STABS_PER_KIND {
            if (f >> stab) & 1 == 1 {
                defects.push(Defect { stab, layer: increments.len() + 1 });
            }
        }
    }
    defects
}

fn graph_from_table(table: &DistanceTable, defects: Vec<Defect>) -> MatchingGraph {
    let n = defects.len();
    let mut edges = Vec::with_capacity(n * (n + 1) / 2 + n);
    for i in 0..n {
        for j in i + 1..n {
            let (weight, crossing) = table.cost(defects[i], defects[j]);
            edges.push(GraphEdge { u: i, v: j, weight, crossing });
        }
    }
    for (i, &d) in defects.iter().enumerate() {
        let (weight, crossing) = table.boundary_cost(d);
        edges.push(GraphEdge { u: i, v: n, weight, crossing });
    }
    MatchingGraph { defects, edges, calibration: "analytic" }
}

/// Build the defect graph for `basis`-family decoding of `seq`.
pub fn build_graph(
    seq: &SyndromeSequence,
    basis: StabKind,
    layout: &CodeLayout,
    params: &ErrorParams,
) -> MatchingGraph {
    let table = DistanceTable::build(layout, basis, params, seq.cycles);
    build_graph_with_table(seq, basis, &table).expect("table matches sequence")
}

/// As `build_graph`, but against a prebuilt distance table.
pub fn build_graph_with_table(
    seq: &SyndromeSequence,
    basis: StabKind,
    table: &DistanceTable,
) -> Result<MatchingGraph> {
    table.check(basis, seq.cycles)?;
    let final_z = table.with_final.then_some(seq.final_increment_z);
    Ok(graph_from_table(table, collect_defects(&seq.increments, final_z, basis)))
}

/// Exact minimum-weight matching of all defects to each other or the
/// boundary.
pub fn mwpm(graph: &MatchingGraph) -> Matching {
    let n = graph.defects.len();
    if n == 0 {
        return Matching::default();
    }
    // Duplicate construction: vertices 0..n are defects, n..2n their
    // boundary images.  Pairing a defect with its image is matching
    // it to the boundary; images pair among themselves for free, so a
    // perfect matching always exists.
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    let mut weight_of: HashMap<(usize, usize), f64> = HashMap::new();
    for e in &graph.edges {
        let (u, v) = (e.u.min(e.v), e.u.max(e.v));
        if u == v {
            // Boundary-boundary (or degenerate) edges never bind.
            continue;
        }
        let scaled = (e.weight * WEIGHT_SCALE).round() as i64;
        if v == n {
            edges.push((u, n + u, scaled));
            weight_of.insert((u, n + u), e.weight);
        } else {
            edges.push((u, v, scaled));
            weight_of.insert((u, v), e.weight);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            edges.push((n + i, n + j, 0));
        }
    }
    let mate = blossom::min_weight_perfect_matching(2 * n, &edges)
        .expect("boundary images guarantee a perfect matching");
    let mut matching = Matching::default();
    for i in 0..n {
        let m = mate[i];
        if m == n + i {
            matching.to_boundary.push(i);
            matching.total_weight += weight_of[&(i, n + i)];
        } else if m > i {
            debug_assert!(m < n);
            matching.pairs.push((i, m));
            matching.total_weight += weight_of[&(i, m)];
        }
    }
    matching
}

/// Predicted parity flip: XOR of matched-edge crossing parities.
fn matching_parity(graph: &MatchingGraph, matching: &Matching) -> u8 {
    let mut crossing_of: HashMap<(usize, usize), u8> = HashMap::new();
    for e in &graph.edges {
        crossing_of.insert((e.u.min(e.v), e.u.max(e.v)), e.crossing);
    }
    let n = graph.defects.len();
    let mut parity = 0u8;
    for &(i, j) in &matching.pairs {
        parity ^= crossing_of[&(i, j)];
    }
    for &i in &matching.to_boundary {
        parity ^= crossing_of[&(i, n)];
    }
    parity
}

/// One decoded sequence: the predicted parity and the evidence.
#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    /// Predicted parity of logical flips, to compare with the label.
    pub parity: u8,
    /// Number of defects matched.
    pub n_defects: usize,
    /// Total matching weight.
    pub weight: f64,
}

/// Full decode of one sequence: graph, matching, parity.
pub fn decode(
    seq: &SyndromeSequence,
    basis: StabKind,
    layout: &CodeLayout,
    params: &ErrorParams,
) -> u8 {
    let graph = build_graph(seq, basis, layout, params);
    let matching = mwpm(&graph);
    matching_parity(&graph, &matching)
}

/// Exhaustive minimum over all pairings; testing oracle.
pub fn brute_force_mwpm(graph: &MatchingGraph) -> Result<Matching> {
    let n = graph.defects.len();
    if n > 12 {
        return Err(Error::InvalidArgument(format!(
            "brute force capped at 12 defects, got {n}"
        )));
    }
    let mut pair_w = vec![vec![0.0f64; n]; n];
    let mut bound_w = vec![0.0f64; n];
    for e in &graph.edges {
        let (u, v) = (e.u.min(e.v), e.u.max(e.v));
        if u == v {
            continue;
        }
        if v == n {
            bound_w[u] = e.weight;
        } else {
            pair_w[u][v] = e.weight;
            pair_w[v][u] = e.weight;
        }
    }
    struct Search<'a> {
        pair_w: &'a [Vec<f64>],
        bound_w: &'a [f64],
        used: Vec<bool>,
        choice: Vec<(usize, usize)>,
        best: f64,
        best_choice: Vec<(usize, usize)>,
    }
    impl Search<'_> {
        fn go(&mut self, acc: f64) {
            if acc >= self.best {
                return;
            }
            let Some(i) = self.used.iter().position(|&u| !u) else {
                self.best = acc;
                self.best_choice = self.choice.clone();
                return;
            };
            self.used[i] = true;
            let n = self.used.len();
            for j in i + 1..n {
                if !self.used[j] {
                    self.used[j] = true;
                    self.choice.push((i, j));
                    self.go(acc + self.pair_w[i][j]);
                    self.choice.pop();
                    self.used[j] = false;
                }
            }
            self.choice.push((i, n));
            self.go(acc + self.bound_w[i]);
            self.choice.pop();
            self.used[i] = false;
        }
    }
    let mut search = Search {
        pair_w: &pair_w,
        bound_w: &bound_w,
        used: vec![false; n],
        choice: vec![],
        best: f64::INFINITY,
        best_choice: vec![],
    };
    if n == 0 {
        return Ok(Matching::default());
    }
    search.go(0.0);
    let mut matching = Matching { total_weight: search.best, ..Default::default() };
    for (i, j) in search.best_choice {
        if j == n {
            matching.to_boundary.push(i);
        } else {
            matching.pairs.push((i, j));
        }
    }
    Ok(matching)
}

/// Batch decoder caching one distance table per sequence length.
pub struct MwpmDecoder {
    layout: CodeLayout,
    params: ErrorParams,
    basis: StabKind,
    tables: RwLock<HashMap<usize, Arc<DistanceTable>>>,
}

impl MwpmDecoder {
    pub fn new(layout: CodeLayout, params: ErrorParams, basis: StabKind) -> MwpmDecoder {
        MwpmDecoder { layout, params, basis, tables: RwLock::new(HashMap::new()) }
    }

    /// Distance table for length `cycles`, built on first use.
    pub fn table_for(&self, cycles: usize) -> Arc<DistanceTable> {
        if let Some(t) = self.tables.read().unwrap().get(&cycles) {
            return Arc::clone(t);
        }
        let built = Arc::new(DistanceTable::build(
            &self.layout,
            self.basis,
            &self.params,
            cycles,
        ));
        let mut map = self.tables.write().unwrap();
        Arc::clone(map.entry(cycles).or_insert(built))
    }

    /// Decode the full sequence.
    pub fn decode(&self, seq: &SyndromeSequence) -> Result<DecodeOutcome> {
        let table = self.table_for(seq.cycles);
        let graph = build_graph_with_table(seq, self.basis, &table)?;
        let matching = mwpm(&graph);
        Ok(DecodeOutcome {
            parity: matching_parity(&graph, &matching),
            n_defects: graph.defects.len(),
            weight: matching.total_weight,
        })
    }

    /// Decode the first `t` cycles against the cycle-t virtual
    /// readout; requires per-cycle records.
    pub fn decode_truncated(&self, seq: &SyndromeSequence, t: usize) -> Result<DecodeOutcome> {
        let (increments, final_z, _) = seq.truncated(t)?;
        let table = self.table_for(t);
        let final_z = table.with_final.then_some(final_z);
        let graph = graph_from_table(&table, collect_defects(increments, final_z, self.basis));
        let matching = mwpm(&graph);
        Ok(DecodeOutcome {
            parity: matching_parity(&graph, &matching),
            n_defects: graph.defects.len(),
            weight: matching.total_weight,
        })
    }
}
