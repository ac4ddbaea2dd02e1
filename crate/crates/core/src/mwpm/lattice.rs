//! Elementary space-time error lattice behind the matching weights.
//!
//! Nodes are (stabilizer, layer) pairs for one stabilizer family;
//! layers 1..=T are the measured syndrome increments and, when the
//! sequence ends in a data readout, layer T+1 holds the final
//! increments.  A single absorbing boundary node stands in for the
//! open sides of the code.  Each lattice edge is one elementary fault
//! class with an analytically aggregated per-cycle probability:
//!
//! * space edges: a data-qubit error flipping the two stabilizers
//!   that share the qubit (or one stabilizer and the boundary),
//!   aggregated over the schedule steps in which both stabilizers see
//!   it within the same cycle, and over parallel qubits;
//! * diagonal edges: the same data error landing between the two
//!   stabilizers' reads, so the later reader reports it one cycle
//!   before the earlier reader;
//! * one-cycle time edges: an ancilla flip between two readouts,
//!   aggregated over its 6 exposed steps;
//! * two-cycle time edges: a lone misreport, which shows up in the
//!   increments two cycles apart because ancillas are not reset.
//!
//! Edge weight is -ln(probability); shortest paths are then maximum-
//! likelihood fault chains.  Every space step crosses the measured
//! all-data parity once, so a path's crossing parity is its space-step
//! count mod 2.  Probabilities of zero are floored so the lattice
//! stays connected and decoding never fails on inconsistent input.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::layout::{CodeLayout, StabKind, N_DATA, N_STABS_PER_KIND};
use crate::sim::ErrorParams;

/// Floor for aggregated edge probabilities; keeps -ln finite.
const MIN_EDGE_P: f64 = 1e-30;

/// Coherent schedule steps in which a data qubit can pick up an error
/// that this cycle's readout attributes to one space edge.
const DATA_STEPS: u32 = 7;

/// Steps in which an ancilla is exposed between consecutive readouts.
const ANCILLA_STEPS: u32 = 6;

#[derive(Clone, Copy, Debug)]
struct LatticeEdge {
    to: usize,
    weight: f64,
    crossing: u8,
}

/// Distance-and-parity result of one Dijkstra run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct PathCost {
    pub dist: f64,
    pub crossing: u8,
}

pub(crate) struct Lattice {
    stabs: usize,
    layers: usize,
    adjacency: Vec<Vec<LatticeEdge>>,
}

/// Probability that an odd number of `steps` independent flips, each
/// of probability `p`, occur.
fn odd_flip_prob(p: f64, steps: u32) -> f64 {
    (1.0 - (1.0 - 2.0 * p).powi(steps as i32)) / 2.0
}

/// Combine independent fault probabilities: odds that at least one
/// fires is 1 - prod(1 - p); parity subtleties beyond leading order
/// are deliberately ignored in this aggregate.
fn either(a: f64, b: f64) -> f64 {
    1.0 - (1.0 - a) * (1.0 - b)
}

fn weight(p: f64) -> f64 {
    -p.max(MIN_EDGE_P).ln()
}

impl Lattice {
    /// Build the lattice for `kind`-family defects of a `cycles`-cycle
    /// sequence.  `with_final_layer` adds layer T+1 (data readout);
    /// without it, late lone defects instead get time-like boundary
    /// edges.
    pub fn build(
        layout: &CodeLayout,
        kind: StabKind,
        params: &ErrorParams,
        cycles: usize,
        with_final_layer: bool,
    ) -> Lattice {
        let stabs = N_STABS_PER_KIND;
        let layers = if with_final_layer { cycles + 1 } else { cycles };
        let n_nodes = stabs * layers;
        let mut lattice = Lattice {
            stabs,
            layers,
            adjacency: vec![vec![]; n_nodes + 1],
        };

        // The error family that flips this stabilizer kind.
        let q_flip = match kind {
            StabKind::Z => params.p_x + params.p_y,
            StabKind::X => params.p_z + params.p_y,
        };
        let p_data = odd_flip_prob(q_flip, DATA_STEPS);
        let p_anc = odd_flip_prob(q_flip, ANCILLA_STEPS);

        // Space edges: aggregate data qubits by the stabilizer pair
        // (or single stabilizer -> boundary) they connect.  A shared
        // qubit is read in two CNOT slots; errors in the gap between
        // the reads surface one cycle apart (diagonal edge from the
        // later reader at t to the earlier at t+1), the rest of the
        // cycle surfaces in the same layer.
        let mut pair_p = vec![vec![0.0f64; stabs]; stabs];
        let mut diag_p = vec![vec![0.0f64; stabs]; stabs];
        let mut bound_p = vec![0.0f64; stabs];
        for q in 0..N_DATA {
            let on = layout.stabs_on(kind, q);
            match on.len() {
                1 => bound_p[on[0]] = either(bound_p[on[0]], p_data),
                2 => {
                    let slot0 = layout.cnot_slot(kind, on[0], q).expect("scheduled read");
                    let slot1 = layout.cnot_slot(kind, on[1], q).expect("scheduled read");
                    let (early, late) = if slot0 < slot1 {
                        (on[0], on[1])
                    } else {
                        (on[1], on[0])
                    };
                    let gap = slot0.abs_diff(slot1) as u32;
                    let (a, b) = (on[0].min(on[1]), on[0].max(on[1]));
                    pair_p[a][b] =
                        either(pair_p[a][b], odd_flip_prob(q_flip, DATA_STEPS - gap));
                    diag_p[late][early] =
                        either(diag_p[late][early], odd_flip_prob(q_flip, gap));
                }
                n => unreachable!("data qubit {q} sits on {n} {kind:?} stabilizers"),
            }
        }
        for layer in 1..=layers {
            for a in 0..stabs {
                for b in a + 1..stabs {
                    if pair_p[a][b] > 0.0 {
                        lattice.space_edge(
                            lattice.node(a, layer),
                            lattice.node(b, layer),
                            pair_p[a][b],
                        );
                    }
                }
                lattice.space_edge(lattice.node(a, layer), lattice.boundary(), bound_p[a]);
            }
            if layer < layers {
                for late in 0..stabs {
                    for early in 0..stabs {
                        if diag_p[late][early] > 0.0 {
                            lattice.space_edge(
                                lattice.node(late, layer),
                                lattice.node(early, layer + 1),
                                diag_p[late][early],
                            );
                        }
                    }
                }
            }
        }

        // Time edges.  An ancilla flip in cycle t shifts every later
        // measurement, flipping increments t and t+1; a lone misreport
        // at t flips increments t and t+2 (t+1 and t+2 land on the
        // final layer when they point past the last readout).
        for z in 0..stabs {
            for t in 1..=cycles {
                let anc_partner = t + 1;
                let mis_partner = t + 2;
                if with_final_layer {
                    let anc_to = anc_partner.min(cycles + 1);
                    let mis_to = mis_partner.min(cycles + 1);
                    let mut p_by_span = [0.0f64; 2];
                    p_by_span[(anc_to - t) - 1] = p_anc;
                    let idx = (mis_to - t) - 1;
                    p_by_span[idx] = either(p_by_span[idx], params.p_m);
                    for (span, &p) in p_by_span.iter().enumerate() {
                        if p > 0.0 && t + span + 1 <= layers {
                            lattice.time_edge(
                                lattice.node(z, t),
                                lattice.node(z, t + span + 1),
                                p,
                            );
                        }
                    }
                } else {
                    // Open time end: partners past the last increment
                    // fall onto the boundary, aggregated per node.
                    let mut to_boundary = 0.0f64;
                    if anc_partner <= cycles {
                        if p_anc > 0.0 {
                            lattice.time_edge(lattice.node(z, t), lattice.node(z, anc_partner), p_anc);
                        }
                    } else {
                        to_boundary = either(to_boundary, p_anc);
                    }
                    if mis_partner <= cycles {
                        if params.p_m > 0.0 {
                            lattice.time_edge(lattice.node(z, t), lattice.node(z, mis_partner), params.p_m);
                        }
                    } else {
                        to_boundary = either(to_boundary, params.p_m);
                    }
                    if to_boundary > 0.0 {
                        lattice.time_edge(lattice.node(z, t), lattice.boundary(), to_boundary);
                    }
                }
            }
        }
        lattice
    }

    /// Node id of `stab` at 1-based `layer`.
    pub fn node(&self, stab: usize, layer: usize) -> usize {
        debug_assert!(stab < self.stabs && (1..=self.layers).contains(&layer));
        (layer - 1) * self.stabs + stab
    }

    /// The absorbing boundary node.
    pub fn boundary(&self) -> usize {
        self.stabs * self.layers
    }

    fn space_edge(&mut self, u: usize, v: usize, p: f64) {
        self.push_edge(u, v, weight(p), 1);
    }

    fn time_edge(&mut self, u: usize, v: usize, p: f64) {
        self.push_edge(u, v, weight(p), 0);
    }

    fn push_edge(&mut self, u: usize, v: usize, w: f64, crossing: u8) {
        self.adjacency[u].push(LatticeEdge { to: v, weight: w, crossing });
        if v != self.boundary() {
            self.adjacency[v].push(LatticeEdge { to: u, weight: w, crossing });
        }
    }

    /// Dijkstra from `from` over the whole lattice plus the boundary.
    /// Ties in distance break toward the lower node id, which pins the
    /// reported crossing parity deterministically.
    pub fn distances(&self, from: usize) -> Vec<Option<PathCost>> {
        #[derive(PartialEq)]
        struct Item {
            dist: f64,
            node: usize,
            crossing: u8,
        }
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other
                    .dist
                    .total_cmp(&self.dist)
                    .then_with(|| other.node.cmp(&self.node))
                    .then_with(|| other.crossing.cmp(&self.crossing))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let n = self.adjacency.len();
        let mut best: Vec<Option<PathCost>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        heap.push(Item { dist: 0.0, node: from, crossing: 0 });
        while let Some(Item { dist, node, crossing }) = heap.pop() {
            match best[node] {
                Some(_) => continue,
                None => best[node] = Some(PathCost { dist, crossing }),
            }
            if node == self.boundary() {
                // Paths never continue through the boundary.
                continue;
            }
            for e in &self.adjacency[node] {
                if best[e.to].is_none() {
                    heap.push(Item {
                        dist: dist + e.weight,
                        node: e.to,
                        crossing: crossing ^ e.crossing,
                    });
                }
            }
        }
        best
    }
}
