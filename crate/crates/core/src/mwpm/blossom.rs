//! Exact maximum-weight matching in general graphs.
//!
//! Primal-dual blossom method (Edmonds; the O(V^3) formulation in
//! Galil's 1986 survey).  The structure follows Joris van Rantwijk's
//! well-tested reference implementation.  Weights are integers; the
//! solver doubles them internally so every dual variable stays
//! integral, which makes the optimum exact with no floating-point
//! tolerance anywhere.  `debug_assertions` builds re-verify the
//! complementary-slackness certificate after every solve.

use crate::error::{Error, Result};

/// Sentinel for "no vertex / no endpoint / no edge".
pub const NONE: usize = usize::MAX;

/// Maximum-weight matching of an undirected graph.
///
/// `edges` holds `(u, v, weight)` with `u != v`, at most one edge per
/// vertex pair, vertices in `0..n_vertices`.  With `max_cardinality`
/// only maximum-cardinality matchings compete on weight.  Returns the
/// mate vector: `mate[v]` is v's partner or [`NONE`].
pub fn max_weight_matching(
    n_vertices: usize,
    edges: &[(usize, usize, i64)],
    max_cardinality: bool,
) -> Vec<usize> {
    if edges.is_empty() {
        return vec![NONE; n_vertices];
    }
    let mut solver = Solver::new(n_vertices, edges, max_cardinality);
    solver.solve();
    #[cfg(debug_assertions)]
    solver.verify_optimum();
    let mut mate = solver.mate;
    for v in 0..n_vertices {
        if mate[v] != NONE {
            mate[v] = solver.endpoint[mate[v]];
        }
    }
    for v in 0..n_vertices {
        debug_assert!(mate[v] == NONE || mate[mate[v]] == v);
    }
    mate
}

/// Minimum-weight perfect matching over nonnegative weights, via the
/// complement transform and a forced maximum-cardinality solve.
pub fn min_weight_perfect_matching(
    n_vertices: usize,
    edges: &[(usize, usize, i64)],
) -> Result<Vec<usize>> {
    if n_vertices == 0 {
        return Ok(vec![]);
    }
    let top = edges.iter().map(|e| e.2).max().unwrap_or(0);
    debug_assert!(edges.iter().all(|e| e.2 >= 0));
    let flipped: Vec<(usize, usize, i64)> =
        edges.iter().map(|&(u, v, w)| (u, v, top + 1 - w)).collect();
    let mate = max_weight_matching(n_vertices, &flipped, true);
    if let Some(v) = mate.iter().position(|&m| m == NONE) {
        return Err(Error::InvalidArgument(format!(
            "no perfect matching: vertex {v} cannot be covered"
        )));
    }
    Ok(mate)
}

/// State for one solve.  Vertices are `0..n`; non-trivial blossoms use
/// ids `n..2n`.  Edge endpoints are `2k` and `2k+1` for edge `k`, so
/// `p ^ 1` is the opposite end of the edge containing endpoint `p`.
struct Solver {
    n: usize,
    edges: Vec<(usize, usize, i64)>,
    max_cardinality: bool,
    /// endpoint[p]: vertex to which endpoint p attaches.
    endpoint: Vec<usize>,
    /// neighbend[v]: endpoints remote to v, one per incident edge.
    neighbend: Vec<Vec<usize>>,
    /// mate[v]: remote endpoint of v's matched edge, or NONE.
    mate: Vec<usize>,
    /// label[b]: 0 free, 1 S, 2 T (top-level blossoms; also leaves of
    /// T-blossoms reached from outside).
    label: Vec<usize>,
    /// labelend[b]: remote endpoint of the edge through which the
    /// label was obtained.
    labelend: Vec<usize>,
    /// inblossom[v]: top-level blossom containing vertex v.
    inblossom: Vec<usize>,
    /// blossomparent[b]: immediate parent blossom, or NONE.
    blossomparent: Vec<usize>,
    /// blossomchilds[b]: sub-blossoms, base first, in cycle order.
    blossomchilds: Vec<Vec<usize>>,
    /// blossombase[b]: base vertex of (sub-)blossom b.
    blossombase: Vec<usize>,
    /// blossomendps[b]: endpoint of child i on the edge to child i+1.
    blossomendps: Vec<Vec<usize>>,
    /// bestedge[v or b]: least-slack edge for delta2/delta3 tracking.
    bestedge: Vec<usize>,
    /// blossombestedges[b]: least-slack edges from S-blossom b to each
    /// neighbouring S-blossom.
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    /// dualvar[v] = 2u(v) for vertices, z(b) for blossoms.
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Solver {
    fn new(n_vertices: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> Self {
        // Doubled weights keep every dual integral (van Rantwijk's
        // even-integer-weights condition), so delta3 = slack/2 never
        // truncates.
        let edges: Vec<(usize, usize, i64)> =
            edges.iter().map(|&(i, j, w)| (i, j, 2 * w)).collect();
        let n = n_vertices;
        let nedge = edges.len();
        for &(i, j, _) in &edges {
            assert!(i != j && i < n && j < n);
        }
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let endpoint: Vec<usize> = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![vec![]; n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut blossombase: Vec<usize> = (0..n).collect();
        blossombase.extend(std::iter::repeat(NONE).take(n));
        let mut dualvar = vec![maxweight; n];
        dualvar.extend(std::iter::repeat(0).take(n));
        Solver {
            n,
            max_cardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![vec![]; 2 * n],
            blossombase,
            blossomendps: vec![vec![]; 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![vec![]; 2 * n],
            unusedblossoms: (n..2 * n).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: vec![],
            edges,
        }
    }

    /// Slack of edge k, valid only across top-level blossoms.
    fn slack(&self, k: usize) -> i64 {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - wt
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut leaves = vec![];
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.n {
                leaves.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().copied());
            }
        }
        leaves
    }

    /// Label the top-level blossom of w; S-labels enqueue the leaves,
    /// T-labels immediately S-label the blossom's mate.
    fn assign_label(&mut self, w: usize, t: usize, p: usize) {
        let b = self.inblossom[w];
        assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.blossom_leaves(b);
            self.queue.extend(leaves);
        } else {
            let base = self.blossombase[b];
            assert!(self.mate[base] != NONE);
            let mbase = self.mate[base];
            let v = self.endpoint[mbase];
            self.assign_label(v, 1, mbase ^ 1);
        }
    }

    /// Trace back from both ends of an S-S edge; returns the first
    /// common ancestor's base vertex (a new blossom) or NONE (an
    /// augmenting path).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = vec![];
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            assert!(self.label[b] == 1);
            path.push(b);
            self.label[b] = 5;
            assert!(self.labelend[b] == self.mate[self.blossombase[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                assert!(self.label[b] == 2);
                assert!(self.labelend[b] != NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Shrink the odd cycle through edge k around `base` into a fresh
    /// S-blossom, relabelling captured T-vertices as S.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().unwrap();
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut childs = vec![];
        let mut endps = vec![];
        while bv != bb {
            self.blossomparent[bv] = b;
            childs.push(bv);
            endps.push(self.labelend[bv]);
            assert!(
                self.label[bv] == 2
                    || (self.label[bv] == 1
                        && self.labelend[bv] == self.mate[self.blossombase[bv]])
            );
            assert!(self.labelend[bv] != NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        childs.push(bb);
        childs.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            childs.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            assert!(
                self.label[bw] == 2
                    || (self.label[bw] == 1
                        && self.labelend[bw] == self.mate[self.blossombase[bw]])
            );
            assert!(self.labelend[bw] != NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.blossomchilds[b] = childs;
        self.blossomendps[b] = endps;
        assert!(self.label[bb] == 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        for v in self.blossom_leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        // Merge the children's least-slack edge tables.
        let mut bestedgeto = vec![NONE; 2 * self.n];
        for bv in self.blossomchilds[b].clone() {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                self.blossom_leaves(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossombestedges[bv].clone()]
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv] = vec![];
            self.bestedge[bv] = NONE;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for &k in &self.blossombestedges[b] {
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    /// Undo a blossom: promote its children to top level and, when it
    /// held a T-label mid-stage, spread labels around the cycle.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.blossom_leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            assert!(self.labelend[b] != NONE);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&c| c == entrychild)
                .unwrap() as i64;
            let (jstep, endptrick): (i64, usize) = if j & 1 != 0 {
                j -= self.blossomchilds[b].len() as i64;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                // Relabel the T-sub-blossom.
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint
                    [wrap(&self.blossomendps[b], j - endptrick as i64) ^ endptrick ^ 1]] = 0;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, 2, p);
                // Step to the next S-sub-blossom and allow its edges.
                self.allowedge[wrap(&self.blossomendps[b], j - endptrick as i64) / 2] = true;
                j += jstep;
                p = wrap(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            // The base keeps its T label without relabelling its mate.
            let bv = wrap(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while wrap(&self.blossomchilds[b], j) != entrychild {
                let bv = wrap(&self.blossomchilds[b], j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut v = NONE;
                for leaf in self.blossom_leaves(bv) {
                    v = leaf;
                    if self.label[v] != 0 {
                        break;
                    }
                }
                if v != NONE && self.label[v] != 0 {
                    assert!(self.label[v] == 2);
                    assert!(self.inblossom[v] == bv);
                    self.label[v] = 0;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                    let lblend = self.labelend[v];
                    self.assign_label(v, 2, lblend);
                }
                j += jstep;
            }
        }
        self.label[b] = NONE;
        self.labelend[b] = NONE;
        self.blossombase[b] = NONE;
        self.bestedge[b] = NONE;
        self.blossomchilds[b] = vec![];
        self.blossomendps[b] = vec![];
        self.blossombestedges[b] = vec![];
        self.unusedblossoms.push(b);
    }

    /// Swap matched/unmatched edges along the path inside blossom b
    /// from vertex v down to the base, making v the new base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as i64;
        let (jstep, endptrick): (i64, usize) = if i & 1 != 0 {
            j -= self.blossomchilds[b].len() as i64;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = wrap(&self.blossomchilds[b], j);
            let p = wrap(&self.blossomendps[b], j - endptrick as i64) ^ endptrick;
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = wrap(&self.blossomchilds[b], j);
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        assert!(self.blossombase[b] == v);
    }

    /// Augment along the path through S-S edge k out to two exposed
    /// vertices.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for &(start, start_p) in &[(v, 2 * k + 1), (w, 2 * k)] {
            let (mut s, mut p) = (start, start_p);
            loop {
                let bs = self.inblossom[s];
                assert!(self.label[bs] == 1);
                assert!(self.labelend[bs] == self.mate[self.blossombase[bs]]);
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                assert!(self.label[bt] == 2);
                assert!(self.labelend[bt] != NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                assert!(self.blossombase[bt] == t);
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    /// Complementary-slackness certificate of the final matching.
    #[cfg(debug_assertions)]
    fn verify_optimum(&self) {
        let vdualoffset = if self.max_cardinality {
            (-self.dualvar[..self.n].iter().min().unwrap()).max(0)
        } else {
            0
        };
        assert!(self.dualvar[..self.n].iter().min().unwrap_or(&0) + vdualoffset >= 0);
        assert!(*self.dualvar[self.n..].iter().min().unwrap_or(&0) >= 0);
        for (k, &(i, j, wt)) in self.edges.iter().enumerate() {
            let mut s = self.dualvar[i] + self.dualvar[j] - wt;
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while self.blossomparent[*iblossoms.last().unwrap()] != NONE {
                iblossoms.push(self.blossomparent[*iblossoms.last().unwrap()]);
            }
            while self.blossomparent[*jblossoms.last().unwrap()] != NONE {
                jblossoms.push(self.blossomparent[*jblossoms.last().unwrap()]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += 2 * self.dualvar[bi];
            }
            assert!(s >= 0);
            if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k);
                assert!(s == 0);
            }
        }
        for v in 0..self.n {
            assert!(self.mate[v] != NONE || self.dualvar[v] + vdualoffset == 0);
        }
        for b in self.n..2 * self.n {
            if self.blossombase[b] != NONE && self.dualvar[b] > 0 {
                assert!(self.blossomendps[b].len() % 2 == 1);
                for (ix, &p) in self.blossomendps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert!(self.mate[self.endpoint[p]] == p ^ 1);
                        assert!(self.mate[self.endpoint[p ^ 1]] == p);
                    }
                }
            }
        }
    }

    fn solve(&mut self) {
        // Each stage augments the matching by one edge or proves no
        // further augmenting path exists.
        for _ in 0..self.n {
            self.label = vec![0; 2 * self.n];
            self.bestedge = vec![NONE; 2 * self.n];
            for b in self.n..2 * self.n {
                self.blossombestedges[b] = vec![];
            }
            self.allowedge = vec![false; self.edges.len()];
            self.queue = vec![];
            for v in 0..self.n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                // Substage: grow trees until an augmenting path shows
                // up or every reachable vertex is labelled.
                while !self.queue.is_empty() && !augmented {
                    let v = self.queue.pop().unwrap();
                    assert!(self.label[self.inblossom[v]] == 1);
                    for p in self.neighbend[v].clone() {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                assert!(self.label[self.inblossom[w]] == 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE
                                || kslack < self.slack(self.bestedge[b])
                            {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE
                                || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // No path under the current duals; pump slack out.
                // All quantities are pre-doubled.
                let mut deltatype = -1;
                let mut delta = 0;
                let mut deltaedge = 0;
                let mut deltablossom = 0;
                if !self.max_cardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..self.n].iter().min().unwrap();
                }
                for v in 0..self.n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.n {
                    if self.blossomparent[b] == NONE
                        && self.label[b] == 1
                        && self.bestedge[b] != NONE
                    {
                        let d = self.slack(self.bestedge[b]) / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.n..2 * self.n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // Max-cardinality optimum; final clamp makes the
                    // certificate verifiable.
                    assert!(self.max_cardinality);
                    deltatype = 1;
                    delta = (*self.dualvar[..self.n].iter().min().unwrap()).max(0);
                }
                for v in 0..self.n {
                    match self.label[self.inblossom[v]] {
                        0 => {}
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => unreachable!(),
                    }
                }
                for b in self.n..2 * self.n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            0 => {}
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => unreachable!(),
                        }
                    }
                }
                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        assert!(self.label[self.inblossom[i]] == 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => unreachable!(),
                }
            }
            if !augmented {
                break;
            }
            for b in self.n..2 * self.n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}

/// Python-style index into a cycle list: negative wraps from the end.
fn wrap(v: &[usize], index: i64) -> usize {
    if index >= 0 {
        v[index as usize]
    } else {
        v[v.len() - (-index) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: usize = NONE;

    fn mwm(edges: &[(usize, usize, i64)]) -> Vec<usize> {
        let n = edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0);
        max_weight_matching(n, edges, false)
    }

    fn mwm_card(edges: &[(usize, usize, i64)]) -> Vec<usize> {
        let n = edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0);
        max_weight_matching(n, edges, true)
    }

    #[test]
    fn trivial_graphs() {
        assert_eq!(max_weight_matching(0, &[], false), Vec::<usize>::new());
        assert_eq!(max_weight_matching(3, &[], false), vec![X, X, X]);
        assert_eq!(mwm(&[(0, 1, 1)]), vec![1, 0]);
        assert_eq!(mwm(&[(1, 2, 10), (2, 3, 11)]), vec![X, X, 3, 2]);
        assert_eq!(
            mwm(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)]),
            vec![X, X, 3, 2, X]
        );
    }

    #[test]
    fn max_cardinality_changes_the_answer() {
        assert_eq!(
            mwm_card(&[(1, 2, 5), (2, 3, 11), (3, 4, 5)]),
            vec![X, 2, 1, 4, 3]
        );
    }

    #[test]
    fn negative_weights() {
        let e = [(1, 2, 2), (1, 3, -2), (2, 3, 1), (2, 4, -1), (3, 4, -6)];
        assert_eq!(mwm(&e), vec![X, 2, 1, X, X]);
        assert_eq!(mwm_card(&e), vec![X, 3, 4, 1, 2]);
    }

    #[test]
    fn all_negative_weights_yield_empty_matching() {
        assert_eq!(mwm(&[(0, 1, -3), (1, 2, -1)]), vec![X, X, X]);
    }

    #[test]
    fn s_blossom_augmentation() {
        assert_eq!(
            mwm(&[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)]),
            vec![X, 2, 1, 4, 3]
        );
        assert_eq!(
            mwm(&[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)]),
            vec![X, 6, 3, 2, 5, 4, 1]
        );
    }

    #[test]
    fn s_to_t_relabel_augmentation() {
        assert_eq!(
            mwm(&[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)]),
            vec![X, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            mwm(&[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (1, 6, 4)]),
            vec![X, 6, 3, 2, 5, 4, 1]
        );
        assert_eq!(
            mwm(&[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (3, 6, 4)]),
            vec![X, 2, 1, 6, 5, 4, 3]
        );
    }

    #[test]
    fn nested_s_blossom_augmentation() {
        assert_eq!(
            mwm(&[(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)]),
            vec![X, 3, 4, 1, 2, 6, 5]
        );
    }

    #[test]
    fn s_relabelled_into_nested_s_blossom() {
        assert_eq!(
            mwm(&[
                (1, 2, 10), (1, 7, 10), (2, 3, 12), (3, 4, 20), (3, 5, 20),
                (4, 5, 25), (5, 6, 10), (6, 7, 10), (7, 8, 8)
            ]),
            vec![X, 2, 1, 4, 3, 6, 5, 8, 7]
        );
    }

    #[test]
    fn nested_s_blossom_expands_recursively() {
        assert_eq!(
            mwm(&[
                (1, 2, 8), (1, 3, 8), (2, 3, 10), (2, 4, 12), (3, 5, 12),
                (4, 5, 14), (4, 6, 12), (5, 7, 12), (6, 7, 14), (7, 8, 12)
            ]),
            vec![X, 2, 1, 5, 6, 3, 4, 8, 7]
        );
    }

    #[test]
    fn s_blossom_relabelled_t_then_expanded() {
        assert_eq!(
            mwm(&[
                (1, 2, 23), (1, 5, 22), (1, 6, 15), (2, 3, 25),
                (3, 4, 22), (4, 5, 25), (4, 8, 14), (5, 7, 13)
            ]),
            vec![X, 6, 3, 2, 8, 7, 1, 5, 4]
        );
    }

    #[test]
    fn nested_s_blossom_relabelled_t_then_expanded() {
        assert_eq!(
            mwm(&[
                (1, 2, 19), (1, 3, 20), (1, 8, 8), (2, 3, 25), (2, 4, 18),
                (3, 5, 18), (4, 5, 13), (4, 7, 7), (5, 6, 7)
            ]),
            vec![X, 8, 3, 2, 7, 6, 5, 4, 1]
        );
    }

    #[test]
    fn nasty_t_blossom_expansions() {
        assert_eq!(
            mwm(&[
                (1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50),
                (1, 6, 30), (3, 9, 35), (4, 8, 35), (5, 7, 26), (9, 10, 5)
            ]),
            vec![X, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
        assert_eq!(
            mwm(&[
                (1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50),
                (1, 6, 30), (3, 9, 35), (4, 8, 26), (5, 7, 40), (9, 10, 5)
            ]),
            vec![X, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
        assert_eq!(
            mwm(&[
                (1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50),
                (1, 6, 30), (3, 9, 35), (4, 8, 28), (5, 7, 26), (9, 10, 5)
            ]),
            vec![X, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]
        );
    }

    #[test]
    fn nested_t_blossom_lands_on_augmenting_path() {
        assert_eq!(
            mwm(&[
                (1, 2, 45), (1, 7, 45), (2, 3, 50), (3, 4, 45), (4, 5, 95),
                (4, 6, 94), (5, 6, 94), (6, 7, 50), (1, 8, 30), (3, 11, 35),
                (5, 9, 36), (7, 10, 26), (11, 12, 5)
            ]),
            vec![X, 8, 3, 2, 6, 9, 4, 10, 1, 5, 7, 12, 11]
        );
    }

    #[test]
    fn nested_s_blossom_relabelled_s_expands_recursively() {
        assert_eq!(
            mwm(&[
                (1, 2, 40), (1, 3, 40), (2, 3, 60), (2, 4, 55), (3, 5, 55),
                (4, 5, 50), (1, 8, 15), (5, 7, 30), (7, 6, 10), (8, 10, 10),
                (4, 9, 30)
            ]),
            vec![X, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8]
        );
    }

    /// Exhaustive oracle: the best value of `weight + size * bonus`
    /// over all matchings of a small graph.
    fn brute_best(edges: &[(usize, usize, i64)], bonus: i64) -> i64 {
        fn go(edges: &[(usize, usize, i64)], idx: usize, used: u32, value: i64, bonus: i64) -> i64 {
            if idx == edges.len() {
                return value;
            }
            let (i, j, w) = edges[idx];
            let mut best = go(edges, idx + 1, used, value, bonus);
            if used & (1 << i) == 0 && used & (1 << j) == 0 {
                best = best.max(go(
                    edges,
                    idx + 1,
                    used | 1 << i | 1 << j,
                    value + w + bonus,
                    bonus,
                ));
            }
            best
        }
        go(edges, 0, 0, 0, bonus)
    }

    fn matching_weight(mate: &[usize], edges: &[(usize, usize, i64)]) -> (i64, i64) {
        let mut weight = 0;
        let mut size = 0;
        for &(i, j, w) in edges {
            if mate[i] == j {
                weight += w;
                size += 1;
            }
        }
        (weight, size)
    }

    #[test]
    fn random_graphs_match_the_exhaustive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for case in 0..300 {
            let n = rng.random_range(2..9usize);
            let mut edges = vec![];
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < 0.6 {
                        edges.push((i, j, rng.random_range(-20..60)));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            for &maxcard in &[false, true] {
                let mate = max_weight_matching(n, &edges, maxcard);
                let (weight, size) = matching_weight(&mate, &edges);
                // A per-edge bonus larger than any possible weight
                // difference makes cardinality dominate in the oracle.
                let bonus = if maxcard {
                    1 + 2 * edges.iter().map(|e| e.2.abs()).sum::<i64>()
                } else {
                    0
                };
                assert_eq!(
                    weight + size * bonus,
                    brute_best(&edges, bonus),
                    "case {case} maxcard={maxcard} edges={edges:?}"
                );
            }
        }
    }

    #[test]
    fn min_weight_perfect_matching_on_nonnegative_graphs() {
        // Square with one heavy diagonal: perfect matching must use
        // the two light opposite sides.
        let edges = [(0, 1, 5), (1, 2, 9), (2, 3, 5), (3, 0, 9), (0, 2, 1)];
        let mate = min_weight_perfect_matching(4, &edges).unwrap();
        assert_eq!(mate, vec![1, 0, 3, 2]);

        // A triangle has no perfect matching.
        assert!(min_weight_perfect_matching(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).is_err());
    }
}
