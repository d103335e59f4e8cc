//! Engine-side max-flow (Edmonds–Karp) with per-edge capacity caps.
//!
//! Used by the containment-set builder; intentionally separate from the
//! oracle's flow code so the oracles keep their evidentiary value.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{Edge, Mult, Multigraph, VertexId};

pub struct FlowResult {
    pub value: Mult,
    /// Minimum-cut edges (original graph edges crossing the source side).
    pub cut_edges: Vec<Edge>,
}

/// A reusable flow network over a fixed graph with a fixed per-edge cap.
/// Building the arc arrays once amortizes across many terminal-pair queries
/// on the same cluster subgraph.
pub struct FlowNet {
    index: BTreeMap<VertexId, usize>,
    edges: Vec<Edge>,
    /// Arc 2k / 2k+1 are the two directions of edge k.
    to: Vec<usize>,
    cap0: Vec<Mult>,
    head: Vec<Vec<usize>>,
}

impl FlowNet {
    pub fn new(g: &Multigraph, edge_cap: Mult) -> Self {
        let mut index: BTreeMap<VertexId, usize> = BTreeMap::new();
        for v in g.vertices() {
            let i = index.len();
            index.insert(v, i);
        }
        let n = index.len();
        let edges: Vec<Edge> = g.edges().collect();
        let mut to: Vec<usize> = Vec::with_capacity(2 * edges.len());
        let mut cap0: Vec<Mult> = Vec::with_capacity(2 * edges.len());
        let mut head: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &edges {
            let (iu, iv) = (index[&e.u], index[&e.v]);
            let c = e.mult.min(edge_cap);
            let k = to.len();
            to.push(iv);
            cap0.push(c);
            to.push(iu);
            cap0.push(c);
            head[iu].push(k);
            head[iv].push(k + 1);
        }
        FlowNet { index, edges, to, cap0, head }
    }

    /// Max-flow between the contracted super-nodes of `a` and `b`.  With
    /// `stop_above`, augmentation stops once the flow exceeds it and the
    /// result reports `value = stop_above + 1` with empty cut data — enough
    /// to certify "connectivity greater than `stop_above`".
    pub fn min_cut(
        &self,
        a: &BTreeSet<VertexId>,
        b: &BTreeSet<VertexId>,
        stop_above: Option<Mult>,
    ) -> FlowResult {
        debug_assert!(!a.is_empty() && !b.is_empty() && a.is_disjoint(b));
        let n = self.index.len();
        // Contracted endpoints: side id 1 = source, 2 = sink, 0 = free.
        let mut side = vec![0u8; n];
        for v in a {
            side[self.index[v]] = 1;
        }
        for v in b {
            side[self.index[v]] = 2;
        }
        let mut cap = self.cap0.clone();
        // Arcs internal to a super-node carry no flow.
        let mut value = 0;
        // Bidirectional BFS state, stamped by round so clears are O(1).
        let mut seen_f = vec![0u32; n];
        let mut seen_b = vec![0u32; n];
        let mut prev_arc = vec![usize::MAX; n]; // toward the source
        let mut next_arc = vec![usize::MAX; n]; // toward the sink
        let mut round = 0u32;
        // Set when the forward frontier exhausted: seen_f is then exactly the
        // residual-reachable set of the final flow.
        let mut forward_exhausted = false;
        loop {
            if let Some(limit) = stop_above {
                if value > limit {
                    return FlowResult { value: limit + 1, cut_edges: Vec::new() };
                }
            }
            // Bidirectional BFS for an augmenting path: expand the smaller
            // frontier; a residual arc usable forward is cap > 0, usable
            // backward into w is cap of the reverse pair > 0.
            round += 1;
            let mut qf: VecDeque<usize> = VecDeque::new();
            let mut qb: VecDeque<usize> = VecDeque::new();
            for (i, &s) in side.iter().enumerate() {
                if s == 1 {
                    seen_f[i] = round;
                    qf.push_back(i);
                } else if s == 2 {
                    seen_b[i] = round;
                    qb.push_back(i);
                }
            }
            let mut meet = usize::MAX;
            'search: loop {
                if qf.is_empty() {
                    forward_exhausted = true;
                    break;
                }
                let expand_forward = qb.is_empty() || qf.len() <= qb.len();
                if expand_forward {
                    let steps = qf.len();
                    for _ in 0..steps {
                        let v = qf.pop_front().unwrap();
                        for &arc in &self.head[v] {
                            let w = self.to[arc];
                            if cap[arc] > 0 && seen_f[w] != round && side[w] != 1 {
                                seen_f[w] = round;
                                prev_arc[w] = arc;
                                if seen_b[w] == round {
                                    meet = w;
                                    break 'search;
                                }
                                qf.push_back(w);
                            }
                        }
                    }
                } else {
                    let steps = qb.len();
                    for _ in 0..steps {
                        let w = qb.pop_front().unwrap();
                        for &arc in &self.head[w] {
                            // arc is w->y; its pair y->w is the usable one.
                            let y = self.to[arc];
                            if cap[arc ^ 1] > 0 && seen_b[y] != round && side[y] != 2 {
                                seen_b[y] = round;
                                next_arc[y] = arc ^ 1;
                                if seen_f[y] == round {
                                    meet = y;
                                    break 'search;
                                }
                                qb.push_back(y);
                            }
                        }
                    }
                    // A drained sink frontier is no proof of disconnection:
                    // the forward search keeps expanding and may still meet
                    // the frozen backward marks.
                }
            }
            if meet == usize::MAX {
                break;
            }
            // Bottleneck over both halves of the path, then augment.
            let mut bottleneck = Mult::MAX;
            let mut v = meet;
            while side[v] != 1 {
                let arc = prev_arc[v];
                bottleneck = bottleneck.min(cap[arc]);
                v = self.to[arc ^ 1];
            }
            let mut v = meet;
            while side[v] != 2 {
                let arc = next_arc[v];
                bottleneck = bottleneck.min(cap[arc]);
                v = self.to[arc];
            }
            let mut v = meet;
            while side[v] != 1 {
                let arc = prev_arc[v];
                cap[arc] -= bottleneck;
                cap[arc ^ 1] += bottleneck;
                v = self.to[arc ^ 1];
            }
            let mut v = meet;
            while side[v] != 2 {
                let arc = next_arc[v];
                cap[arc] -= bottleneck;
                cap[arc ^ 1] += bottleneck;
                v = self.to[arc];
            }
            value += bottleneck;
        }
        // Residual-reachable set from the source super-node.
        let mut reach = vec![false; n];
        if forward_exhausted {
            for (i, &s) in seen_f.iter().enumerate() {
                reach[i] = s == round;
            }
        } else {
            let mut queue: VecDeque<usize> = VecDeque::new();
            for (i, &s) in side.iter().enumerate() {
                if s == 1 {
                    reach[i] = true;
                    queue.push_back(i);
                }
            }
            while let Some(v) = queue.pop_front() {
                for &arc in &self.head[v] {
                    let w = self.to[arc];
                    if cap[arc] > 0 && !reach[w] {
                        reach[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let cut_edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| reach[self.index[&e.u]] != reach[self.index[&e.v]])
            .cloned()
            .collect();
        FlowResult { value, cut_edges }
    }
}

/// One-shot max-flow between the contracted super-nodes of `a` and `b`, each
/// edge capped at `min(multiplicity, edge_cap)`.
pub fn max_flow_capped(
    g: &Multigraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    edge_cap: Mult,
    stop_above: Option<Mult>,
) -> FlowResult {
    FlowNet::new(g, edge_cap).min_cut(a, b, stop_above)
}
