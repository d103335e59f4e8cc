//! Forest contraction, cut containment sets, terminal c-edge-connectivity
//! sparsifiers, and the one-level terminal edge-connectivity data structure.
//!
//! The containment-set builder is a strategy ladder: trivial terminal sets
//! give an empty set, highly connected terminal sets are certified empty by
//! capped max-flow, small terminal sets get the exact per-bipartition union
//! of minimum cut-sets, and everything else falls back to "all edges"
//! (always valid, no compression).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::expander::{expander_decompose, Partition, Rat};
use crate::flow::{max_flow_capped, FlowNet};
use crate::graph::{
    Edge, EdgeId, EdgeOrigin, Mult, Multigraph, UpdateOp, UpdateSeq, VertexId,
};
use crate::{DynCutError, Result};

/// Exact-bipartition rung cap for `build_containment`.
pub const EXACT_CONTAINMENT_TERMINALS: usize = 12;
/// Exhaustive-bipartition cap for `validate_containment`.
pub const VALIDATE_TERMINALS: usize = 16;

// ---------------------------------------------------------------------------
// Spanning forests and contraction
// ---------------------------------------------------------------------------

/// A spanning forest of some multigraph (unit edges, original EdgeIds).
#[derive(Debug, Clone, Default)]
pub struct SpanningForest {
    pub vertices: BTreeSet<VertexId>,
    pub edges: Vec<Edge>,
    adj: BTreeMap<VertexId, Vec<VertexId>>,
}

impl SpanningForest {
    /// BFS spanning forest of `g` with the pairs in `exclude` removed.
    pub fn build(g: &Multigraph, exclude: &BTreeSet<(VertexId, VertexId)>) -> SpanningForest {
        let excluded = |u: VertexId, v: VertexId| {
            let p = if u < v { (u, v) } else { (v, u) };
            exclude.contains(&p)
        };
        let mut f = SpanningForest {
            vertices: g.vertex_set(),
            edges: Vec::new(),
            adj: g.vertices().map(|v| (v, Vec::new())).collect(),
        };
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for root in g.vertices() {
            if seen.contains(&root) {
                continue;
            }
            seen.insert(root);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for (w, rec) in g.neighbors(v) {
                    if seen.contains(&w) || excluded(v, w) {
                        continue;
                    }
                    seen.insert(w);
                    let (a, b) = if v < w { (v, w) } else { (w, v) };
                    f.edges.push(Edge { u: a, v: b, mult: 1, id: rec.id });
                    f.adj.get_mut(&v).unwrap().push(w);
                    f.adj.get_mut(&w).unwrap().push(v);
                    queue.push_back(w);
                }
            }
        }
        f
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[])
    }

    /// Trees (connected components) of the forest.
    pub fn trees(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for &root in &self.vertices {
            if seen.contains(&root) {
                continue;
            }
            let mut tree = BTreeSet::from([root]);
            seen.insert(root);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if tree.insert(w) {
                        seen.insert(w);
                        queue.push_back(w);
                    }
                }
            }
            out.push(tree);
        }
        out
    }

    /// Whether `f` spans exactly the components of `g` minus `exclude`.
    pub fn spans(&self, g: &Multigraph, exclude: &BTreeSet<(VertexId, VertexId)>) -> bool {
        if self.vertices != g.vertex_set() {
            return false;
        }
        let mut stripped = g.clone();
        for &(u, v) in exclude {
            let _ = stripped.delete_edge(u, v);
        }
        let mut forest_graph = Multigraph::new();
        for &v in &self.vertices {
            forest_graph.insert_vertex(v).unwrap();
        }
        for e in &self.edges {
            if stripped.edge(e.u, e.v).is_none() {
                return false; // forest edge not present in g minus exclude
            }
            if forest_graph.insert_edge(e.u, e.v, 1).is_err() {
                return false;
            }
        }
        let a = stripped.components();
        let b = forest_graph.components();
        a == b && self.edges.len() == self.vertices.len() - a.len()
    }
}

/// Minimal collection of edge-disjoint paths connecting a terminal set in a
/// forest: every terminal is a path endpoint, every non-terminal endpoint
/// meets at least three paths, and the union per tree is the Steiner subtree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConnectingPaths {
    /// Vertex sequences; first and last entries are the endpoint markers.
    pub paths: Vec<Vec<VertexId>>,
}

/// The connecting paths within one tree (helper shared with `contract`).
fn tree_paths(f: &SpanningForest, tree: &BTreeSet<VertexId>, k: &BTreeSet<VertexId>) -> Vec<Vec<VertexId>> {
    let k_t: BTreeSet<VertexId> = tree.intersection(k).copied().collect();
    if k_t.len() < 2 {
        return Vec::new();
    }
    // Steiner subtree: repeatedly delete degree-1 vertices not in K.
    let mut deg: BTreeMap<VertexId, usize> = tree
        .iter()
        .map(|&v| (v, f.neighbors(v).iter().filter(|w| tree.contains(w)).count()))
        .collect();
    let mut alive: BTreeSet<VertexId> = tree.clone();
    let mut queue: Vec<VertexId> =
        tree.iter().copied().filter(|v| deg[v] <= 1 && !k_t.contains(v)).collect();
    while let Some(v) = queue.pop() {
        if !alive.contains(&v) || deg[&v] > 1 || k_t.contains(&v) {
            continue;
        }
        alive.remove(&v);
        for &w in f.neighbors(v) {
            if alive.contains(&w) {
                *deg.get_mut(&w).unwrap() -= 1;
                if deg[&w] <= 1 && !k_t.contains(&w) {
                    queue.push(w);
                }
            }
        }
    }
    let markers: BTreeSet<VertexId> =
        alive.iter().copied().filter(|v| k_t.contains(v) || deg[v] >= 3).collect();
    // Walk maximal marker-to-marker segments, each subtree edge exactly once.
    let mut used: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut paths = Vec::new();
    for &m in &markers {
        let nbs: Vec<VertexId> = f
            .neighbors(m)
            .iter()
            .copied()
            .filter(|w| alive.contains(w))
            .collect();
        for nb in nbs {
            let key = if m < nb { (m, nb) } else { (nb, m) };
            if used.contains(&key) {
                continue;
            }
            let mut path = vec![m];
            let (mut prev, mut cur) = (m, nb);
            loop {
                let k2 = if prev < cur { (prev, cur) } else { (cur, prev) };
                used.insert(k2);
                path.push(cur);
                if markers.contains(&cur) {
                    break;
                }
                let next = f
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .find(|&w| alive.contains(&w) && w != prev)
                    .expect("degree-2 interior vertex of a connecting path");
                prev = cur;
                cur = next;
            }
            paths.push(path);
        }
    }
    paths
}

/// Connecting paths of `k` across every tree of the forest.
pub fn connecting_paths(f: &SpanningForest, k: &BTreeSet<VertexId>) -> ConnectingPaths {
    let mut paths = Vec::new();
    for tree in f.trees() {
        paths.extend(tree_paths(f, &tree, k));
    }
    ConnectingPaths { paths }
}

/// One edge of a contracted forest, remembering its source path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractedEdge {
    pub u: VertexId,
    pub v: VertexId,
    /// Full vertex sequence of the connecting path this edge shortcuts.
    pub path: Vec<VertexId>,
}

/// Contract_K(F): per-tree shortcut of the connecting paths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractedForest {
    pub vertices: BTreeSet<VertexId>,
    pub edges: Vec<ContractedEdge>,
}

/// Contract the forest with respect to `k`: terminals and branch vertices
/// survive, each connecting path becomes one edge.  Trees holding a single
/// terminal keep it as an isolated vertex; terminal-free trees vanish.
pub fn contract(f: &SpanningForest, k: &BTreeSet<VertexId>) -> ContractedForest {
    let mut out = ContractedForest::default();
    for tree in f.trees() {
        let k_t: Vec<VertexId> = tree.intersection(k).copied().collect();
        match k_t.len() {
            0 => {}
            1 => {
                out.vertices.insert(k_t[0]);
            }
            _ => {
                for path in tree_paths(f, &tree, k) {
                    let (u, v) = (*path.first().unwrap(), *path.last().unwrap());
                    out.vertices.insert(u);
                    out.vertices.insert(v);
                    out.edges.push(ContractedEdge { u, v, path });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Cut containment sets
// ---------------------------------------------------------------------------

/// A c-cut containment set: edge pairs plus the refinement partition whose
/// intercluster edges are exactly those pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutContainmentSet {
    pub edges: BTreeSet<(VertexId, VertexId)>,
    pub refinement: Partition,
}

impl CutContainmentSet {
    pub fn empty(g: &Multigraph) -> CutContainmentSet {
        CutContainmentSet { edges: BTreeSet::new(), refinement: Partition::whole(g) }
    }

    /// Endpoints of the containment edges.
    pub fn ends(&self) -> BTreeSet<VertexId> {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    pub fn contains_pair(&self, u: VertexId, v: VertexId) -> bool {
        let p = if u < v { (u, v) } else { (v, u) };
        self.edges.contains(&p)
    }
}

/// Minimum (a, b)-cut value truncated at c+1, with a witness when <= c.
/// A capped cut of value <= c uses no capped edge, so it is exact.
fn min_terminal_cut(
    g: &Multigraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    c: Mult,
) -> (Mult, Vec<Edge>) {
    let r = max_flow_capped(g, a, b, c + 1, Some(c));
    (r.value, r.cut_edges)
}

/// Build a c-cut containment set for the terminals `t` of `g`.
pub fn build_containment(g: &Multigraph, t: &BTreeSet<VertexId>, c: Mult) -> Result<CutContainmentSet> {
    if c < 1 {
        return Err(DynCutError::ParameterViolation(format!(
            "build_containment: c={c} must be >= 1"
        )));
    }
    for &v in t {
        if !g.contains_vertex(v) {
            return Err(DynCutError::UnknownVertex(v.0));
        }
    }
    // Rung 0: no terminal bipartition exists.
    if t.len() <= 1 {
        return Ok(CutContainmentSet::empty(g));
    }
    // Rung 1: every terminal pair has connectivity > c, hence every terminal
    // bipartition has minimum cut > c (pairwise lambda is minimized against a
    // fixed terminal).  No bipartition admits a c-cut, so the empty set works.
    // The flow network is built once and shared by every pair query; a
    // terminal of degree <= c fails without a flow.
    let net = FlowNet::new(g, c + 1);
    let s0 = *t.iter().next().unwrap();
    let s0set = BTreeSet::from([s0]);
    let mut all_high = t.iter().all(|&v| g.degree(v) > c);
    if all_high {
        for &v in t.iter().skip(1) {
            let val = net.min_cut(&s0set, &BTreeSet::from([v]), Some(c)).value;
            if val <= c {
                all_high = false;
                break;
            }
        }
    }
    if all_high {
        return Ok(CutContainmentSet::empty(g));
    }
    // Rung 2: exact — one minimum cut per bipartition with value <= c.
    if t.len() <= EXACT_CONTAINMENT_TERMINALS {
        let others: Vec<VertexId> = t.iter().copied().filter(|&v| v != s0).collect();
        let mut union: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        for mask in 0u64..(1u64 << others.len()) {
            let mut a = BTreeSet::from([s0]);
            let mut b = BTreeSet::new();
            for (i, &v) in others.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    a.insert(v);
                } else {
                    b.insert(v);
                }
            }
            if b.is_empty() {
                continue;
            }
            let r = net.min_cut(&a, &b, Some(c));
            if r.value <= c {
                union.extend(r.cut_edges.iter().map(|e| e.pair()));
            }
        }
        // The refinement's clusters are the components of g minus the union;
        // each chosen cut-set is a component boundary, so the intercluster
        // edges of the refinement are exactly the union.
        let mut stripped = g.clone();
        for &(u, v) in &union {
            stripped.delete_edge(u, v)?;
        }
        let refinement = Partition::from_clusters(stripped.components());
        debug_assert_eq!(
            g.intercluster_edges(&refinement.cluster_of)?
                .iter()
                .map(|e| e.pair())
                .collect::<BTreeSet<_>>(),
            union
        );
        return Ok(CutContainmentSet { edges: union, refinement });
    }
    // Rung 3: fallback — every edge; always valid, no compression.
    let edges: BTreeSet<(VertexId, VertexId)> = g.edges().map(|e| e.pair()).collect();
    let refinement = Partition::singletons(g);
    Ok(CutContainmentSet { edges, refinement })
}

/// Outcome of `validate_containment`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Pass,
    /// The first failing terminal side T'.
    Violation(BTreeSet<VertexId>),
}

/// Check the containment Definition: for every terminal bipartition whose
/// minimum cut is <= c, the minimum cut value is unchanged when every non-CC
/// edge is raised to multiplicity c+1 (forcing cuts inside CC).
pub fn validate_containment(
    g: &Multigraph,
    t: &BTreeSet<VertexId>,
    c: Mult,
    cc: &BTreeSet<(VertexId, VertexId)>,
    sample: Option<&[BTreeSet<VertexId>]>,
) -> Result<Validation> {
    if t.len() <= 1 {
        return Ok(Validation::Pass);
    }
    let mut raised = Multigraph::new();
    for v in g.vertices() {
        raised.insert_vertex(v)?;
    }
    for e in g.edges() {
        let m = if cc.contains(&e.pair()) { e.mult } else { e.mult.max(c + 1) };
        raised.insert_edge(e.u, e.v, m)?;
    }
    let check = |a: &BTreeSet<VertexId>| -> Result<bool> {
        let b: BTreeSet<VertexId> = t.difference(a).copied().collect();
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        let (orig, _) = min_terminal_cut(g, a, &b, c);
        if orig > c {
            return Ok(true);
        }
        let (contained, _) = min_terminal_cut(&raised, a, &b, c);
        Ok(contained == orig)
    };
    match sample {
        Some(list) => {
            for a in list {
                if !check(a)? {
                    return Ok(Validation::Violation(a.clone()));
                }
            }
        }
        None => {
            if t.len() > VALIDATE_TERMINALS {
                return Err(DynCutError::TooManyTerminals(t.len()));
            }
            let s0 = *t.iter().next().unwrap();
            let others: Vec<VertexId> = t.iter().copied().filter(|&v| v != s0).collect();
            for mask in 0u64..(1u64 << others.len()) {
                let mut a = BTreeSet::from([s0]);
                for (i, &v) in others.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        a.insert(v);
                    }
                }
                if !check(&a)? {
                    return Ok(Validation::Violation(a));
                }
            }
        }
    }
    Ok(Validation::Pass)
}

// ---------------------------------------------------------------------------
// Terminal sparsifiers
// ---------------------------------------------------------------------------

/// Where a sparsifier edge came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeSource {
    /// A containment-set edge of some cluster (original pair).
    Containment(VertexId, VertexId),
    /// A gamma edge shortcutting a forest path (full vertex sequence).
    ForestPath(Vec<VertexId>),
    /// An intercluster edge kept verbatim.
    Intercluster(VertexId, VertexId),
}

/// A terminal c-edge-connectivity sparsifier with provenance maps.
#[derive(Debug, Clone, Default)]
pub struct TerminalSparsifier {
    pub h: Multigraph,
    /// H-vertex to source-graph vertex (contraction preserves identity).
    pub vertex_of: BTreeMap<VertexId, VertexId>,
    /// H-edge numeric id to its source.
    pub edge_source: BTreeMap<u64, EdgeSource>,
}

impl TerminalSparsifier {
    /// Debug dump: "v id origin_gvertex" lines then "e id u v mult origin".
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in self.h.vertices() {
            let gv = self.vertex_of.get(&v).copied().unwrap_or(v);
            s.push_str(&format!("v {v} {gv}\n"));
        }
        for e in self.h.edges() {
            s.push_str(&format!(
                "e {} {} {} {} {}\n",
                e.id.id,
                e.u,
                e.v,
                e.mult,
                e.id.origin.as_str()
            ));
        }
        s
    }
}

/// Sparsifier of one cluster: CC edges (identity-preserving ids, origin
/// containment-chain) plus one gamma edge per contracted forest path.
///
/// When a contracted path collides with a CC edge on the same pair, the two
/// merge into one triple of multiplicity cc + gamma: a c-cut can afford
/// neither a gamma edge nor the merged edge, and the CC edge alone already
/// keeps the pair connected, so c-cut structure is unchanged.
pub fn build_sparsifier_cluster(
    g: &Multigraph,
    t: &BTreeSet<VertexId>,
    cc: &CutContainmentSet,
    f: &SpanningForest,
    c: Mult,
    gamma: Mult,
) -> Result<TerminalSparsifier> {
    if gamma <= c {
        return Err(DynCutError::ParameterViolation(format!(
            "sparsifier: gamma={gamma} must exceed c={c}"
        )));
    }
    let mut k: BTreeSet<VertexId> = t.clone();
    k.extend(cc.ends());
    let cf = contract(f, &k);
    let mut sp = TerminalSparsifier::default();
    for &v in cf.vertices.iter().chain(cc.ends().iter()) {
        if !sp.h.contains_vertex(v) {
            sp.h.insert_vertex(v)?;
            sp.vertex_of.insert(v, v);
        }
    }
    for &(u, v) in &cc.edges {
        let rec = g.edge(u, v).ok_or_else(|| {
            DynCutError::PreconditionViolated(format!("containment edge ({u},{v}) not in graph"))
        })?;
        let id = EdgeId { id: rec.id.id, origin: EdgeOrigin::ContainmentChain };
        sp.h.insert_edge_with_id(u, v, rec.mult, id)?;
        sp.edge_source.insert(id.id, EdgeSource::Containment(u, v));
    }
    for ce in &cf.edges {
        if let Some(existing) = sp.h.edge(ce.u, ce.v) {
            // CC/forest pair collision: fold gamma into the CC triple.
            let rec = sp.h.delete_edge(ce.u, ce.v)?;
            sp.h.insert_edge_with_id(ce.u, ce.v, rec.mult + gamma, existing.id)?;
            continue;
        }
        let id = EdgeId::fresh(EdgeOrigin::ForestGamma);
        sp.h.insert_edge_with_id(ce.u, ce.v, gamma, id)?;
        sp.edge_source.insert(id.id, EdgeSource::ForestPath(ce.path.clone()));
    }
    Ok(sp)
}

/// Sparsifier of a partitioned graph: every cluster's interior replaced by
/// its cluster sparsifier, intercluster edges kept verbatim with their ids.
pub fn build_sparsifier_partition(
    g: &Multigraph,
    p: &Partition,
    per_cluster: &[(BTreeSet<VertexId>, CutContainmentSet, SpanningForest)],
    c: Mult,
    gamma: Mult,
) -> Result<TerminalSparsifier> {
    if per_cluster.len() != p.clusters.len() {
        return Err(DynCutError::PreconditionViolated(
            "per-cluster data does not match the partition".into(),
        ));
    }
    let mut parts = Vec::new();
    for (i, cluster) in p.clusters.iter().enumerate() {
        let (t, cc, f) = &per_cluster[i];
        let sub = g.induced(cluster)?;
        parts.push(build_sparsifier_cluster(&sub, t, cc, f, c, gamma)?);
    }
    let refs: Vec<&TerminalSparsifier> = parts.iter().collect();
    assemble_sparsifier(g, p, &refs)
}

/// Union the cluster sparsifiers and add the intercluster edges verbatim.
pub fn assemble_sparsifier(
    g: &Multigraph,
    p: &Partition,
    parts: &[&TerminalSparsifier],
) -> Result<TerminalSparsifier> {
    let mut sp = TerminalSparsifier::default();
    for &part in parts {
        for v in part.h.vertices() {
            sp.h.insert_vertex(v)?;
            sp.vertex_of.insert(v, part.vertex_of[&v]);
        }
        for e in part.h.edges() {
            sp.h.insert_edge_with_id(e.u, e.v, e.mult, e.id)?;
        }
        for (id, src) in &part.edge_source {
            sp.edge_source.insert(*id, src.clone());
        }
    }
    for e in g.intercluster_edges(&p.cluster_of)? {
        for v in [e.u, e.v] {
            if !sp.h.contains_vertex(v) {
                sp.h.insert_vertex(v)?;
                sp.vertex_of.insert(v, v);
            }
        }
        sp.h.insert_edge_with_id(e.u, e.v, e.mult, e.id)?;
        sp.edge_source.insert(e.id.id, EdgeSource::Intercluster(e.u, e.v));
    }
    Ok(sp)
}

// ---------------------------------------------------------------------------
// One-level terminal edge-connectivity data structure
// ---------------------------------------------------------------------------

/// Per-cluster state inside a `OneLevelECDS`.
#[derive(Debug, Clone)]
pub struct ClusterState {
    pub vertices: BTreeSet<VertexId>,
    /// Terminals: endpoints of intercluster edges inside this cluster.
    pub terminals: BTreeSet<VertexId>,
    pub cc: CutContainmentSet,
    pub forest: SpanningForest,
    pub sparsifier: TerminalSparsifier,
}

/// One-level terminal edge-connectivity data structure.
#[derive(Debug, Clone)]
pub struct OneLevelECDS {
    pub g: Multigraph,
    pub partition: Partition,
    /// Parallel to `partition.clusters`.
    pub clusters: Vec<Arc<ClusterState>>,
    /// Assembled Sparsifier_{grade,gamma}(G, P, CC, F).
    pub sparsifier: TerminalSparsifier,
    /// Containment-set grade c'.
    pub grade: Mult,
    pub phi: Rat,
    pub gamma: Mult,
    /// Exhaustive-conductance threshold used for decompositions.
    pub threshold: usize,
}

impl OneLevelECDS {
    /// All terminals: End(∂_G(P)).
    pub fn terminals(&self) -> BTreeSet<VertexId> {
        self.clusters.iter().flat_map(|c| c.terminals.iter().copied()).collect()
    }

    /// Terminals of the cluster containing `v` (O(log n) lookup).
    pub fn terminals_of_cluster(&self, v: VertexId) -> Option<&BTreeSet<VertexId>> {
        self.partition.cluster_of.get(&v).map(|&i| &self.clusters[i].terminals)
    }
}

/// Per-cluster terminal sets of a partition: endpoints of intercluster edges.
pub fn cluster_terminals(g: &Multigraph, p: &Partition) -> Result<Vec<BTreeSet<VertexId>>> {
    let mut t: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); p.clusters.len()];
    for e in g.intercluster_edges(&p.cluster_of)? {
        t[p.cluster_of[&e.u]].insert(e.u);
        t[p.cluster_of[&e.v]].insert(e.v);
    }
    Ok(t)
}

pub fn build_cluster_state(
    g: &Multigraph,
    vertices: &BTreeSet<VertexId>,
    terminals: BTreeSet<VertexId>,
    grade: Mult,
    gamma: Mult,
) -> Result<ClusterState> {
    let t0 = std::time::Instant::now();
    let sub = g.induced(vertices)?;
    crate::hierarchy::prof::record("bcs.induced", t0);
    let t0 = std::time::Instant::now();
    let cc = build_containment(&sub, &terminals, grade)?;
    crate::hierarchy::prof::record("bcs.containment", t0);
    let t0 = std::time::Instant::now();
    let forest = SpanningForest::build(&sub, &cc.edges);
    crate::hierarchy::prof::record("bcs.forest", t0);
    let t0 = std::time::Instant::now();
    let sparsifier = build_sparsifier_cluster(&sub, &terminals, &cc, &forest, grade, gamma)?;
    crate::hierarchy::prof::record("bcs.sparsifier", t0);
    Ok(ClusterState { vertices: vertices.clone(), terminals, cc, forest, sparsifier })
}

/// Initialize a one-level terminal edge-connectivity data structure.
pub fn ec_init(
    g: &Multigraph,
    grade: Mult,
    phi: Rat,
    gamma: Mult,
    eps: Rat,
    threshold: usize,
) -> Result<OneLevelECDS> {
    if gamma <= grade {
        return Err(DynCutError::ParameterViolation(format!(
            "ec_init: gamma={gamma} must exceed grade={grade}"
        )));
    }
    let partition = if g.n() == 0 {
        Partition { clusters: Vec::new(), cluster_of: BTreeMap::new() }
    } else {
        expander_decompose(g, phi, eps, threshold)?.0
    };
    ec_init_with_partition(g, partition, grade, phi, gamma, threshold)
}

/// Initialization against a caller-chosen partition (hierarchy re-init path).
pub fn ec_init_with_partition(
    g: &Multigraph,
    partition: Partition,
    grade: Mult,
    phi: Rat,
    gamma: Mult,
    threshold: usize,
) -> Result<OneLevelECDS> {
    let terminals = cluster_terminals(g, &partition)?;
    let mut clusters = Vec::new();
    for (i, c) in partition.clusters.iter().enumerate() {
        clusters.push(Arc::new(build_cluster_state(g, c, terminals[i].clone(), grade, gamma)?));
    }
    let parts: Vec<&TerminalSparsifier> = clusters.iter().map(|c| &c.sparsifier).collect();
    let sparsifier = assemble_sparsifier(g, &partition, &parts)?;
    Ok(OneLevelECDS { g: g.clone(), partition, clusters, sparsifier, grade, phi, gamma, threshold })
}

/// Canonical diff turning multigraph `old` into `new`: delete changed or
/// vanished triples, delete vanished vertices, insert new vertices, insert
/// new or changed triples.
pub fn sparsifier_diff(old: &Multigraph, new: &Multigraph) -> UpdateSeq {
    let mut seq = UpdateSeq::new();
    let mut inserts = Vec::new();
    for e in old.edges() {
        match new.edge(e.u, e.v) {
            Some(rec) if rec.mult == e.mult => {}
            Some(rec) => {
                seq.push(UpdateOp::DeleteEdge(e.u, e.v));
                inserts.push(UpdateOp::InsertEdge(e.u, e.v, rec.mult));
            }
            None => seq.push(UpdateOp::DeleteEdge(e.u, e.v)),
        }
    }
    for v in old.vertices() {
        if !new.contains_vertex(v) {
            seq.push(UpdateOp::DeleteVertex(v));
        }
    }
    for v in new.vertices() {
        if !old.contains_vertex(v) {
            seq.push(UpdateOp::InsertVertex(v));
        }
    }
    for e in new.edges() {
        if old.edge(e.u, e.v).is_none() {
            inserts.push(UpdateOp::InsertEdge(e.u, e.v, e.mult));
        }
    }
    seq.extend(inserts);
    seq
}

/// Result of a one-level update rebuild.
#[derive(Debug, Clone)]
pub struct EcUpdateOutcome {
    pub ds: OneLevelECDS,
    /// Canonical diff turning the old sparsifier into the new one.
    pub diff: UpdateSeq,
    /// Terminal symmetric difference S between the two states.
    pub s_term: BTreeSet<VertexId>,
    /// Per new cluster: Some(old index) when it is a subset of that old
    /// cluster (lineage), None for a freshly created cluster.
    pub lineage: Vec<Option<usize>>,
}

/// The default post-update partition: old remainders (minus every op
/// endpoint) plus one singleton per surviving endpoint, with lineage.
pub fn remainder_sets(
    ds: &OneLevelECDS,
    g2: &Multigraph,
    touched: &BTreeSet<VertexId>,
) -> Vec<(BTreeSet<VertexId>, Option<usize>)> {
    let mut new_sets: Vec<(BTreeSet<VertexId>, Option<usize>)> = Vec::new();
    for (i, cset) in ds.partition.clusters.iter().enumerate() {
        let rem: BTreeSet<VertexId> = cset.difference(touched).copied().collect();
        if !rem.is_empty() {
            new_sets.push((rem, Some(i)));
        }
    }
    for &v in touched {
        if g2.contains_vertex(v) {
            new_sets.push((BTreeSet::from([v]), None));
        }
    }
    new_sets
}

/// Core update rebuild against a caller-chosen partition of the new graph.
///
/// `new_sets` pairs each new cluster with its lineage (Some(old index) when
/// the cluster is a subset of that old cluster).  Cluster state is reused
/// verbatim when both the vertex set and the terminal set are unchanged —
/// sound because a containment set of the old, higher grade stays valid at
/// grade c — and rebuilt at grade c otherwise.
///
/// Consumes a structure of grade c²+2c and emits one of grade c.
pub fn ec_rebuild(
    ds: &OneLevelECDS,
    g2: &Multigraph,
    mut new_sets: Vec<(BTreeSet<VertexId>, Option<usize>)>,
    c: Mult,
) -> Result<EcUpdateOutcome> {
    if ds.grade != c * c + 2 * c {
        return Err(DynCutError::ParameterViolation(format!(
            "ec_rebuild: structure grade {} is not c^2+2c for c={c}",
            ds.grade
        )));
    }
    if ds.gamma <= c {
        return Err(DynCutError::ParameterViolation(format!(
            "ec_rebuild: gamma={} must exceed c={c}",
            ds.gamma
        )));
    }
    new_sets.sort_by_key(|(s, _)| *s.iter().next().unwrap());
    let t0 = std::time::Instant::now();
    let partition = Partition::from_clusters(new_sets.iter().map(|(s, _)| s.clone()).collect());
    let terminals = cluster_terminals(g2, &partition)?;
    crate::hierarchy::prof::record("ecr.partition", t0);
    let mut clusters = Vec::new();
    for (i, (set, old_idx)) in new_sets.iter().enumerate() {
        let reusable = old_idx
            .map(|j| ds.clusters[j].vertices == *set && ds.clusters[j].terminals == terminals[i])
            .unwrap_or(false);
        if reusable {
            clusters.push(Arc::clone(&ds.clusters[old_idx.unwrap()]));
        } else {
            let t0 = std::time::Instant::now();
            clusters.push(Arc::new(build_cluster_state(g2, set, terminals[i].clone(), c, ds.gamma)?));
            crate::hierarchy::prof::record(
                if set.len() > 120 { "ecr.build_big" } else { "ecr.build_small" },
                t0,
            );
        }
    }
    let t0 = std::time::Instant::now();
    let parts: Vec<&TerminalSparsifier> = clusters.iter().map(|c| &c.sparsifier).collect();
    let sparsifier = assemble_sparsifier(g2, &partition, &parts)?;
    crate::hierarchy::prof::record("ecr.assemble", t0);
    let t0 = std::time::Instant::now();
    let diff = sparsifier_diff(&ds.sparsifier.h, &sparsifier.h);
    crate::hierarchy::prof::record("ecr.diff", t0);
    let old_t = ds.terminals();
    let new_t: BTreeSet<VertexId> = terminals.iter().flatten().copied().collect();
    let s_term: BTreeSet<VertexId> = old_t.symmetric_difference(&new_t).copied().collect();
    let lineage: Vec<Option<usize>> = new_sets.iter().map(|(_, o)| *o).collect();
    let ds2 = OneLevelECDS {
        g: g2.clone(),
        partition,
        clusters,
        sparsifier,
        grade: c,
        phi: ds.phi,
        gamma: ds.gamma,
        threshold: ds.threshold,
    };
    Ok(EcUpdateOutcome { ds: ds2, diff, s_term, lineage })
}

/// Apply an update batch: every op endpoint becomes a singleton cluster, the
/// surviving remainders keep their induced subgraphs, containment sets are
/// recomputed only where terminals or membership changed (a higher-grade set
/// stays valid at lower grade), and the sparsifier is rebuilt per changed
/// cluster.
///
/// Consumes a structure of grade c²+2c and emits one of grade c.  Returns the
/// new state, the sparsifier diff, and the terminal symmetric difference S.
pub fn ec_update(
    ds: &OneLevelECDS,
    seq: &UpdateSeq,
    c: Mult,
) -> Result<(OneLevelECDS, UpdateSeq, BTreeSet<VertexId>)> {
    let mut g2 = ds.g.clone();
    g2.apply_seq(seq)?;
    let touched: BTreeSet<VertexId> = seq.iter().flat_map(|op| op.involved()).collect();
    let new_sets = remainder_sets(ds, &g2, &touched);
    let out = ec_rebuild(ds, &g2, new_sets, c)?;
    Ok((out.ds, out.diff, out.s_term))
}
