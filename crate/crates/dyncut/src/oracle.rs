//! Independent brute-force oracles.
//!
//! Everything in this module recomputes answers from first principles with its
//! own adjacency representation and its own flow code.  It deliberately shares
//! no algorithmic code with the engine layers, so agreement between the two is
//! evidence rather than tautology.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use serde::Serialize;

use crate::config::Config;
use crate::graph::{Mult, Multigraph, StreamItem, VertexId};
use crate::hierarchy::{fd_current, fd_init, fd_update, query_min_cut};
use crate::{DynCutError, Result};

/// How an oracle answer was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    Exhaustive,
    StoerWagner,
    MaxFlow,
}

/// A ground-truth minimum cut: size, witness cut-set, method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// `None` means no cut exists (fewer than two vertices).
    pub min_cut_size: Option<Mult>,
    /// Witness cut-set as (u, v, multiplicity) triples.
    pub witness: Vec<(VertexId, VertexId, Mult)>,
    /// One side of a witness bipartition.
    pub side: BTreeSet<VertexId>,
    pub method: OracleMethod,
}

/// Private dense-ish adjacency used by the oracles only.
struct OGraph {
    ids: Vec<VertexId>,
    adj: Vec<Vec<(usize, Mult)>>,
}

impl OGraph {
    fn from_multigraph(g: &Multigraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for e in g.edges() {
            let (iu, iv) = (index[&e.u], index[&e.v]);
            adj[iu].push((iv, e.mult));
            adj[iv].push((iu, e.mult));
        }
        OGraph { ids, adj }
    }

    fn n(&self) -> usize {
        self.ids.len()
    }

    /// Component label per vertex by breadth-first search.
    fn component_labels(&self) -> Vec<usize> {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([s]);
            label[s] = next;
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &self.adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Ground-truth global minimum cut.
///
/// Exhaustive over bipartitions for n <= 20 (Gray-code incremental weights),
/// Stoer–Wagner with multiplicities as weights otherwise.  Disconnected graphs
/// yield a 0-cut with an empty witness; graphs with fewer than two vertices
/// have no cut at all.
pub fn brute_min_cut(g: &Multigraph) -> OracleResult {
    let og = OGraph::from_multigraph(g);
    let n = og.n();
    if n < 2 {
        return OracleResult {
            min_cut_size: None,
            witness: Vec::new(),
            side: BTreeSet::new(),
            method: OracleMethod::Exhaustive,
        };
    }
    let labels = og.component_labels();
    if labels.iter().any(|&l| l != 0) {
        let side: BTreeSet<VertexId> = (0..n).filter(|&i| labels[i] == 0).map(|i| og.ids[i]).collect();
        return OracleResult {
            min_cut_size: Some(0),
            witness: Vec::new(),
            side,
            method: OracleMethod::Exhaustive,
        };
    }
    if n <= 20 {
        exhaustive_min_cut(&og)
    } else {
        stoer_wagner(&og)
    }
}

fn cut_edges_of_side(og: &OGraph, in_side: &[bool]) -> Vec<(VertexId, VertexId, Mult)> {
    let mut out = Vec::new();
    for u in 0..og.n() {
        if !in_side[u] {
            continue;
        }
        for &(w, mult) in &og.adj[u] {
            if !in_side[w] {
                out.push((og.ids[u], og.ids[w], mult));
            }
        }
    }
    out
}

fn exhaustive_min_cut(og: &OGraph) -> OracleResult {
    let n = og.n();
    debug_assert!((2..=20).contains(&n));
    // Dense symmetric weights for O(n) flip updates.
    let mut w = vec![vec![0i64; n]; n];
    for u in 0..n {
        for &(v, mult) in &og.adj[u] {
            w[u][v] = mult;
        }
    }
    // Vertex n-1 stays on side 0; Gray-code walk over the other n-1 vertices.
    let bits = n - 1;
    let mut side = vec![false; n];
    let mut cur: i64 = 0;
    let mut best = i64::MAX;
    let mut best_mask: u64 = 0;
    let mut mask: u64 = 0;
    for k in 1u64..(1u64 << bits) {
        let flip = (k.trailing_zeros()) as usize;
        // Moving `flip` to the opposite side.
        let joining = !side[flip];
        let mut delta = 0i64;
        for j in 0..n {
            if j == flip {
                continue;
            }
            if side[j] == joining {
                delta -= w[flip][j];
            } else {
                delta += w[flip][j];
            }
        }
        side[flip] = joining;
        mask ^= 1u64 << flip;
        cur += delta;
        if cur < best {
            best = cur;
            best_mask = mask;
        }
    }
    let in_side: Vec<bool> = (0..n).map(|i| i < bits && (best_mask >> i) & 1 == 1).collect();
    let witness = cut_edges_of_side(og, &in_side);
    let side_set: BTreeSet<VertexId> =
        (0..n).filter(|&i| in_side[i]).map(|i| og.ids[i]).collect();
    OracleResult {
        min_cut_size: Some(best),
        witness,
        side: side_set,
        method: OracleMethod::Exhaustive,
    }
}

fn stoer_wagner(og: &OGraph) -> OracleResult {
    let n = og.n();
    // Supernode adjacency and merged-vertex tracking.
    let mut adj: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); n];
    for u in 0..n {
        for &(v, mult) in &og.adj[u] {
            *adj[u].entry(v).or_insert(0) += mult;
        }
    }
    let mut merged: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = i64::MAX;
    let mut best_side: Vec<usize> = Vec::new();

    while alive.len() > 1 {
        // Maximum-adjacency order starting from the smallest alive id.
        let start = alive[0];
        let mut in_a: BTreeSet<usize> = BTreeSet::new();
        let mut weight: BTreeMap<usize, i64> = BTreeMap::new();
        let mut heap: BinaryHeap<(i64, usize)> = BinaryHeap::new();
        in_a.insert(start);
        let mut last = start;
        let mut second_last = start;
        let mut last_w = 0i64;
        for (&v, &wt) in &adj[start] {
            weight.insert(v, wt);
            heap.push((wt, v));
        }
        for _ in 1..alive.len() {
            let v = loop {
                match heap.pop() {
                    Some((wt, v)) => {
                        if in_a.contains(&v) || weight.get(&v) != Some(&wt) {
                            continue;
                        }
                        last_w = wt;
                        break v;
                    }
                    None => {
                        // Disconnected supernode graph: pick any alive vertex
                        // outside A with weight 0.
                        let v = *alive.iter().find(|x| !in_a.contains(x)).unwrap();
                        last_w = 0;
                        break v;
                    }
                }
            };
            second_last = last;
            last = v;
            in_a.insert(v);
            for (&u, &wt) in &adj[v] {
                if !in_a.contains(&u) {
                    let e = weight.entry(u).or_insert(0);
                    *e += wt;
                    heap.push((*e, u));
                }
            }
        }
        // Cut-of-the-phase: `last` alone vs the rest.
        if last_w < best {
            best = last_w;
            best_side = merged[last].clone();
        }
        // Merge `last` into `second_last`.
        let last_adj: Vec<(usize, i64)> = adj[last].iter().map(|(&u, &w)| (u, w)).collect();
        for (u, w) in last_adj {
            adj[u].remove(&last);
            if u != second_last {
                *adj[second_last].entry(u).or_insert(0) += w;
                *adj[u].entry(second_last).or_insert(0) += w;
            }
        }
        adj[last].clear();
        let moved = std::mem::take(&mut merged[last]);
        merged[second_last].extend(moved);
        alive.retain(|&x| x != last);
    }

    let mut in_side = vec![false; n];
    for &i in &best_side {
        in_side[i] = true;
    }
    let witness = cut_edges_of_side(og, &in_side);
    let side: BTreeSet<VertexId> = best_side.iter().map(|&i| og.ids[i]).collect();
    OracleResult { min_cut_size: Some(best), witness, side, method: OracleMethod::StoerWagner }
}

/// Max-flow between contracted super-nodes with per-edge capacity
/// `min(multiplicity, cap)` — Dinic on an independent arc list.
pub fn steiner_min_cut(
    g: &Multigraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    cap: Mult,
) -> Mult {
    assert!(!a.is_empty() && !b.is_empty(), "steiner_min_cut: sides must be nonempty");
    assert!(a.is_disjoint(b), "steiner_min_cut: sides must be disjoint");
    // Node numbering: 0 = source (A), 1 = sink (B), others 2..
    let mut index: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &v in a {
        index.insert(v, 0);
    }
    for &v in b {
        index.insert(v, 1);
    }
    let mut next = 2usize;
    for v in g.vertices() {
        index.entry(v).or_insert_with(|| {
            let i = next;
            next += 1;
            i
        });
    }
    let n = next;
    let mut dinic = Dinic::new(n);
    for e in g.edges() {
        let (iu, iv) = (index[&e.u], index[&e.v]);
        if iu == iv {
            continue;
        }
        dinic.add_undirected(iu, iv, e.mult.min(cap));
    }
    dinic.max_flow(0, 1)
}

/// All vertex sets qualifying as (3*alpha, c)-local cut sides in a cluster of
/// the auxiliary graph: connected U that is a proper subset of `pstar`, has
/// volume (within `G_*[P_*]`) at most 3*alpha, boundary at most `c`, no
/// boundary edge incident to a special terminal, and `U` containing at least
/// one real (non-special) vertex.
///
/// `gstar_pstar` must already be the cluster-induced auxiliary subgraph.
/// Errors with `TooLarge` above the subset-enumeration cap (volume 40).
pub fn brute_local_cuts(
    gstar_pstar: &Multigraph,
    specials: &BTreeSet<VertexId>,
    alpha: Mult,
    c: Mult,
) -> Result<BTreeSet<BTreeSet<VertexId>>> {
    let total_vol = 2 * gstar_pstar.m();
    if total_vol > 40 {
        return Err(DynCutError::TooLarge(format!(
            "brute_local_cuts: cluster volume {total_vol} exceeds 40"
        )));
    }
    let og = OGraph::from_multigraph(gstar_pstar);
    let n = og.n();
    let special_idx: Vec<bool> = og.ids.iter().map(|v| specials.contains(v)).collect();
    let vols: Vec<Mult> = (0..n).map(|i| og.adj[i].iter().map(|&(_, m)| m).sum()).collect();
    let mut out = BTreeSet::new();
    if n == 0 {
        return Ok(out);
    }
    // Enumerate every connected subset once: for each root r (smallest index
    // in the subset), grow over vertices with larger index only.
    for root in 0..n {
        let mut current = vec![root];
        let mut in_set = vec![false; n];
        in_set[root] = true;
        grow_excluding(&og, root, &mut current, &mut in_set, &[], &mut |set: &[usize]| {
            record_if_local_cut(&og, &special_idx, &vols, set, alpha, c, &mut out);
        });
    }
    Ok(out)
}

/// Recursive connected-subset enumeration with an exclusion set (each
/// connected subset whose minimum index is `root` is visited exactly once).
fn grow_excluding(
    og: &OGraph,
    root: usize,
    current: &mut Vec<usize>,
    in_set: &mut Vec<bool>,
    excluded: &[usize],
    visit: &mut impl FnMut(&[usize]),
) {
    visit(current);
    let mut frontier: Vec<usize> = Vec::new();
    for &v in current.iter() {
        for &(w, _) in &og.adj[v] {
            if w > root && !in_set[w] && !excluded.contains(&w) && !frontier.contains(&w) {
                frontier.push(w);
            }
        }
    }
    frontier.sort_unstable();
    for i in 0..frontier.len() {
        let w = frontier[i];
        in_set[w] = true;
        current.push(w);
        let mut ex: Vec<usize> = excluded.to_vec();
        ex.extend_from_slice(&frontier[..i]);
        grow_excluding(og, root, current, in_set, &ex, visit);
        current.pop();
        in_set[w] = false;
    }
}

fn record_if_local_cut(
    og: &OGraph,
    special_idx: &[bool],
    vols: &[Mult],
    set: &[usize],
    alpha: Mult,
    c: Mult,
    out: &mut BTreeSet<BTreeSet<VertexId>>,
) {
    let n = og.n();
    if set.len() == n {
        return; // cut must be proper
    }
    if !set.iter().any(|&v| !special_idx[v]) {
        return; // must contain a real vertex
    }
    let vol: Mult = set.iter().map(|&v| vols[v]).sum();
    if vol > 3 * alpha {
        return;
    }
    let mut in_set = vec![false; n];
    for &v in set {
        in_set[v] = true;
    }
    let mut boundary = 0;
    for &v in set {
        for &(w, mult) in &og.adj[v] {
            if !in_set[w] {
                if special_idx[v] || special_idx[w] {
                    return; // terminals must be one-sided
                }
                boundary += mult;
            }
        }
    }
    if boundary > c {
        return;
    }
    out.insert(set.iter().map(|&v| og.ids[v]).collect());
}

/// Independent Dinic max-flow used only by the oracles.
struct Dinic {
    to: Vec<usize>,
    cap: Vec<i64>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { to: Vec::new(), cap: Vec::new(), head: vec![Vec::new(); n], level: vec![0; n], iter: vec![0; n] }
    }

    fn add_undirected(&mut self, u: usize, v: usize, c: i64) {
        // Undirected edge: both residual arcs start at capacity c.
        let a = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.to.push(u);
        self.cap.push(c);
        self.head[u].push(a);
        self.head[v].push(a + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::from([s]);
        self.level[s] = 0;
        while let Some(v) = queue.pop_front() {
            for &a in &self.head[v] {
                let w = self.to[a];
                if self.cap[a] > 0 && self.level[w] < 0 {
                    self.level[w] = self.level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, f: i64) -> i64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.head[v].len() {
            let a = self.head[v][self.iter[v]];
            let w = self.to[a];
            if self.cap[a] > 0 && self.level[w] == self.level[v] + 1 {
                let d = self.dfs(w, t, f.min(self.cap[a]));
                if d > 0 {
                    self.cap[a] -= d;
                    self.cap[a ^ 1] += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}

/// One replayed check in a verification report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub op_index: usize,
    pub expected: Option<Mult>,
    pub got: Option<Mult>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Replay report: one record per check, mismatches are data not errors.
#[derive(Debug, Clone, Default)]
pub struct StreamReport {
    pub records: Vec<CheckRecord>,
}

impl StreamReport {
    pub fn mismatches(&self) -> usize {
        self.records.iter().filter(|r| !r.ok).count()
    }

    pub fn to_json_lines(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
    }
}

/// Value-only global minimum cut by Stoer–Wagner with heap-based
/// maximum-adjacency phases and small-to-large contraction, usable as a
/// from-scratch benchmark baseline on sparse graphs where the dense oracle
/// is infeasible.  Returns None for graphs with fewer than two vertices.
pub fn baseline_min_cut(g: &Multigraph) -> Option<Mult> {
    let n = g.n();
    if n < 2 {
        return None;
    }
    let og = OGraph::from_multigraph(g);
    if og.component_labels().iter().any(|&l| l != 0) {
        return Some(0);
    }
    // Adjacency as weight maps over alive super-vertices.
    let mut adj: Vec<BTreeMap<usize, Mult>> = vec![BTreeMap::new(); n];
    for v in 0..n {
        for &(w, m) in &og.adj[v] {
            *adj[v].entry(w).or_insert(0) += m;
        }
    }
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut best: Option<Mult> = None;
    while alive.len() > 1 {
        let start = *alive.iter().next().unwrap();
        let mut weight: BTreeMap<usize, Mult> = BTreeMap::new();
        let mut heap: BinaryHeap<(Mult, usize)> = BinaryHeap::new();
        let mut in_a: BTreeSet<usize> = BTreeSet::from([start]);
        let mut order = vec![start];
        for (&w, &m) in &adj[start] {
            weight.insert(w, m);
            heap.push((m, w));
        }
        while order.len() < alive.len() {
            let Some((wt, x)) = heap.pop() else { break };
            if in_a.contains(&x) || weight.get(&x) != Some(&wt) {
                continue;
            }
            in_a.insert(x);
            order.push(x);
            for (&y, &m) in &adj[x] {
                if !in_a.contains(&y) {
                    let e = weight.entry(y).or_insert(0);
                    *e += m;
                    heap.push((*e, y));
                }
            }
        }
        let t = *order.last().unwrap();
        let s = order[order.len() - 2];
        let cut_of_phase = *weight.get(&t).unwrap_or(&0);
        if best.is_none_or(|b| cut_of_phase < b) {
            best = Some(cut_of_phase);
        }
        // Merge t into s (small-to-large on the weight maps).
        let (mut keep, mut merge, keep_id, merge_id) = if adj[s].len() >= adj[t].len() {
            (std::mem::take(&mut adj[s]), std::mem::take(&mut adj[t]), s, t)
        } else {
            (std::mem::take(&mut adj[t]), std::mem::take(&mut adj[s]), t, s)
        };
        keep.remove(&merge_id);
        merge.remove(&keep_id);
        for (y, m) in merge {
            *keep.entry(y).or_insert(0) += m;
            let ym = adj[y].remove(&merge_id).unwrap_or(0);
            debug_assert!(ym > 0);
            *adj[y].entry(keep_id).or_insert(0) += ym;
        }
        // The survivor keeps index s regardless of which map was larger.
        if keep_id != s {
            for (&y, _) in &keep {
                let m = adj[y].remove(&keep_id).unwrap_or(0) + adj[y].remove(&s).unwrap_or(0);
                adj[y].insert(s, m);
            }
        }
        adj[s] = keep;
        adj[t].clear();
        alive.remove(&t);
    }
    best
}

/// Replay a stream through the fully dynamic engine, checking the answer
/// after initialization (op_index 0), after every update, and at every
/// explicit query item, against `brute_min_cut` capped at c.  A reported
/// cut-set is additionally validated with `check_cutset`.  Size-capped to
/// keep the oracle affordable.
pub fn verify_stream(g0: &Multigraph, stream: &[StreamItem], cfg: &Config) -> Result<StreamReport> {
    if g0.n() > cfg.size_cap {
        return Err(DynCutError::SizeCapExceeded(format!(
            "verify: n={} exceeds size_cap={}",
            g0.n(),
            cfg.size_cap
        )));
    }
    let mut pool = fd_init(
        g0,
        cfg.c,
        cfg.xi,
        cfg.w,
        cfg.zeta,
        cfg.phi_floor,
        cfg.k_phi,
        cfg.exhaustive_threshold,
        cfg.max_levels,
        cfg.force_top,
    )?;
    let mut report = StreamReport::default();
    let mut op_index = 0usize;
    let check = |pool: &crate::hierarchy::InstancePool,
                     op_index: usize,
                     report: &mut StreamReport|
     -> Result<()> {
        let truth = brute_min_cut(&pool.g);
        let expected = truth.min_cut_size.filter(|&k| k <= pool.c);
        let answer = query_min_cut(fd_current(pool))?;
        let mut ok = answer.size == expected;
        let mut detail = None;
        if ok {
            if let Some(size) = answer.size {
                if let Err(why) = check_cutset(&pool.g, &answer.cutset, size) {
                    ok = false;
                    detail = Some(why);
                }
            }
        } else {
            detail = Some(format!("oracle {:?} vs engine {:?}", expected, answer.size));
        }
        report.records.push(CheckRecord { op_index, expected, got: answer.size, ok, detail });
        Ok(())
    };
    check(&pool, op_index, &mut report)?;
    for item in stream {
        match item {
            StreamItem::Op(op) => {
                fd_update(&mut pool, *op)?;
                op_index += 1;
                check(&pool, op_index, &mut report)?;
            }
            StreamItem::Query => check(&pool, op_index, &mut report)?,
        }
    }
    Ok(report)
}

/// Check a claimed cut-set against the current graph, independently: the
/// listed pairs must exist with the listed multiplicities, sum to `size`, and
/// their removal must disconnect the graph.
pub fn check_cutset(
    g: &Multigraph,
    cutset: &[(VertexId, VertexId, Mult)],
    size: Mult,
) -> std::result::Result<(), String> {
    let mut seen = BTreeSet::new();
    let mut total = 0;
    for &(u, v, mult) in cutset {
        let key = if u < v { (u, v) } else { (v, u) };
        if !seen.insert(key) {
            return Err(format!("cut-set lists pair ({u},{v}) twice"));
        }
        match g.edge(u, v) {
            None => return Err(format!("cut-set pair ({u},{v}) not in graph")),
            Some(rec) if rec.mult != mult => {
                return Err(format!(
                    "cut-set pair ({u},{v}) multiplicity {} != reported {mult}",
                    rec.mult
                ))
            }
            Some(_) => total += mult,
        }
    }
    if total != size {
        return Err(format!("cut-set multiplicities sum to {total}, reported size {size}"));
    }
    // Remove the pairs on an independent adjacency copy and count components.
    let removed: BTreeSet<(VertexId, VertexId)> = cutset
        .iter()
        .map(|&(u, v, _)| if u < v { (u, v) } else { (v, u) })
        .collect();
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for v in g.vertices() {
        adj.entry(v).or_default();
    }
    for e in g.edges() {
        if !removed.contains(&e.pair()) {
            adj.get_mut(&e.u).unwrap().push(e.v);
            adj.get_mut(&e.v).unwrap().push(e.u);
        }
    }
    let mut seen_v: BTreeSet<VertexId> = BTreeSet::new();
    let mut comps = 0;
    for &s in adj.keys() {
        if seen_v.contains(&s) {
            continue;
        }
        comps += 1;
        let mut queue = VecDeque::from([s]);
        seen_v.insert(s);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen_v.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    if comps < 2 && !cutset.is_empty() {
        return Err("removing the cut-set does not disconnect the graph".into());
    }
    if cutset.is_empty() && size == 0 && comps < 2 {
        return Err("0-cut reported but graph is connected".into());
    }
    Ok(())
}
