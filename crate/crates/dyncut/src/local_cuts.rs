//! The auxiliary graph with special terminals, the local-cut enumerator,
//! and the Λ priority queue of candidate local cuts.
//!
//! The enumerator is a DFS with edge removal over one cluster's auxiliary
//! view: every boundary edge of the growing set is either internalized (its
//! outside endpoint joins) or cut (charged against the budget `c`).  Edges
//! incident to a special terminal can never be cut, which structurally
//! forces all terminals of the cluster onto one side of every emitted cut.

use std::collections::{BTreeMap, BTreeSet};

use crate::expander::Partition;
use crate::graph::{Mult, Multigraph, VertexId};
use crate::sparsify::cluster_terminals;
use crate::{fresh_internal_vertex, DynCutError, Result};

// ---------------------------------------------------------------------------
// Auxiliary graph
// ---------------------------------------------------------------------------

/// G_* = G plus one special terminal per cluster, adjacent (multiplicity 1)
/// to every terminal of its cluster.
#[derive(Debug, Clone)]
pub struct AuxGraph {
    pub gstar: Multigraph,
    /// Per cluster index, the special terminal t_P.
    pub special: Vec<VertexId>,
    pub special_set: BTreeSet<VertexId>,
    /// The underlying partition over real vertices.
    pub partition: Partition,
    /// Cluster index of every G_* vertex, special terminals included.
    pub cluster_of_star: BTreeMap<VertexId, usize>,
}

impl AuxGraph {
    pub fn is_special(&self, v: VertexId) -> bool {
        self.special_set.contains(&v)
    }

    /// Degree of `u` inside its cluster view G_*[P_*].
    pub fn view_degree(&self, u: VertexId) -> Mult {
        let i = self.cluster_of_star[&u];
        self.gstar
            .neighbors(u)
            .filter(|(w, _)| self.cluster_of_star.get(w) == Some(&i))
            .map(|(_, rec)| rec.mult)
            .sum()
    }

    /// Number of vertices of the cluster view P_* (cluster plus t_P).
    pub fn view_size(&self, cluster: usize) -> usize {
        self.partition.clusters[cluster].len() + 1
    }

    /// Materialized induced view G_*[P_*] (oracle comparisons, small scale).
    pub fn cluster_view(&self, cluster: usize) -> Result<Multigraph> {
        let mut s = self.partition.clusters[cluster].clone();
        s.insert(self.special[cluster]);
        self.gstar.induced(&s)
    }
}

/// Build the auxiliary graph for (g, p).
pub fn build_aux(g: &Multigraph, p: &Partition) -> Result<AuxGraph> {
    let terminals = cluster_terminals(g, p)?;
    let mut gstar = g.clone();
    let mut special = Vec::new();
    let mut special_set = BTreeSet::new();
    let mut cluster_of_star = p.cluster_of.clone();
    for (i, t_set) in terminals.iter().enumerate() {
        let t = fresh_internal_vertex();
        gstar.insert_vertex(t)?;
        for &y in t_set {
            gstar.insert_edge(t, y, 1)?;
        }
        special.push(t);
        special_set.insert(t);
        cluster_of_star.insert(t, i);
    }
    Ok(AuxGraph { gstar, special, special_set, partition: p.clone(), cluster_of_star })
}

/// Rebuild the auxiliary graph for (g2, p2), reusing the special-terminal id
/// of every cluster that maps back unchanged via `keep` (new index → old
/// index).  The result equals `build_aux(g2, p2)` up to special-terminal ids.
pub fn update_aux(
    aux: &AuxGraph,
    g2: &Multigraph,
    p2: &Partition,
    keep: &BTreeMap<usize, usize>,
) -> Result<AuxGraph> {
    let terminals = cluster_terminals(g2, p2)?;
    let mut gstar = g2.clone();
    let mut special = Vec::new();
    let mut special_set = BTreeSet::new();
    let mut cluster_of_star = p2.cluster_of.clone();
    for (i, t_set) in terminals.iter().enumerate() {
        let t = match keep.get(&i) {
            Some(&j) => aux.special[j],
            None => fresh_internal_vertex(),
        };
        gstar.insert_vertex(t)?;
        for &y in t_set {
            gstar.insert_edge(t, y, 1)?;
        }
        special.push(t);
        special_set.insert(t);
        cluster_of_star.insert(t, i);
    }
    Ok(AuxGraph { gstar, special, special_set, partition: p2.clone(), cluster_of_star })
}

// ---------------------------------------------------------------------------
// Local-cut enumeration
// ---------------------------------------------------------------------------

/// Canonical enumeration of connected bounded-boundary sets: grow U from
/// the seed by repeatedly taking the lexicographically smallest boundary
/// edge not yet declared cut, then branching on "other endpoint joins U"
/// versus "edge joins the cut F".  The considered edge is a function of
/// (U, F) alone, so every state is explored along exactly one branch path
/// and no work is duplicated across removal orders.  The open boundary is
/// maintained incrementally in a sorted set.
struct EnumState<'a> {
    aux: &'a AuxGraph,
    cluster: usize,
    alpha3: Mult,
    view_size: usize,
    cap: Mult,
    u: BTreeSet<VertexId>,
    /// Total view degree of U.
    vol: Mult,
    /// Declared cut edges F (canonical pairs) and their total multiplicity.
    f: BTreeSet<(VertexId, VertexId)>,
    f_mult: Mult,
    /// Boundary edges (x in U, w outside) not in F, sorted by (x, w).
    open: BTreeSet<(VertexId, VertexId, Mult)>,
    /// Vertices barred from joining U (canonical min-seed sweeps bar the
    /// cluster members smaller than the seed).
    forbidden: &'a BTreeSet<VertexId>,
    out: BTreeSet<BTreeSet<VertexId>>,
}

fn pair_key(u: VertexId, w: VertexId) -> (VertexId, VertexId) {
    if u < w {
        (u, w)
    } else {
        (w, u)
    }
}

impl EnumState<'_> {
    fn in_cluster(&self, w: VertexId) -> bool {
        self.aux.cluster_of_star.get(&w) == Some(&self.cluster)
    }

    /// Move `w` into U, updating the open boundary; returns the removed
    /// entries for restoration.
    fn extend(&mut self, w: VertexId) -> Vec<(VertexId, VertexId, Mult)> {
        self.u.insert(w);
        self.vol += self.aux.view_degree(w);
        let mut removed = Vec::new();
        for (nb, rec) in self.aux.gstar.neighbors(w) {
            if !self.in_cluster(nb) {
                continue;
            }
            if self.u.contains(&nb) {
                let t = (nb, w, rec.mult);
                if self.open.remove(&t) {
                    removed.push(t);
                }
            } else if !self.f.contains(&pair_key(w, nb)) {
                self.open.insert((w, nb, rec.mult));
            }
        }
        removed
    }

    fn retract(&mut self, w: VertexId, removed: Vec<(VertexId, VertexId, Mult)>) {
        for (nb, rec) in self.aux.gstar.neighbors(w) {
            if self.in_cluster(nb) && !self.u.contains(&nb) {
                self.open.remove(&(w, nb, rec.mult));
            }
        }
        for t in removed {
            self.open.insert(t);
        }
        self.vol -= self.aux.view_degree(w);
        self.u.remove(&w);
    }

    fn recurse(&mut self) {
        let Some(&(x, w, mult)) = self.open.iter().next() else {
            // Leaf: every boundary edge of U is in F.  Record U when it is
            // proper and F contains no edge made internal by later growth
            // (such U recur on the path where the edge was never cut).
            if self.u.len() < self.view_size
                && self.f.iter().all(|&(a, b)| !(self.u.contains(&a) && self.u.contains(&b)))
            {
                self.out.insert(self.u.clone());
            }
            return;
        };
        if self.vol + self.aux.view_degree(w) <= self.alpha3 && !self.forbidden.contains(&w) {
            let removed = self.extend(w);
            self.recurse();
            self.retract(w, removed);
        }
        // Boundary edges incident to a special terminal may never be cut:
        // all terminals stay on one side.
        if !self.aux.is_special(x) && !self.aux.is_special(w) && self.f_mult + mult <= self.cap {
            self.open.remove(&(x, w, mult));
            self.f.insert(pair_key(x, w));
            self.f_mult += mult;
            self.recurse();
            self.f_mult -= mult;
            self.f.remove(&pair_key(x, w));
            self.open.insert((x, w, mult));
        }
    }
}

fn enumerate_cuts_from(
    aux: &AuxGraph,
    v: VertexId,
    alpha: Mult,
    c: Mult,
    forbidden: &BTreeSet<VertexId>,
) -> Result<Vec<BTreeSet<VertexId>>> {
    let cluster = *aux
        .cluster_of_star
        .get(&v)
        .ok_or(DynCutError::UnknownVertex(v.0))?;
    if alpha < 1 || c < 0 {
        return Err(DynCutError::ParameterViolation(format!(
            "enumerate_cuts: alpha={alpha}, c={c}"
        )));
    }
    let mut st = EnumState {
        aux,
        cluster,
        alpha3: 3 * alpha,
        view_size: aux.view_size(cluster),
        cap: c,
        u: BTreeSet::new(),
        vol: 0,
        f: BTreeSet::new(),
        f_mult: 0,
        open: BTreeSet::new(),
        forbidden,
        out: BTreeSet::new(),
    };
    if aux.view_degree(v) <= st.alpha3 {
        st.extend(v);
        st.recurse();
    }
    Ok(st.out.into_iter().collect())
}

/// All vertex sets U with v ∈ U ⊊ P_*, G_*[U] connected, vol_{G_*[P_*]}(U)
/// ≤ 3·alpha, boundary multiplicity ≤ c, and no boundary edge incident to a
/// special terminal (hence all terminals of the cluster on one side).
pub fn enumerate_cuts(
    aux: &AuxGraph,
    v: VertexId,
    alpha: Mult,
    c: Mult,
) -> Result<Vec<BTreeSet<VertexId>>> {
    enumerate_cuts_from(aux, v, alpha, c, &BTreeSet::new())
}

/// Like [`enumerate_cuts`], but barring every cluster member smaller than
/// the seed from U: across an ascending sweep of a cluster's real vertices,
/// each set is produced exactly once — from its smallest member.  (The
/// special terminal is never barred; its id sorts above all real ids.)
pub fn enumerate_cuts_min_seed(
    aux: &AuxGraph,
    v: VertexId,
    alpha: Mult,
    c: Mult,
) -> Result<Vec<BTreeSet<VertexId>>> {
    let cluster = *aux
        .cluster_of_star
        .get(&v)
        .ok_or(DynCutError::UnknownVertex(v.0))?;
    let forbidden: BTreeSet<VertexId> = aux.partition.clusters[cluster]
        .iter()
        .copied()
        .filter(|&w| w < v)
        .collect();
    enumerate_cuts_from(aux, v, alpha, c, &forbidden)
}

// ---------------------------------------------------------------------------
// Λ priority queue
// ---------------------------------------------------------------------------

/// One candidate local cut stored in Λ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCutEntry {
    /// Stable cluster identity: the special terminal t_P of the cluster.
    pub cluster: VertexId,
    /// U ∩ V — the real vertices of the set (never empty).
    pub u_real: BTreeSet<VertexId>,
    /// Whether t_P (and hence every terminal of the cluster) lies in U.
    pub has_special: bool,
    /// Boundary multiplicity of U in G_*[P_*].
    pub cut_size: Mult,
}

/// Priority key: (cut_size, canonical sorted vertex list).
pub type EntryKey = (Mult, Vec<VertexId>);

impl LocalCutEntry {
    pub fn key(&self) -> EntryKey {
        (self.cut_size, self.u_real.iter().copied().collect())
    }

    /// Build an entry from an enumerated set (U may contain t_P).
    pub fn from_set(aux: &AuxGraph, u: &BTreeSet<VertexId>) -> Result<Option<LocalCutEntry>> {
        let mut u_real = BTreeSet::new();
        let mut has_special = false;
        let mut cluster = None;
        for &x in u {
            if aux.is_special(x) {
                has_special = true;
            } else {
                u_real.insert(x);
            }
            cluster = Some(aux.cluster_of_star[&x]);
        }
        if u_real.is_empty() {
            return Ok(None); // degenerate {t_P}
        }
        let ci = cluster.unwrap();
        let mut cut_size = 0;
        for &x in u {
            for (w, rec) in aux.gstar.neighbors(x) {
                if aux.cluster_of_star.get(&w) == Some(&ci) && !u.contains(&w) {
                    cut_size += rec.mult;
                }
            }
        }
        Ok(Some(LocalCutEntry { cluster: aux.special[ci], u_real, has_special, cut_size }))
    }
}

/// Min-priority queue over local-cut entries with an inverted index.
#[derive(Debug, Clone, Default)]
pub struct LocalCutQueue {
    entries: BTreeMap<EntryKey, LocalCutEntry>,
    /// Real vertex → keys of entries whose U contains it.
    index: BTreeMap<VertexId, BTreeSet<EntryKey>>,
    /// Cluster (t_P id) → keys of its entries.
    by_cluster: BTreeMap<VertexId, BTreeSet<EntryKey>>,
    /// Cluster (t_P id) → keys of its has_special entries.
    special_by_cluster: BTreeMap<VertexId, BTreeSet<EntryKey>>,
}

impl LocalCutQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Idempotent insert (identical U at identical size replaces itself).
    pub fn insert(&mut self, entry: LocalCutEntry) {
        let key = entry.key();
        if let Some(old) = self.entries.insert(key.clone(), entry.clone()) {
            // Same key means same vertex set and size; refresh indexes only
            // if the cluster identity moved (possible after cluster renames).
            if old.cluster != entry.cluster {
                self.by_cluster.get_mut(&old.cluster).map(|s| s.remove(&key));
                self.special_by_cluster.get_mut(&old.cluster).map(|s| s.remove(&key));
            }
        }
        for &v in &entry.u_real {
            self.index.entry(v).or_default().insert(key.clone());
        }
        self.by_cluster.entry(entry.cluster).or_default().insert(key.clone());
        if entry.has_special {
            self.special_by_cluster.entry(entry.cluster).or_default().insert(key);
        }
    }

    fn remove_key(&mut self, key: &EntryKey) {
        if let Some(entry) = self.entries.remove(key) {
            for v in &entry.u_real {
                if let Some(s) = self.index.get_mut(v) {
                    s.remove(key);
                    if s.is_empty() {
                        self.index.remove(v);
                    }
                }
            }
            if let Some(s) = self.by_cluster.get_mut(&entry.cluster) {
                s.remove(key);
                if s.is_empty() {
                    self.by_cluster.remove(&entry.cluster);
                }
            }
            if entry.has_special {
                if let Some(s) = self.special_by_cluster.get_mut(&entry.cluster) {
                    s.remove(key);
                    if s.is_empty() {
                        self.special_by_cluster.remove(&entry.cluster);
                    }
                }
            }
        }
    }

    /// Remove every entry whose U contains `v`; returns how many went away.
    pub fn remove_vertex(&mut self, v: VertexId) -> usize {
        let keys: Vec<EntryKey> =
            self.index.get(&v).map(|s| s.iter().cloned().collect()).unwrap_or_default();
        for k in &keys {
            self.remove_key(k);
        }
        keys.len()
    }

    /// Remove every entry of the cluster identified by its special terminal.
    pub fn remove_cluster(&mut self, t: VertexId) -> usize {
        let keys: Vec<EntryKey> =
            self.by_cluster.get(&t).map(|s| s.iter().cloned().collect()).unwrap_or_default();
        for k in &keys {
            self.remove_key(k);
        }
        keys.len()
    }

    /// Remove the has_special entries of one cluster (terminal-set change).
    pub fn remove_special_of_cluster(&mut self, t: VertexId) -> usize {
        let keys: Vec<EntryKey> = self
            .special_by_cluster
            .get(&t)
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default();
        for k in &keys {
            self.remove_key(k);
        }
        keys.len()
    }

    /// Globally minimum entry (deterministic canonical tiebreak), if any.
    pub fn min(&self) -> Option<&LocalCutEntry> {
        self.entries.values().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LocalCutEntry> {
        self.entries.values()
    }

    /// Debug dump: JSON lines {cluster, cut_size, U:[ids]} in priority order.
    pub fn dump_json(&self, aux: &AuxGraph) -> String {
        let cluster_index: BTreeMap<VertexId, usize> =
            aux.special.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut s = String::new();
        for e in self.entries.values() {
            let ids: Vec<u64> = e.u_real.iter().map(|v| v.0).collect();
            let ci = cluster_index.get(&e.cluster).copied().unwrap_or(usize::MAX);
            s.push_str(&format!(
                "{}\n",
                serde_json::json!({"cluster": ci, "cut_size": e.cut_size, "U": ids})
            ));
        }
        s
    }
}

/// Enumerate from `v` and convert to entries (dedup is the queue's job).
pub fn entries_for_vertex(
    aux: &AuxGraph,
    v: VertexId,
    alpha: Mult,
    c: Mult,
) -> Result<Vec<LocalCutEntry>> {
    entries_for_vertex_opts(aux, v, alpha, c, false)
}

/// Λ entries from one seed; with `min_seed` the sweep is canonicalized to
/// sets whose smallest cluster member is `v` (see
/// [`enumerate_cuts_min_seed`]).
pub fn entries_for_vertex_opts(
    aux: &AuxGraph,
    v: VertexId,
    alpha: Mult,
    c: Mult,
    min_seed: bool,
) -> Result<Vec<LocalCutEntry>> {
    let sets = if min_seed {
        enumerate_cuts_min_seed(aux, v, alpha, c)?
    } else {
        enumerate_cuts(aux, v, alpha, c)?
    };
    let mut out = Vec::new();
    for u in sets {
        if let Some(e) = LocalCutEntry::from_set(aux, &u)? {
            out.push(e);
        }
    }
    Ok(out)
}
