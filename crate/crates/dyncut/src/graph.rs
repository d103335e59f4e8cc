//! Multigraph representation and the four update operations.
//!
//! A multigraph is a set of vertices plus at most one triple `(u, v, mult)`
//! per unordered pair `{u, v}` with `u != v` and `mult >= 1`.  Edges carry a
//! session-unique [`EdgeId`] with an origin tag so that cut-sets found in
//! sparsified graphs can be lifted back to the base graph by id identity.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{fresh_edge_id, DynCutError, Result};

/// Edge multiplicities and volumes.
pub type Mult = i64;

/// Opaque, non-negative vertex identifier; stable for a whole session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where an edge id came from, relative to the sparsifier chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeOrigin {
    /// An edge of the base graph G^(0).
    Base,
    /// A containment-set edge copied verbatim into a sparsifier (same id).
    ContainmentChain,
    /// A contracted-forest edge of multiplicity gamma; never liftable.
    ForestGamma,
}

impl EdgeOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeOrigin::Base => "base",
            EdgeOrigin::ContainmentChain => "containment-chain",
            EdgeOrigin::ForestGamma => "forest-gamma",
        }
    }
}

/// Session-unique edge identity plus origin tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub id: u64,
    pub origin: EdgeOrigin,
}

impl EdgeId {
    pub fn fresh(origin: EdgeOrigin) -> Self {
        EdgeId { id: fresh_edge_id(), origin }
    }

    /// Base and containment-chain edges preserve identity across levels.
    pub fn liftable(&self) -> bool {
        self.origin != EdgeOrigin::ForestGamma
    }
}

/// One stored edge endpoint record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRec {
    pub mult: Mult,
    pub id: EdgeId,
}

/// A fully materialized edge, `u < v` when produced by [`Multigraph::edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub mult: Mult,
    pub id: EdgeId,
}

impl Edge {
    /// Unordered endpoint pair in canonical order.
    pub fn pair(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }
}

/// One of the four update operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UpdateOp {
    InsertEdge(VertexId, VertexId, Mult),
    DeleteEdge(VertexId, VertexId),
    InsertVertex(VertexId),
    DeleteVertex(VertexId),
}

impl UpdateOp {
    /// Vertices named by the operation.
    pub fn involved(&self) -> Vec<VertexId> {
        match *self {
            UpdateOp::InsertEdge(u, v, _) | UpdateOp::DeleteEdge(u, v) => vec![u, v],
            UpdateOp::InsertVertex(v) | UpdateOp::DeleteVertex(v) => vec![v],
        }
    }

    /// Stream-format line ("ie u v a" / "de u v" / "iv v" / "dv v").
    pub fn to_line(&self) -> String {
        match *self {
            UpdateOp::InsertEdge(u, v, a) => format!("ie {} {} {}", u, v, a),
            UpdateOp::DeleteEdge(u, v) => format!("de {} {}", u, v),
            UpdateOp::InsertVertex(v) => format!("iv {}", v),
            UpdateOp::DeleteVertex(v) => format!("dv {}", v),
        }
    }
}

/// An ordered, sequentially valid list of update operations.
pub type UpdateSeq = Vec<UpdateOp>;

/// One line of an update stream: an operation or an explicit query marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamItem {
    Op(UpdateOp),
    Query,
}

/// Undirected multigraph with one triple per unordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multigraph {
    adj: BTreeMap<VertexId, BTreeMap<VertexId, EdgeRec>>,
    m: Mult,
}

impl Multigraph {
    pub fn new() -> Self {
        Multigraph::default()
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Sum of edge multiplicities.
    pub fn m(&self) -> Mult {
        self.m
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.adj.keys().copied().collect()
    }

    pub fn degree(&self, v: VertexId) -> Mult {
        self.adj.get(&v).map_or(0, |nb| nb.values().map(|r| r.mult).sum())
    }

    /// Number of distinct neighbors.
    pub fn neighbor_count(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |nb| nb.len())
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeRec)> + '_ {
        self.adj.get(&v).into_iter().flat_map(|nb| nb.iter().map(|(&w, &r)| (w, r)))
    }

    pub fn edge(&self, u: VertexId, v: VertexId) -> Option<EdgeRec> {
        self.adj.get(&u).and_then(|nb| nb.get(&v)).copied()
    }

    /// All edges, each reported once with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().flat_map(|(&u, nb)| {
            nb.iter()
                .filter(move |(&w, _)| u < w)
                .map(move |(&w, &r)| Edge { u, v: w, mult: r.mult, id: r.id })
        })
    }

    pub fn insert_vertex(&mut self, v: VertexId) -> Result<()> {
        if self.adj.contains_key(&v) {
            return Err(DynCutError::PreconditionViolated(format!(
                "insert_vertex({v}): vertex already present"
            )));
        }
        self.adj.insert(v, BTreeMap::new());
        Ok(())
    }

    pub fn delete_vertex(&mut self, v: VertexId) -> Result<()> {
        match self.adj.get(&v) {
            None => Err(DynCutError::PreconditionViolated(format!(
                "delete_vertex({v}): vertex not present"
            ))),
            Some(nb) if !nb.is_empty() => Err(DynCutError::PreconditionViolated(format!(
                "delete_vertex({v}): vertex not isolated"
            ))),
            Some(_) => {
                self.adj.remove(&v);
                Ok(())
            }
        }
    }

    /// Insert a new triple with a fresh base-origin edge id.
    pub fn insert_edge(&mut self, u: VertexId, v: VertexId, mult: Mult) -> Result<EdgeId> {
        let id = EdgeId::fresh(EdgeOrigin::Base);
        self.insert_edge_with_id(u, v, mult, id)?;
        Ok(id)
    }

    /// Insert a triple carrying a caller-chosen id (sparsifier assembly).
    pub fn insert_edge_with_id(
        &mut self,
        u: VertexId,
        v: VertexId,
        mult: Mult,
        id: EdgeId,
    ) -> Result<()> {
        if u == v {
            return Err(DynCutError::PreconditionViolated(format!(
                "insert_edge({u},{v}): self-loops are rejected"
            )));
        }
        if mult < 1 {
            return Err(DynCutError::PreconditionViolated(format!(
                "insert_edge({u},{v},{mult}): multiplicity must be >= 1"
            )));
        }
        if !self.adj.contains_key(&u) {
            return Err(DynCutError::PreconditionViolated(format!(
                "insert_edge({u},{v}): endpoint {u} not present"
            )));
        }
        if !self.adj.contains_key(&v) {
            return Err(DynCutError::PreconditionViolated(format!(
                "insert_edge({u},{v}): endpoint {v} not present"
            )));
        }
        if self.adj[&u].contains_key(&v) {
            return Err(DynCutError::PreconditionViolated(format!(
                "insert_edge({u},{v}): pair already has a triple"
            )));
        }
        let rec = EdgeRec { mult, id };
        self.adj.get_mut(&u).unwrap().insert(v, rec);
        self.adj.get_mut(&v).unwrap().insert(u, rec);
        self.m += mult;
        Ok(())
    }

    /// Remove the whole triple, no matter the multiplicity.
    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeRec> {
        let rec = match self.adj.get(&u).and_then(|nb| nb.get(&v)) {
            Some(&r) => r,
            None => {
                return Err(DynCutError::PreconditionViolated(format!(
                    "delete_edge({u},{v}): no such edge"
                )))
            }
        };
        self.adj.get_mut(&u).unwrap().remove(&v);
        self.adj.get_mut(&v).unwrap().remove(&u);
        self.m -= rec.mult;
        Ok(rec)
    }

    /// Apply one update operation in place.
    pub fn apply_update(&mut self, op: UpdateOp) -> Result<()> {
        match op {
            UpdateOp::InsertEdge(u, v, a) => self.insert_edge(u, v, a).map(|_| ()),
            UpdateOp::DeleteEdge(u, v) => self.delete_edge(u, v).map(|_| ()),
            UpdateOp::InsertVertex(v) => self.insert_vertex(v),
            UpdateOp::DeleteVertex(v) => self.delete_vertex(v),
        }
    }

    /// Apply a whole sequence, stopping at the first failure.
    pub fn apply_seq(&mut self, seq: &[UpdateOp]) -> Result<()> {
        for &op in seq {
            self.apply_update(op)?;
        }
        Ok(())
    }

    /// Sum of multiplicities of edges incident to `S` (internal edges count twice).
    pub fn volume(&self, s: &BTreeSet<VertexId>) -> Result<Mult> {
        let mut vol = 0;
        for &v in s {
            match self.adj.get(&v) {
                None => return Err(DynCutError::UnknownVertex(v.0)),
                Some(nb) => vol += nb.values().map(|r| r.mult).sum::<Mult>(),
            }
        }
        Ok(vol)
    }

    /// Edges with exactly one endpoint in `S`.
    pub fn boundary(&self, s: &BTreeSet<VertexId>) -> Result<Vec<Edge>> {
        let mut out = Vec::new();
        for &v in s {
            match self.adj.get(&v) {
                None => return Err(DynCutError::UnknownVertex(v.0)),
                Some(nb) => {
                    for (&w, &r) in nb {
                        if !s.contains(&w) {
                            out.push(Edge { u: v, v: w, mult: r.mult, id: r.id });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Total multiplicity crossing `S`.
    pub fn boundary_size(&self, s: &BTreeSet<VertexId>) -> Result<Mult> {
        Ok(self.boundary(s)?.iter().map(|e| e.mult).sum())
    }

    /// Subgraph on `S`, keeping only intra-`S` triples (ids preserved).
    pub fn induced(&self, s: &BTreeSet<VertexId>) -> Result<Multigraph> {
        let mut g = Multigraph::new();
        let mut twice_m = 0;
        for &v in s {
            let nb = self.adj.get(&v).ok_or(DynCutError::UnknownVertex(v.0))?;
            let row: BTreeMap<VertexId, EdgeRec> = nb
                .iter()
                .filter(|(w, _)| s.contains(w))
                .map(|(&w, &r)| (w, r))
                .collect();
            twice_m += row.values().map(|r| r.mult).sum::<Mult>();
            g.adj.insert(v, row);
        }
        g.m = twice_m / 2;
        Ok(g)
    }

    /// Edges whose endpoints lie in different clusters of the given map.
    pub fn intercluster_edges(&self, cluster_of: &BTreeMap<VertexId, usize>) -> Result<Vec<Edge>> {
        let mut out = Vec::new();
        for e in self.edges() {
            let cu = cluster_of.get(&e.u).ok_or(DynCutError::UnknownVertex(e.u.0))?;
            let cv = cluster_of.get(&e.v).ok_or(DynCutError::UnknownVertex(e.v.0))?;
            if cu != cv {
                out.push(e);
            }
        }
        Ok(out)
    }

    /// Connected components as sorted vertex sets, sorted by minimum vertex.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in self.adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for (&w, _) in &self.adj[&v] {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Connected components with the listed unordered pairs treated as
    /// absent, sorted by minimum vertex.  Avoids materializing the stripped
    /// graph when probing a candidate cut-set.
    pub fn components_without(&self, skip: &BTreeSet<(VertexId, VertexId)>) -> Vec<BTreeSet<VertexId>> {
        let gone = |a: VertexId, b: VertexId| {
            let p = if a < b { (a, b) } else { (b, a) };
            skip.contains(&p)
        };
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in self.adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for (&w, _) in &self.adj[&v] {
                    if !gone(v, w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Canonical text form: sorted `u v mult` triples (ids excluded).
    pub fn canonical_serialize(&self) -> String {
        let mut s = format!("{} {}\n", self.n(), self.edges().count());
        for e in self.edges() {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.mult));
        }
        s
    }

    /// Graph file format: first line `n m_lines`, then `u v multiplicity` lines.
    pub fn to_graph_file(&self) -> String {
        let edges: Vec<Edge> = self.edges().collect();
        let mut s = format!("{} {}\n", self.n(), edges.len());
        let mut isolated: Vec<VertexId> = Vec::new();
        for v in self.vertices() {
            if self.neighbor_count(v) == 0 {
                isolated.push(v);
            }
        }
        for e in &edges {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.mult));
        }
        // Isolated vertices are listed as comment-free "v v 0" is not legal;
        // they are reconstructed from the vertex count when contiguous ids are
        // used, and explicitly via trailing "iv"-style lines otherwise.
        for v in isolated {
            s.push_str(&format!("v {v}\n"));
        }
        s
    }

    pub fn from_graph_file(text: &str) -> Result<Multigraph> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| DynCutError::ParseError("empty graph file".into()))?;
        let mut hdr = header.split_whitespace();
        let n: usize = hdr
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| DynCutError::ParseError(format!("bad header: {header:?}")))?;
        let m_lines: usize = hdr
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| DynCutError::ParseError(format!("bad header: {header:?}")))?;
        let mut g = Multigraph::new();
        let mut seen_edges = 0usize;
        for (lineno, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() == 2 && toks[0] == "v" {
                let v: u64 = toks[1]
                    .parse()
                    .map_err(|_| DynCutError::ParseError(format!("line {}: {line:?}", lineno + 1)))?;
                if !g.contains_vertex(VertexId(v)) {
                    g.insert_vertex(VertexId(v))?;
                }
                continue;
            }
            if toks.len() != 3 {
                return Err(DynCutError::ParseError(format!("line {}: {line:?}", lineno + 1)));
            }
            let parse = |t: &str| -> Result<i64> {
                t.parse()
                    .map_err(|_| DynCutError::ParseError(format!("line {}: {line:?}", lineno + 1)))
            };
            let (u, v, a) = (parse(toks[0])?, parse(toks[1])?, parse(toks[2])?);
            if u < 0 || v < 0 {
                return Err(DynCutError::ParseError(format!("line {}: negative id", lineno + 1)));
            }
            let (u, v) = (VertexId(u as u64), VertexId(v as u64));
            for x in [u, v] {
                if !g.contains_vertex(x) {
                    g.insert_vertex(x)?;
                }
            }
            g.insert_edge(u, v, a)?;
            seen_edges += 1;
        }
        if seen_edges != m_lines {
            return Err(DynCutError::ParseError(format!(
                "header promised {m_lines} edge lines, found {seen_edges}"
            )));
        }
        if g.n() < n {
            // Contiguous-id convention: vertices 0..n-1 exist even if isolated.
            for v in 0..n as u64 {
                if !g.contains_vertex(VertexId(v)) {
                    g.insert_vertex(VertexId(v))?;
                }
            }
        }
        if g.n() != n {
            return Err(DynCutError::ParseError(format!(
                "header promised {n} vertices, reconstructed {}",
                g.n()
            )));
        }
        Ok(g)
    }
}

/// Parse one update-stream line.
pub fn parse_stream_line(line: &str) -> Result<StreamItem> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let num = |t: &str| -> Result<u64> {
        t.parse().map_err(|_| DynCutError::ParseError(format!("bad stream token {t:?} in {line:?}")))
    };
    match toks.as_slice() {
        ["q"] => Ok(StreamItem::Query),
        ["ie", u, v, a] => Ok(StreamItem::Op(UpdateOp::InsertEdge(
            VertexId(num(u)?),
            VertexId(num(v)?),
            num(a)? as Mult,
        ))),
        ["de", u, v] => Ok(StreamItem::Op(UpdateOp::DeleteEdge(VertexId(num(u)?), VertexId(num(v)?)))),
        ["iv", v] => Ok(StreamItem::Op(UpdateOp::InsertVertex(VertexId(num(v)?)))),
        ["dv", v] => Ok(StreamItem::Op(UpdateOp::DeleteVertex(VertexId(num(v)?)))),
        _ => Err(DynCutError::ParseError(format!("bad stream line {line:?}"))),
    }
}

/// Parse a whole stream file (empty lines ignored).
pub fn parse_stream(text: &str) -> Result<Vec<StreamItem>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_stream_line)
        .collect()
}

/// The reverse of a sequence: inserts and deletes swapped, order reversed.
/// Applying `seq` then `reverse_seq(g_before, seq)` restores the triple set.
pub fn reverse_seq(g_before: &Multigraph, seq: &[UpdateOp]) -> Result<UpdateSeq> {
    // Replay forward, remembering what each delete removed.
    let mut g = g_before.clone();
    let mut rev = Vec::with_capacity(seq.len());
    for &op in seq {
        let inverse = match op {
            UpdateOp::InsertEdge(u, v, _) => UpdateOp::DeleteEdge(u, v),
            UpdateOp::DeleteEdge(u, v) => {
                let rec = g
                    .edge(u, v)
                    .ok_or_else(|| DynCutError::PreconditionViolated(format!("no edge {u},{v}")))?;
                UpdateOp::InsertEdge(u, v, rec.mult)
            }
            UpdateOp::InsertVertex(v) => UpdateOp::DeleteVertex(v),
            UpdateOp::DeleteVertex(v) => UpdateOp::InsertVertex(v),
        };
        g.apply_update(op)?;
        rev.push(inverse);
    }
    rev.reverse();
    Ok(rev)
}
