//! Degree reduction: simple graphs to bounded-degree multigraphs.
//!
//! Every simple-graph vertex `u` becomes a chain of gadget vertices — one
//! `v_{u,u}` plus one `v_{u,w}` per incident edge `(u,w)` — linked by chain
//! edges of multiplicity `c+1` in neighbor-list order, with a unit cross edge
//! `(v_{u,w}, v_{w,u})` per simple edge.  Cuts of size at most `c` cannot
//! afford a chain edge, so the c-cuts of the reduced multigraph are exactly
//! the cross-edge images of the c-cuts of the simple graph, and every gadget
//! vertex has at most 3 distinct neighbors.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Edge, Mult, Multigraph, UpdateOp, UpdateSeq, VertexId};
use crate::{fresh_internal_vertex, DynCutError, Result};

/// The simple graph being mirrored, plus the gadget bookkeeping.
#[derive(Debug, Clone)]
pub struct SimpleMirror {
    c: Mult,
    /// Ordered neighbor list per vertex; position 0 is the vertex itself.
    lists: BTreeMap<VertexId, Vec<VertexId>>,
    /// Gadget vertex for the oriented pair (u, w); (u, u) maps to v_{u,u}.
    gadget: BTreeMap<(VertexId, VertexId), VertexId>,
    /// Reverse map gadget vertex -> oriented pair.
    rev: BTreeMap<VertexId, (VertexId, VertexId)>,
}

impl SimpleMirror {
    pub fn c(&self) -> Mult {
        self.c
    }

    /// Chain-edge multiplicity.
    pub fn chain_mult(&self) -> Mult {
        self.c + 1
    }

    pub fn simple_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.lists.keys().copied()
    }

    pub fn has_simple_edge(&self, u: VertexId, w: VertexId) -> bool {
        self.lists.get(&u).is_some_and(|l| l[1..].contains(&w))
    }

    pub fn gadget_of(&self, u: VertexId, w: VertexId) -> Option<VertexId> {
        self.gadget.get(&(u, w)).copied()
    }

    pub fn pair_of(&self, gadget: VertexId) -> Option<(VertexId, VertexId)> {
        self.rev.get(&gadget).copied()
    }

    fn fresh_gadget(&mut self, u: VertexId, w: VertexId) -> VertexId {
        let g = fresh_internal_vertex();
        self.gadget.insert((u, w), g);
        self.rev.insert(g, (u, w));
        g
    }

    /// The five-operation insert sequence of Appendix A.
    fn insert_edge_ops(&mut self, u: VertexId, w: VertexId) -> Result<UpdateSeq> {
        if u == w {
            return Err(DynCutError::PreconditionViolated(format!(
                "simple insert({u},{w}): self-loop"
            )));
        }
        for x in [u, w] {
            if !self.lists.contains_key(&x) {
                return Err(DynCutError::PreconditionViolated(format!(
                    "simple insert({u},{w}): vertex {x} not present"
                )));
            }
        }
        if self.has_simple_edge(u, w) {
            return Err(DynCutError::PreconditionViolated(format!(
                "simple insert({u},{w}): edge already present"
            )));
        }
        let u_last = *self.lists[&u].last().unwrap();
        let w_last = *self.lists[&w].last().unwrap();
        let g_u_last = self.gadget[&(u, u_last)];
        let g_w_last = self.gadget[&(w, w_last)];
        let g_uw = self.fresh_gadget(u, w);
        let g_wu = self.fresh_gadget(w, u);
        self.lists.get_mut(&u).unwrap().push(w);
        self.lists.get_mut(&w).unwrap().push(u);
        Ok(vec![
            UpdateOp::InsertVertex(g_uw),
            UpdateOp::InsertVertex(g_wu),
            UpdateOp::InsertEdge(g_uw, g_wu, 1),
            UpdateOp::InsertEdge(g_uw, g_u_last, self.chain_mult()),
            UpdateOp::InsertEdge(g_wu, g_w_last, self.chain_mult()),
        ])
    }

    /// The at-most-nine-operation delete sequence of Appendix A
    /// (successor-chain operations omitted when the successor is absent).
    fn delete_edge_ops(&mut self, u: VertexId, w: VertexId) -> Result<UpdateSeq> {
        if !self.has_simple_edge(u, w) {
            return Err(DynCutError::PreconditionViolated(format!(
                "simple delete({u},{w}): no such edge"
            )));
        }
        let g_uw = self.gadget[&(u, w)];
        let g_wu = self.gadget[&(w, u)];
        let mut ops = vec![UpdateOp::DeleteEdge(g_uw, g_wu)];
        let mut splices = Vec::new();
        for (a, b, gadget_ab) in [(u, w, g_uw), (w, u, g_wu)] {
            let list = &self.lists[&a];
            let i = list.iter().position(|&x| x == b).unwrap();
            let prev = list[i - 1];
            let g_prev = self.gadget[&(a, prev)];
            ops.push(UpdateOp::DeleteEdge(gadget_ab, g_prev));
            if i + 1 < list.len() {
                let next = list[i + 1];
                let g_next = self.gadget[&(a, next)];
                ops.push(UpdateOp::DeleteEdge(gadget_ab, g_next));
                splices.push(UpdateOp::InsertEdge(g_prev, g_next, self.chain_mult()));
            }
        }
        ops.extend(splices);
        ops.push(UpdateOp::DeleteVertex(g_uw));
        ops.push(UpdateOp::DeleteVertex(g_wu));
        let iu = self.lists[&u].iter().position(|&x| x == w).unwrap();
        self.lists.get_mut(&u).unwrap().remove(iu);
        let iw = self.lists[&w].iter().position(|&x| x == u).unwrap();
        self.lists.get_mut(&w).unwrap().remove(iw);
        self.gadget.remove(&(u, w));
        self.gadget.remove(&(w, u));
        self.rev.remove(&g_uw);
        self.rev.remove(&g_wu);
        Ok(ops)
    }

    fn insert_vertex_ops(&mut self, v: VertexId) -> Result<UpdateSeq> {
        if self.lists.contains_key(&v) {
            return Err(DynCutError::PreconditionViolated(format!(
                "simple insert_vertex({v}): already present"
            )));
        }
        self.lists.insert(v, vec![v]);
        let g = self.fresh_gadget(v, v);
        Ok(vec![UpdateOp::InsertVertex(g)])
    }

    fn delete_vertex_ops(&mut self, v: VertexId) -> Result<UpdateSeq> {
        match self.lists.get(&v) {
            None => Err(DynCutError::PreconditionViolated(format!(
                "simple delete_vertex({v}): not present"
            ))),
            Some(l) if l.len() > 1 => Err(DynCutError::PreconditionViolated(format!(
                "simple delete_vertex({v}): not isolated"
            ))),
            Some(_) => {
                let g = self.gadget.remove(&(v, v)).unwrap();
                self.rev.remove(&g);
                self.lists.remove(&v);
                Ok(vec![UpdateOp::DeleteVertex(g)])
            }
        }
    }
}

/// Build the Appendix A multigraph for a simple graph.
///
/// `g_simple` must have all multiplicities equal to 1.
pub fn degree_reduce(g_simple: &Multigraph, c: Mult) -> Result<(Multigraph, SimpleMirror)> {
    if c < 1 {
        return Err(DynCutError::ParameterViolation(format!("degree_reduce: c={c} must be >= 1")));
    }
    for e in g_simple.edges() {
        if e.mult != 1 {
            return Err(DynCutError::PreconditionViolated(format!(
                "degree_reduce: edge ({},{}) has multiplicity {}, input must be simple",
                e.u, e.v, e.mult
            )));
        }
    }
    let mut mirror = SimpleMirror {
        c,
        lists: BTreeMap::new(),
        gadget: BTreeMap::new(),
        rev: BTreeMap::new(),
    };
    let mut g = Multigraph::new();
    for v in g_simple.vertices() {
        let seq = mirror.insert_vertex_ops(v)?;
        g.apply_seq(&seq)?;
    }
    let edges: Vec<Edge> = g_simple.edges().collect();
    for e in edges {
        let seq = mirror.insert_edge_ops(e.u, e.v)?;
        g.apply_seq(&seq)?;
    }
    Ok((g, mirror))
}

/// Translate one simple-graph update into the multigraph update sequence,
/// updating the mirror's neighbor lists.
pub fn reduce_update(mirror: &mut SimpleMirror, simple_op: UpdateOp) -> Result<UpdateSeq> {
    match simple_op {
        UpdateOp::InsertEdge(u, w, a) => {
            if a != 1 {
                return Err(DynCutError::PreconditionViolated(format!(
                    "simple insert({u},{w},{a}): simple graphs have unit edges"
                )));
            }
            mirror.insert_edge_ops(u, w)
        }
        UpdateOp::DeleteEdge(u, w) => mirror.delete_edge_ops(u, w),
        UpdateOp::InsertVertex(v) => mirror.insert_vertex_ops(v),
        UpdateOp::DeleteVertex(v) => mirror.delete_vertex_ops(v),
    }
}

/// Lift a multigraph cut-set back to simple edges.
///
/// Every listed edge must be a cross edge (both endpoints gadget vertices of
/// the same simple edge, multiplicity 1); chain edges are non-liftable.
pub fn lift_cutset(
    mirror: &SimpleMirror,
    cutset: &[(VertexId, VertexId, Mult)],
) -> Result<BTreeSet<(VertexId, VertexId)>> {
    let mut out = BTreeSet::new();
    for &(a, b, mult) in cutset {
        if mult != 1 {
            return Err(DynCutError::NonLiftableEdge(format!(
                "edge ({a},{b}) has multiplicity {mult} (chain edge)"
            )));
        }
        let pa = mirror.pair_of(a);
        let pb = mirror.pair_of(b);
        match (pa, pb) {
            (Some((u, w)), Some((w2, u2))) if u == u2 && w == w2 && u != w => {
                out.insert(if u < w { (u, w) } else { (w, u) });
            }
            _ => {
                return Err(DynCutError::NonLiftableEdge(format!(
                    "edge ({a},{b}) is not a cross edge"
                )))
            }
        }
    }
    Ok(out)
}
