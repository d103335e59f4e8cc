//! Deterministic stream generators for verification and benchmarking.
//!
//! All three kinds derive every choice from a ChaCha stream seeded with the
//! caller's seed, so identical parameters reproduce identical output.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Mult, Multigraph, StreamItem, UpdateOp, VertexId};
use crate::{DynCutError, Result};

/// Generator kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Random base graph; each op toggles a uniformly random pair.
    RandomToggle,
    /// Two 5-fold Hamiltonian-cycle halves joined by exactly two unit
    /// edges: the global minimum cut is the planted 2-cut throughout, and
    /// the sidecar records it per op.
    PlantedCut,
    /// Random base graph; quiet single toggles alternate with bursts of
    /// localized churn, including vertex insertions and removals.
    ChurnBurst,
}

impl GenKind {
    pub fn parse(s: &str) -> Result<GenKind> {
        match s {
            "random-toggle" => Ok(GenKind::RandomToggle),
            "planted-cut" => Ok(GenKind::PlantedCut),
            "churn-burst" => Ok(GenKind::ChurnBurst),
            other => Err(DynCutError::ConfigError(format!("unknown generator kind {other:?}"))),
        }
    }
}

/// Output of a generator: base graph, update/query stream, and — for
/// planted-cut — the true global minimum cut size after each op.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Multigraph,
    pub stream: Vec<StreamItem>,
    pub sidecar: Option<Vec<Mult>>,
}

fn vid(i: usize) -> VertexId {
    VertexId(i as u64)
}

/// Toggle the pair (u,v): delete it if present, insert it otherwise.
fn toggle(g: &mut Multigraph, u: VertexId, v: VertexId, mult: Mult) -> Result<UpdateOp> {
    let op = if g.edge(u, v).is_some() {
        UpdateOp::DeleteEdge(u, v)
    } else {
        UpdateOp::InsertEdge(u, v, mult)
    };
    g.apply_update(op)?;
    Ok(op)
}

/// Random connected-ish base graph: a random spanning tree over 1..=n plus
/// ~n extra random pairs, multiplicities in 1..=2.
fn random_base(n: usize, rng: &mut ChaCha8Rng) -> Result<Multigraph> {
    let mut g = Multigraph::default();
    for i in 1..=n {
        g.insert_vertex(vid(i))?;
    }
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    for k in 1..n {
        let j = rng.gen_range(0..k);
        g.insert_edge(vid(order[j]), vid(order[k]), rng.gen_range(1..=2))?;
    }
    for _ in 0..n {
        let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        if a != b && g.edge(vid(a), vid(b)).is_none() {
            g.insert_edge(vid(a), vid(b), rng.gen_range(1..=2))?;
        }
    }
    Ok(g)
}

fn random_toggle(n: usize, ops: usize, rng: &mut ChaCha8Rng) -> Result<Generated> {
    let mut g = random_base(n, rng)?;
    let base = g.clone();
    let mut stream = Vec::with_capacity(ops);
    while stream.len() < ops {
        let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        if a == b {
            continue;
        }
        stream.push(StreamItem::Op(toggle(&mut g, vid(a), vid(b), rng.gen_range(1..=2))?));
    }
    Ok(Generated { graph: base, stream, sidecar: None })
}

/// Aggregate one Hamiltonian cycle over `verts` (random order) into `g`.
fn add_cycle(g: &mut Multigraph, verts: &[usize], rng: &mut ChaCha8Rng) -> Result<BTreeSet<(usize, usize)>> {
    let mut order = verts.to_vec();
    order.shuffle(rng);
    let mut pairs = BTreeSet::new();
    for k in 0..order.len() {
        let (a, b) = (order[k], order[(k + 1) % order.len()]);
        let (a, b) = (a.min(b), a.max(b));
        pairs.insert((a, b));
        let (u, v) = (vid(a), vid(b));
        match g.edge(u, v) {
            Some(rec) => {
                g.delete_edge(u, v)?;
                g.insert_edge(u, v, rec.mult + 1)?;
            }
            None => {
                g.insert_edge(u, v, 1)?;
            }
        }
    }
    Ok(pairs)
}

fn planted_cut(n: usize, ops: usize, rng: &mut ChaCha8Rng) -> Result<Generated> {
    if n < 8 {
        return Err(DynCutError::ConfigError(format!("planted-cut needs n >= 8, got {n}")));
    }
    let half = n / 2;
    let a: Vec<usize> = (1..=half).collect();
    let b: Vec<usize> = (half + 1..=n).collect();
    let mut g = Multigraph::default();
    for i in 1..=n {
        g.insert_vertex(vid(i))?;
    }
    // Every bipartition of a half is crossed >= 2 times by each of its five
    // Hamiltonian cycles (multiplicity counted), so any cut other than the
    // planted one has size >= 10; the plant is exactly the two cross edges.
    let mut protected: BTreeSet<(usize, usize)> = BTreeSet::new();
    for _ in 0..5 {
        protected.extend(add_cycle(&mut g, &a, rng)?);
        protected.extend(add_cycle(&mut g, &b, rng)?);
    }
    let cross = [(a[0], b[0]), (a[1], b[1])];
    for &(x, y) in &cross {
        g.insert_edge(vid(x), vid(y), 1)?;
        protected.insert((x.min(y), x.max(y)));
    }
    let base = g.clone();
    // Churn toggles touch only unprotected intra-half pairs, preserving the
    // planted minimum.
    let mut stream = Vec::with_capacity(ops);
    let mut sidecar = Vec::with_capacity(ops);
    while stream.len() < ops {
        let side = if rng.gen_bool(0.5) { &a } else { &b };
        let (x, y) = (side[rng.gen_range(0..side.len())], side[rng.gen_range(0..side.len())]);
        let (x, y) = (x.min(y), x.max(y));
        if x == y || protected.contains(&(x, y)) {
            continue;
        }
        stream.push(StreamItem::Op(toggle(&mut g, vid(x), vid(y), 1)?));
        sidecar.push(2);
    }
    Ok(Generated { graph: base, stream, sidecar: Some(sidecar) })
}

fn churn_burst(n: usize, ops: usize, rng: &mut ChaCha8Rng) -> Result<Generated> {
    let mut g = random_base(n, rng)?;
    let base = g.clone();
    let mut stream = Vec::with_capacity(ops);
    let mut next_fresh = n + 1;
    while stream.len() < ops {
        if rng.gen_bool(0.8) {
            // Quiet phase: one toggle.
            let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            if a != b {
                stream.push(StreamItem::Op(toggle(&mut g, vid(a), vid(b), rng.gen_range(1..=2))?));
            }
            continue;
        }
        // Burst: a transient vertex wired into a small window, churned, and
        // torn down again.  Built up front so it only runs when it fits in
        // the remaining op budget.
        let x = vid(next_fresh);
        let mut burst = vec![UpdateOp::InsertVertex(x)];
        let mut attached = BTreeSet::new();
        for _ in 0..rng.gen_range(2..=4) {
            let t = vid(rng.gen_range(1..=n));
            if attached.insert(t) {
                burst.push(UpdateOp::InsertEdge(x, t, rng.gen_range(1..=2)));
            }
        }
        for &t in &attached {
            burst.push(UpdateOp::DeleteEdge(x, t));
        }
        burst.push(UpdateOp::DeleteVertex(x));
        if stream.len() + burst.len() > ops {
            continue;
        }
        next_fresh += 1;
        for op in burst {
            g.apply_update(op)?;
            stream.push(StreamItem::Op(op));
        }
    }
    Ok(Generated { graph: base, stream, sidecar: None })
}

/// Generate a (graph, stream, sidecar) instance.
pub fn generate(kind: GenKind, n: usize, ops: usize, seed: u64) -> Result<Generated> {
    if n < 2 {
        return Err(DynCutError::ConfigError(format!("generator needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GenKind::RandomToggle => random_toggle(n, ops, &mut rng),
        GenKind::PlantedCut => planted_cut(n, ops, &mut rng),
        GenKind::ChurnBurst => churn_burst(n, ops, &mut rng),
    }
}
