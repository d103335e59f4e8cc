//! One-level and multi-level global minimum-cut structures, the parameter
//! schedule, the level-descending query, and the instance pool that turns
//! offline batches into a fully dynamic per-operation engine.
//!
//! Λ maintenance is cluster-granular: clusters whose vertex set and terminal
//! set both survive an update keep their queue entries verbatim (entries are
//! functions of cluster content only); every other cluster is purged and
//! repopulated.  Repopulation cost is kept local through per-cluster sweep
//! memos: a canonical snapshot of the cluster's adjacency rows plus the
//! entry list it produced.  On refresh, only entries touching a changed row
//! are retired, and only changed vertices are re-seeded.

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hasher;

use num_rational::Ratio;

use crate::expander::{cert_of, conductance, expander_decompose, passes, Partition, Rat};
use crate::graph::{Mult, Multigraph, UpdateOp, UpdateSeq, VertexId};
use crate::local_cuts::{
    build_aux, entries_for_vertex_opts, enumerate_cuts, update_aux, AuxGraph, EntryKey,
    LocalCutEntry, LocalCutQueue,
};
use crate::sparsify::{ec_init_with_partition, ec_rebuild, remainder_sets, OneLevelECDS};
use crate::{DynCutError, Result};

/// Clusters whose auxiliary view has at most this volume are enumerated
/// completely (volume cap vol/2 + 1 covers every subset).
pub const COMPLETE_VOL: Mult = 60;

/// Enumeration-cache capacity (entries); the cache is cleared when full.
const CACHE_CAP: usize = 1 << 20;

// ---------------------------------------------------------------------------
// Parameter schedule
// ---------------------------------------------------------------------------

/// The grade/expansion schedule for a multi-level structure: grades follow
/// the recurrence c_i = c_{i+1}(c_{i+1} + 2) down from c_0 to c_ζ = c, and
/// φ degrades by the configured divisor per stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSchedule {
    pub zeta: usize,
    /// Grades c_0 > c_1 > ... > c_ζ = c.
    pub c_seq: Vec<Mult>,
    /// Expansions φ_0 > φ_1 > ... > φ_ζ.
    pub phi_seq: Vec<Rat>,
    pub gamma: Mult,
    pub alpha: Mult,
}

/// Ceiling of a nonnegative rational.
fn rat_ceil(r: Rat) -> Mult {
    (r.numer() + r.denom() - 1).div_euclid(*r.denom())
}

/// Largest power of two (1/2^k or 1) that is <= r; tiny floor guard at 2^-30.
fn pow2_floor(r: Rat) -> Rat {
    if r >= Ratio::from_integer(1) {
        return Ratio::from_integer(1);
    }
    let mut p = Ratio::new(1, 2);
    for _ in 0..30 {
        if p <= r {
            return p;
        }
        p /= 2;
    }
    p
}

/// Compute the parameter schedule for target cut bound `c` on an n-vertex
/// graph.  The depth formula is negative at desk scale, so ζ clamps to >= 1
/// unless overridden.
pub fn schedule_params(
    c: Mult,
    n: usize,
    zeta_override: Option<usize>,
    phi_floor: Rat,
    k_phi: u32,
) -> Result<ParameterSchedule> {
    if c < 1 {
        return Err(DynCutError::ParameterViolation(format!("schedule: c={c} must be >= 1")));
    }
    let nn = (n.max(3)) as f64;
    let zeta = match zeta_override {
        Some(z) => z.max(1),
        None => {
            let ratio = (nn.ln().ln() / 100.0) / (4.0 * c as f64).ln();
            let formula = if ratio > 0.0 { ratio.ln().floor() } else { f64::NEG_INFINITY };
            (formula.max(1.0)) as usize
        }
    };
    let mut c_seq = vec![0 as Mult; zeta + 1];
    c_seq[zeta] = c;
    for i in (0..zeta).rev() {
        let next = c_seq[i + 1];
        c_seq[i] = next
            .checked_mul(next + 2)
            .ok_or_else(|| DynCutError::InfeasibleParameters("grade overflow".into()))?;
    }
    // φ_0 = 1/2^{ceil(log2(n)^{3/4})}, clamped to the desk-scale floor.
    let exp = (nn.log2().powf(0.75).ceil() as u32).min(30);
    let formula_phi = Ratio::new(1, 1i64 << exp);
    let mut phi_seq = vec![formula_phi.max(phi_floor)];
    for i in 1..=zeta {
        phi_seq.push(phi_seq[i - 1] / Ratio::from_integer(k_phi as i64));
    }
    let gamma = c_seq[0] + 1;
    let alpha = rat_ceil(Ratio::from_integer(c_seq[0]) / phi_seq[zeta]);
    for i in 0..=zeta {
        if gamma <= c_seq[i] || Ratio::from_integer(alpha) < Ratio::from_integer(c_seq[i]) / phi_seq[i]
        {
            return Err(DynCutError::InfeasibleParameters(format!(
                "schedule invariant failed at stage {i}"
            )));
        }
    }
    Ok(ParameterSchedule { zeta, c_seq, phi_seq, gamma, alpha })
}

// ---------------------------------------------------------------------------
// Enumeration cache
// ---------------------------------------------------------------------------

/// Stored enumeration output entry, cluster-agnostic (the special terminal
/// is canonicalized away, so results survive re-initialization).
#[derive(Debug, Clone)]
struct MemoEntry {
    u_real: BTreeSet<VertexId>,
    has_special: bool,
    cut_size: Mult,
}

/// Canonical adjacency rows of one cluster view: member id (special mapped
/// to the sentinel) → sorted in-cluster (neighbor, multiplicity) list.
type ViewRows = BTreeMap<u64, Vec<(u64, Mult)>>;

/// Memoized Λ sweep of one cluster.
///
/// A cluster's Λ content is a pure function of its view rows and sweep
/// radii: an entry U stays valid exactly while every member's row (which
/// encodes its degree, incident multiplicities, and terminal edges) is
/// unchanged, and any entry appearing or disappearing must contain a vertex
/// whose row changed.  Diffing rows therefore localizes a re-sweep to the
/// changed vertices, no matter how the two views are related.
#[derive(Debug, Clone)]
struct SweepMemo {
    rows: ViewRows,
    alpha_lo: Mult,
    alpha_hi: Mult,
    entries: Vec<MemoEntry>,
}

/// Caches shared by every instance of a pool: per-cluster sweep memos plus
/// conductance and decomposition results keyed by subgraph content (all
/// deterministic functions of their keys).
#[derive(Debug, Default)]
pub struct EngineCache {
    sweeps: BTreeMap<(usize, u64, Mult), SweepMemo>,
    certs: HashMap<u64, crate::expander::Conductance>,
    decomps: HashMap<u64, (Partition, crate::expander::DecompositionCertificate)>,
    pub hits: u64,
    pub misses: u64,
}

impl EngineCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.sweeps.clear();
        self.certs.clear();
        self.decomps.clear();
    }
}

/// Bound on retained sweep memos (each holds one cluster's rows).
const SWEEP_CAP: usize = 512;

/// Content hash of a subgraph plus a namespace tag and parameters.
fn content_key(g: &Multigraph, tag: u8, phi: Rat, threshold: usize) -> u64 {
    let mut h = DefaultHasher::new();
    h.write_u8(tag);
    h.write(g.canonical_serialize().as_bytes());
    h.write_i64(*phi.numer());
    h.write_i64(*phi.denom());
    h.write_u64(threshold as u64);
    h.finish()
}

fn conductance_cached(
    sub: &Multigraph,
    threshold: usize,
    cache: &mut EngineCache,
) -> crate::expander::Conductance {
    let k = content_key(sub, 1, Ratio::from_integer(0), threshold);
    if let Some(c) = cache.certs.get(&k) {
        return c.clone();
    }
    let c = conductance(sub, threshold);
    if cache.certs.len() >= CACHE_CAP {
        cache.certs.clear();
    }
    cache.certs.insert(k, c.clone());
    c
}

fn decompose_cached(
    g: &Multigraph,
    phi: Rat,
    threshold: usize,
    cache: &mut EngineCache,
) -> Result<(Partition, crate::expander::DecompositionCertificate)> {
    let k = content_key(g, 2, phi, threshold);
    if let Some(r) = cache.decomps.get(&k) {
        return Ok(r.clone());
    }
    let r = expander_decompose(g, phi, Ratio::from_integer(1), threshold)?;
    if cache.decomps.len() >= CACHE_CAP {
        cache.decomps.clear();
    }
    cache.decomps.insert(k, r.clone());
    Ok(r)
}

/// Decompose `g`, first trying a proposed partition: if every hint cluster
/// certifies at `phi` directly, the hint stands in for a fresh decomposition
/// (same guarantees — each cluster carries its own conductance witness and
/// disconnected or thin clusters fail `passes` and force the fallback).
fn decompose_with_hint(
    g: &Multigraph,
    hint: Option<&Partition>,
    phi: Rat,
    threshold: usize,
    cache: &mut EngineCache,
) -> Result<(Partition, crate::expander::DecompositionCertificate)> {
    if let Some(h) = hint {
        if h.is_cover_of(g) && h.clusters.iter().all(|s| !s.is_empty()) {
            let mut per_cluster = Vec::with_capacity(h.clusters.len());
            for set in &h.clusters {
                let sub = g.induced(set)?;
                let cond = conductance_cached(&sub, threshold, cache);
                if !crate::expander::passes(&cond, phi) {
                    per_cluster.clear();
                    break;
                }
                per_cluster.push(crate::expander::cert_of(&cond));
            }
            if per_cluster.len() == h.clusters.len() {
                prof::record("hint.accept", std::time::Instant::now());
                let intercluster: Mult = g
                    .edges()
                    .filter(|e| h.cluster_of[&e.u] != h.cluster_of[&e.v])
                    .map(|e| e.mult)
                    .sum();
                let cert = crate::expander::DecompositionCertificate { per_cluster, intercluster };
                return Ok((h.clone(), cert));
            }
        }
    }
    decompose_cached(g, phi, threshold, cache)
}

/// Canonical id of a view vertex: special terminals map to a sentinel (they
/// carry no stable identity across instances), real ids map to themselves.
fn canon(aux: &AuxGraph, v: VertexId) -> u64 {
    if aux.is_special(v) {
        u64::MAX
    } else {
        v.0
    }
}

/// Canonical adjacency rows of cluster `i`: one row per view member
/// (special terminal under the sentinel id) listing its in-cluster
/// (neighbor, multiplicity) pairs in canonical order.
fn view_rows(aux: &AuxGraph, i: usize) -> ViewRows {
    let mut rows: ViewRows = BTreeMap::new();
    let mut members: Vec<VertexId> =
        aux.partition.clusters[i].iter().copied().collect();
    members.push(aux.special[i]);
    for v in members {
        let mut row: Vec<(u64, Mult)> = aux
            .gstar
            .neighbors(v)
            .filter(|(w, _)| aux.cluster_of_star.get(w) == Some(&i))
            .map(|(w, rec)| (canon(aux, w), rec.mult))
            .collect();
        row.sort_unstable();
        rows.insert(canon(aux, v), row);
    }
    rows
}

// ---------------------------------------------------------------------------
// Direct minimum cut (anchor entries)
// ---------------------------------------------------------------------------

/// Deterministic global minimum cut of a small graph by repeated
/// maximum-adjacency contraction; returns (value, witness side) with the
/// witness chosen as the smaller-volume side (ties: the side containing the
/// smallest vertex).  Disconnected graphs give a 0-cut with a component as
/// witness.  Used for the anchor entries of terminal-free clusters — kept
/// separate from the test oracles on purpose.
pub fn direct_min_cut(g: &Multigraph) -> Option<(Mult, BTreeSet<VertexId>)> {
    let n = g.n();
    if n < 2 {
        return None;
    }
    let comps = g.components();
    if comps.len() > 1 {
        return Some((0, comps[0].clone()));
    }
    let ids: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut w = vec![vec![0 as Mult; n]; n];
    for e in g.edges() {
        let (iu, iv) = (index[&e.u], index[&e.v]);
        w[iu][iv] += e.mult;
        w[iv][iu] += e.mult;
    }
    let mut groups: Vec<BTreeSet<VertexId>> = ids.iter().map(|&v| BTreeSet::from([v])).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best: Option<(Mult, BTreeSet<VertexId>)> = None;
    while active.len() > 1 {
        // Maximum-adjacency order from the lowest active index.
        let mut order = vec![active[0]];
        let mut in_a = vec![false; n];
        in_a[active[0]] = true;
        let mut weight = vec![0 as Mult; n];
        for &x in &active[1..] {
            weight[x] = w[active[0]][x];
        }
        while order.len() < active.len() {
            let &next = active
                .iter()
                .filter(|&&x| !in_a[x])
                .max_by_key(|&&x| (weight[x], Reverse(x)))
                .unwrap();
            in_a[next] = true;
            order.push(next);
            for &x in &active {
                if !in_a[x] {
                    weight[x] += w[next][x];
                }
            }
        }
        let t = *order.last().unwrap();
        let s = order[order.len() - 2];
        let cut_of_phase = weight[t];
        if best.as_ref().map_or(true, |(b, _)| cut_of_phase < *b) {
            best = Some((cut_of_phase, groups[t].clone()));
        }
        // Merge t into s.
        let gt = std::mem::take(&mut groups[t]);
        groups[s].extend(gt);
        for x in 0..n {
            if x != s && x != t {
                w[s][x] += w[t][x];
                w[x][s] = w[s][x];
            }
        }
        active.retain(|&x| x != t);
    }
    let (val, side) = best?;
    // Report the smaller-volume side (ties: the side with the smallest id).
    let comp: BTreeSet<VertexId> = g.vertices().filter(|v| !side.contains(v)).collect();
    let (vs, vc) = (g.volume(&side).ok()?, g.volume(&comp).ok()?);
    let pick_side = match vs.cmp(&vc) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => side.iter().next() < comp.iter().next(),
    };
    Some((val, if pick_side { side } else { comp }))
}

// ---------------------------------------------------------------------------
// One-level minimum-cut structure
// ---------------------------------------------------------------------------

/// Per-cluster enumeration parameters, derived from the cluster's certified
/// conductance and terminal count.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterParams {
    /// Power-of-two quantized conductance lower bound (stable cache keys).
    pub phi_used: Rat,
    /// Volume cap (x3) for seeds other than the special terminal.
    pub alpha_lo: Mult,
    /// Volume cap (x3) for the special-terminal seed (covers the terminal
    /// side of every in-budget cut).
    pub alpha_hi: Mult,
}

/// One-level global minimum-cut structure: the terminal edge-connectivity
/// state plus the auxiliary graph and the Λ queue of candidate local cuts.
#[derive(Debug, Clone)]
pub struct OneLevelMinCutDS {
    pub ec: OneLevelECDS,
    pub aux: AuxGraph,
    pub lambda: LocalCutQueue,
    /// Target cut bound (fixed across grade degradation).
    pub c: Mult,
    /// Nominal schedule volume parameter (>= every per-cluster cap need).
    pub alpha: Mult,
    /// Parallel to `ec.partition.clusters`.
    pub params: Vec<ClusterParams>,
    /// True for a forced single-cluster top level (anchor-only Λ).
    pub forced_single: bool,
    /// Hierarchy level index, namespacing this level's sweep memos.
    pub tag: usize,
}

/// Volume of the cluster view P_* (all view degrees, t_P included).
fn view_volume(aux: &AuxGraph, i: usize) -> Mult {
    let mut vol = aux.view_degree(aux.special[i]);
    for &v in &aux.partition.clusters[i] {
        vol += aux.view_degree(v);
    }
    vol
}

fn cluster_params(aux: &AuxGraph, i: usize, c: Mult, phi_cert: Rat) -> ClusterParams {
    let vol = view_volume(aux, i);
    let phi_used = pow2_floor(phi_cert.max(Ratio::new(1, 256)));
    if vol <= COMPLETE_VOL {
        let a = (vol / 2 + 1).max(1);
        return ClusterParams { phi_used, alpha_lo: a, alpha_hi: a };
    }
    // Any in-budget cut leaves all terminals on one side; the terminal-free
    // side has volume at most min(c/φ, half the real cluster volume), so α
    // takes whichever bound is tighter.  The special-terminal seed covers
    // the terminal side, whose view volume additionally counts t_P's degree.
    let deg_t = aux.view_degree(aux.special[i]);
    let v_real = vol - deg_t;
    let phi_lo = rat_ceil(Ratio::from_integer(c) / phi_used) + c + 1;
    let cap_lo = rat_ceil(Ratio::new(v_real, 6)) + c + 1;
    let alpha_lo = phi_lo.min(cap_lo).max(1);
    let phi_hi = phi_lo + (2 * deg_t + 2) / 3 + 1;
    let cap_hi = rat_ceil(Ratio::new(v_real + 2 * deg_t, 6)) + c + 1;
    let alpha_hi = phi_hi.min(cap_hi).max(1);
    ClusterParams { phi_used, alpha_lo, alpha_hi }
}

/// Populate Λ entries for one cluster: an enumeration sweep over its real
/// vertices at alpha_lo plus the special-terminal seed at alpha_hi.
///
/// Terminal-free clusters are whole components, so their own minimum cut is
/// the only information the queue needs from them; they get a single exact
/// direct-minimum-cut anchor entry instead of a sweep (every sweep entry
/// would be a cut of the component, hence >= the anchor).  Forced
/// single-cluster levels likewise get the anchor only.
#[allow(clippy::too_many_arguments)]
fn populate_cluster(
    lambda: &mut LocalCutQueue,
    aux: &AuxGraph,
    ec: &OneLevelECDS,
    i: usize,
    params: &ClusterParams,
    c: Mult,
    forced: bool,
    tag: usize,
    use_memo: bool,
    cache: &mut EngineCache,
) -> Result<()> {
    let t = aux.special[i];
    let terminal_free = ec.clusters[i].terminals.is_empty();
    if !forced && !terminal_free {
        let t_vr = std::time::Instant::now();
        let rows = view_rows(aux, i);
        prof::record("lam.view_rows", t_vr);
        let min_real = *aux.partition.clusters[i].iter().next().unwrap();
        let key = (tag, min_real.0, c);
        let mut entries: BTreeMap<EntryKey, LocalCutEntry> = BTreeMap::new();
        let mut diffed = false;
        if use_memo {
            if let Some(m) = cache.sweeps.get(&key) {
                if m.alpha_lo == params.alpha_lo {
                    // Rows whose content moved since the memoized sweep.
                    let mut delta: BTreeSet<u64> = BTreeSet::new();
                    for (k, r) in &m.rows {
                        if rows.get(k) != Some(r) {
                            delta.insert(*k);
                        }
                    }
                    delta.extend(rows.keys().filter(|k| !m.rows.contains_key(k)));
                    // Terminal-side sets are regenerated wholesale by one
                    // sweep from t whenever anything changed (every such set
                    // contains t); terminal-free sets only when a member's
                    // row moved, at the cheaper alpha_lo budget.
                    let redo_t = !delta.is_empty() || m.alpha_hi != params.alpha_hi;
                    for e in &m.entries {
                        let stale = (e.has_special && redo_t)
                            || e.u_real.iter().any(|v| delta.contains(&v.0));
                        if !stale {
                            let ent = LocalCutEntry {
                                cluster: t,
                                u_real: e.u_real.clone(),
                                has_special: e.has_special,
                                cut_size: e.cut_size,
                            };
                            entries.insert(ent.key(), ent);
                        }
                    }
                    for &d in &delta {
                        let y = VertexId(d);
                        if d == u64::MAX || aux.cluster_of_star.get(&y) != Some(&i) {
                            continue;
                        }
                        let t_seed = std::time::Instant::now();
                        for u in enumerate_cuts(aux, y, params.alpha_lo, c)? {
                            if let Some(ent) = LocalCutEntry::from_set(aux, &u)? {
                                entries.insert(ent.key(), ent);
                            }
                        }
                        prof::record("lam.regen_real", t_seed);
                    }
                    if redo_t {
                        let t_seed = std::time::Instant::now();
                        for e in entries_for_vertex_opts(aux, t, params.alpha_hi, c, false)? {
                            entries.insert(e.key(), e);
                        }
                        prof::record("lam.regen_tseed", t_seed);
                    }
                    diffed = true;
                }
            }
        }
        if !diffed {
            let t_fs = std::time::Instant::now();
            for &v in &aux.partition.clusters[i] {
                for e in entries_for_vertex_opts(aux, v, params.alpha_lo, c, true)? {
                    entries.insert(e.key(), e);
                }
            }
            for e in entries_for_vertex_opts(aux, t, params.alpha_hi, c, false)? {
                entries.insert(e.key(), e);
            }
            prof::record("lam.full_sweep", t_fs);
        }
        if use_memo {
            let t_st = std::time::Instant::now();
            if diffed {
                cache.hits += 1;
            } else {
                cache.misses += 1;
            }
            if cache.sweeps.len() >= SWEEP_CAP {
                cache.sweeps.clear();
            }
            cache.sweeps.insert(
                key,
                SweepMemo {
                    rows,
                    alpha_lo: params.alpha_lo,
                    alpha_hi: params.alpha_hi,
                    entries: entries
                        .values()
                        .map(|e| MemoEntry {
                            u_real: e.u_real.clone(),
                            has_special: e.has_special,
                            cut_size: e.cut_size,
                        })
                        .collect(),
                },
            );
            prof::record("lam.store", t_st);
        }
        for e in entries.into_values() {
            lambda.insert(e);
        }
    }
    if terminal_free {
        let sub = ec.g.induced(&aux.partition.clusters[i])?;
        if let Some((val, side)) = direct_min_cut(&sub) {
            if val <= c && !side.is_empty() && side.len() < sub.n() {
                lambda.insert(LocalCutEntry {
                    cluster: t,
                    u_real: side,
                    has_special: false,
                    cut_size: val,
                });
            }
        }
    }
    Ok(())
}

fn build_lambda(
    ds: &OneLevelMinCutDS,
    use_memo: bool,
    cache: &mut EngineCache,
) -> Result<LocalCutQueue> {
    let mut lambda = LocalCutQueue::new();
    for i in 0..ds.ec.partition.clusters.len() {
        populate_cluster(
            &mut lambda,
            &ds.aux,
            &ds.ec,
            i,
            &ds.params[i],
            ds.c,
            ds.forced_single,
            ds.tag,
            use_memo,
            cache,
        )?;
    }
    Ok(lambda)
}

/// Rebuild the Λ queue of a level from scratch against its live state,
/// bypassing the sweep memos; the (memo-assisted) incremental maintenance
/// must produce exactly this queue.
pub fn rebuild_lambda(ds: &OneLevelMinCutDS, cache: &mut EngineCache) -> Result<LocalCutQueue> {
    build_lambda(ds, false, cache)
}

/// Initialize a one-level global minimum-cut structure (memo namespace 0).
pub fn mc_one_init(
    g: &Multigraph,
    c: Mult,
    phi: Rat,
    grade: Mult,
    gamma: Mult,
    alpha: Mult,
    threshold: usize,
    cache: &mut EngineCache,
) -> Result<OneLevelMinCutDS> {
    mc_one_init_tagged(g, c, phi, grade, gamma, alpha, threshold, 0, None, cache)
}

/// Initialize a one-level structure at hierarchy level `tag`, optionally
/// seeded with a partition hint (used when re-initializing after a window of
/// updates: the previous partition usually still certifies).
#[allow(clippy::too_many_arguments)]
fn mc_one_init_tagged(
    g: &Multigraph,
    c: Mult,
    phi: Rat,
    grade: Mult,
    gamma: Mult,
    alpha: Mult,
    threshold: usize,
    tag: usize,
    hint: Option<&Partition>,
    cache: &mut EngineCache,
) -> Result<OneLevelMinCutDS> {
    if grade < c || gamma <= grade || Ratio::from_integer(alpha) < Ratio::from_integer(grade) / phi
    {
        return Err(DynCutError::ParameterViolation(format!(
            "mc_one_init: need grade >= c, gamma > grade, alpha >= grade/phi \
             (c={c}, grade={grade}, gamma={gamma}, alpha={alpha}, phi={phi})"
        )));
    }
    let (partition, cert) = if g.n() == 0 {
        (
            Partition { clusters: Vec::new(), cluster_of: BTreeMap::new() },
            crate::expander::DecompositionCertificate { per_cluster: Vec::new(), intercluster: 0 },
        )
    } else {
        decompose_with_hint(g, hint, phi, threshold, cache)?
    };
    let ec = ec_init_with_partition(g, partition, grade, phi, gamma, threshold)?;
    let aux = build_aux(g, &ec.partition)?;
    let params: Vec<ClusterParams> = (0..ec.partition.clusters.len())
        .map(|i| cluster_params(&aux, i, c, cert.per_cluster[i].phi_witness.max(phi)))
        .collect();
    let mut ds = OneLevelMinCutDS {
        ec,
        aux,
        lambda: LocalCutQueue::new(),
        c,
        alpha,
        params,
        forced_single: false,
        tag,
    };
    ds.lambda = build_lambda(&ds, true, cache)?;
    Ok(ds)
}

/// Forced single-cluster top level: the whole graph as one cluster with an
/// anchor-only Λ (its direct minimum cut, exact), used when compression
/// stalls or the level cap is reached.
pub fn mc_one_init_forced(
    g: &Multigraph,
    c: Mult,
    phi: Rat,
    grade: Mult,
    gamma: Mult,
    alpha: Mult,
    cache: &mut EngineCache,
) -> Result<OneLevelMinCutDS> {
    let partition = Partition::whole(g);
    let ec = ec_init_with_partition(g, partition, grade, phi, gamma, crate::expander::EXHAUSTIVE_THRESHOLD)?;
    let aux = build_aux(g, &ec.partition)?;
    let params: Vec<ClusterParams> = (0..ec.partition.clusters.len())
        .map(|i| cluster_params(&aux, i, c, Ratio::new(1, 256)))
        .collect();
    let mut ds = OneLevelMinCutDS {
        ec,
        aux,
        lambda: LocalCutQueue::new(),
        c,
        alpha,
        params,
        forced_single: true,
        tag: usize::MAX,
    };
    ds.lambda = rebuild_lambda(&ds, cache)?;
    Ok(ds)
}

/// Core one-level update against the authoritative post-update graph `g2`
/// (whose edge ids must be the true ones — at levels above 0 they come from
/// the lower level's new sparsifier, not from replaying the diff).
///
/// Degrades the grade to `c_new`; clusters that lose conductance below
/// phi/6 under vertex extraction are split further by decomposition; Λ is
/// refreshed cluster-granularly.  Returns the new state and the sparsifier
/// diff feeding the next level.
/// True when `set` is the old cluster `j` minus vertices of total degree at
/// most φ·vol/4 — extraction small enough that the φ/6 margin of the old
/// certificate still covers the remainder.
fn small_extraction(ec: &OneLevelECDS, j: usize, set: &BTreeSet<VertexId>, phi_used: Rat) -> bool {
    let old = &ec.clusters[j].vertices;
    if !set.is_subset(old) {
        return false;
    }
    let removed: Mult = old.difference(set).map(|&v| ec.g.degree(v)).sum();
    let vol: Mult = old.iter().map(|&v| ec.g.degree(v)).sum();
    Ratio::from_integer(4 * removed) <= phi_used * Ratio::from_integer(vol)
}

pub fn mc_one_update_to(
    ds: &OneLevelMinCutDS,
    g2: &Multigraph,
    seq: &UpdateSeq,
    c_new: Mult,
    cache: &mut EngineCache,
) -> Result<(OneLevelMinCutDS, UpdateSeq)> {
    let t_all = std::time::Instant::now();
    let phi6 = ds.ec.phi / Ratio::from_integer(6);
    let touched: BTreeSet<VertexId> = seq.iter().flat_map(|op| op.involved()).collect();
    let base_sets = remainder_sets(&ds.ec, g2, &touched);
    // Re-certify changed remainders; split the ones that degraded too far.
    let mut refined: Vec<(BTreeSet<VertexId>, Option<usize>, Rat)> = Vec::new();
    for (set, lineage) in base_sets {
        match lineage {
            Some(j) if ds.ec.clusters[j].vertices == set => {
                refined.push((set, lineage, ds.params[j].phi_used));
            }
            _ if set.len() == 1 => {
                refined.push((set, lineage, Ratio::from_integer(1)));
            }
            // Spectral-tier clusters (certificates are heuristic there
            // anyway) keep their certificate when the extracted volume is
            // within the φ·vol/4 slack the φ/6 margin tolerates.
            Some(j)
                if set.len() > crate::expander::EIGEN_THRESHOLD
                    && small_extraction(&ds.ec, j, &set, ds.params[j].phi_used) =>
            {
                refined.push((set, lineage, ds.params[j].phi_used));
            }
            _ => {
                let sub = g2.induced(&set)?;
                let cond = conductance_cached(&sub, ds.ec.threshold, cache);
                if passes(&cond, phi6) {
                    refined.push((set, lineage, cert_of(&cond).phi_witness.max(phi6)));
                } else {
                    let (p, cert) = decompose_cached(&sub, phi6, ds.ec.threshold, cache)?;
                    for (k, sc) in p.clusters.into_iter().enumerate() {
                        refined.push((sc, lineage, cert.per_cluster[k].phi_witness.max(phi6)));
                    }
                }
            }
        }
    }
    refined.sort_by_key(|(s, _, _)| *s.iter().next().unwrap());
    prof::record("upd.certify", t_all);
    let new_sets: Vec<(BTreeSet<VertexId>, Option<usize>)> =
        refined.iter().map(|(s, l, _)| (s.clone(), *l)).collect();
    let t_ec = std::time::Instant::now();
    let outcome = ec_rebuild(&ds.ec, g2, new_sets, c_new)?;
    prof::record("upd.ec_rebuild", t_ec);
    // Special-terminal ids survive exactly when an old cluster has a unique
    // descendant; everything else gets a fresh identity (and a fresh sweep).
    let mut descendants: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, l) in outcome.lineage.iter().enumerate() {
        if let Some(j) = l {
            descendants.entry(*j).or_default().push(i);
        }
    }
    let mut keep: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, ds_list) in &descendants {
        if ds_list.len() == 1 {
            keep.insert(ds_list[0], *j);
        }
    }
    let t_aux = std::time::Instant::now();
    let aux2 = update_aux(&ds.aux, g2, &outcome.ds.partition, &keep)?;
    let params2: Vec<ClusterParams> = (0..refined.len())
        .map(|i| cluster_params(&aux2, i, ds.c, refined[i].2))
        .collect();
    prof::record("upd.aux_params", t_aux);
    // Λ refresh.
    let t_lam = std::time::Instant::now();
    let mut lambda2 = ds.lambda.clone();
    let kept_old: BTreeSet<usize> = keep.values().copied().collect();
    for j in 0..ds.ec.partition.clusters.len() {
        if !kept_old.contains(&j) {
            lambda2.remove_cluster(ds.aux.special[j]);
        }
    }
    let ec2 = &outcome.ds;
    for i in 0..ec2.partition.clusters.len() {
        let unchanged = keep.get(&i).map_or(false, |&j| {
            ds.ec.clusters[j].vertices == ec2.clusters[i].vertices
                && ds.ec.clusters[j].terminals == ec2.clusters[i].terminals
        });
        if unchanged {
            continue;
        }
        if keep.contains_key(&i) {
            lambda2.remove_cluster(aux2.special[i]);
        }
        populate_cluster(
            &mut lambda2,
            &aux2,
            ec2,
            i,
            &params2[i],
            ds.c,
            ds.forced_single,
            ds.tag,
            true,
            cache,
        )?;
    }
    prof::record("upd.lambda", t_lam);
    prof::record("upd.total", t_all);
    let ds2 = OneLevelMinCutDS {
        ec: outcome.ds,
        aux: aux2,
        lambda: lambda2,
        c: ds.c,
        alpha: ds.alpha,
        params: params2,
        forced_single: ds.forced_single,
        tag: ds.tag,
    };
    Ok((ds2, outcome.diff))
}

/// Inverse of the grade recurrence: the x >= 1 with x(x+2) = grade.
fn inv_grade(grade: Mult) -> Result<Mult> {
    let x = ((grade + 1) as f64).sqrt().round() as Mult - 1;
    if x >= 1 && x * (x + 2) == grade {
        Ok(x)
    } else {
        Err(DynCutError::ParameterViolation(format!(
            "grade {grade} admits no further degradation step"
        )))
    }
}

/// Spec-shape one-level update: applies `seq` to the stored graph and
/// degrades the grade one recurrence step.  An empty batch is a no-op.
pub fn mc_one_update(
    ds: &OneLevelMinCutDS,
    seq: &UpdateSeq,
    cache: &mut EngineCache,
) -> Result<(OneLevelMinCutDS, UpdateSeq)> {
    if seq.is_empty() {
        return Ok((ds.clone(), UpdateSeq::new()));
    }
    let c_new = inv_grade(ds.ec.grade)?;
    let mut g2 = ds.ec.g.clone();
    g2.apply_seq(seq)?;
    mc_one_update_to(ds, &g2, seq, c_new, cache)
}

// ---------------------------------------------------------------------------
// Multi-level structure
// ---------------------------------------------------------------------------

/// Multi-level global minimum-cut structure: level i+1's graph is the
/// sparsifier of level i, ending in a single-cluster (possibly forced) top.
#[derive(Debug, Clone)]
pub struct MultiLevelMinCutDS {
    pub levels: Vec<OneLevelMinCutDS>,
    pub schedule: ParameterSchedule,
    pub c: Mult,
    pub threshold: usize,
    pub max_levels: usize,
    pub force_top: bool,
    /// Batches applied since initialization; all levels share this stage.
    pub stage: usize,
}

/// Build levels starting from `cur` at schedule stage `stage` until the
/// partition is a single cluster, forcing a top on stalls / the level cap.
#[allow(clippy::too_many_arguments)]
fn extend_levels(
    levels: &mut Vec<OneLevelMinCutDS>,
    mut cur: Multigraph,
    stage: usize,
    schedule: &ParameterSchedule,
    c: Mult,
    threshold: usize,
    max_levels: usize,
    force_top: bool,
    mut hint: Option<&Partition>,
    cache: &mut EngineCache,
) -> Result<()> {
    let (grade, phi) = (schedule.c_seq[stage], schedule.phi_seq[stage]);
    loop {
        let level = mc_one_init_tagged(
            &cur,
            c,
            phi,
            grade,
            schedule.gamma,
            schedule.alpha,
            threshold,
            levels.len(),
            hint.take(),
            cache,
        )?;
        let single = level.ec.partition.clusters.len() <= 1;
        let next = level.ec.sparsifier.h.clone();
        let stall = !single && next.n() >= cur.n();
        levels.push(level);
        if single {
            return Ok(());
        }
        if stall || levels.len() + 1 >= max_levels {
            if !force_top {
                return Err(DynCutError::LevelCapExceeded(format!(
                    "no compression at depth {} (cap {max_levels})",
                    levels.len()
                )));
            }
            levels.push(mc_one_init_forced(
                &next,
                c,
                phi,
                grade,
                schedule.gamma,
                schedule.alpha,
                cache,
            )?);
            return Ok(());
        }
        cur = next;
    }
}

/// Initialize the multi-level structure.
pub fn mc_multi_init(
    g: &Multigraph,
    schedule: &ParameterSchedule,
    c: Mult,
    threshold: usize,
    max_levels: usize,
    force_top: bool,
    cache: &mut EngineCache,
) -> Result<MultiLevelMinCutDS> {
    mc_multi_init_hinted(g, schedule, c, threshold, max_levels, force_top, None, cache)
}

/// [`mc_multi_init`] with a level-0 partition hint (see
/// [`decompose_with_hint`]); upper levels always decompose from scratch.
#[allow(clippy::too_many_arguments)]
fn mc_multi_init_hinted(
    g: &Multigraph,
    schedule: &ParameterSchedule,
    c: Mult,
    threshold: usize,
    max_levels: usize,
    force_top: bool,
    hint: Option<&Partition>,
    cache: &mut EngineCache,
) -> Result<MultiLevelMinCutDS> {
    let mut levels = Vec::new();
    extend_levels(
        &mut levels,
        g.clone(),
        0,
        schedule,
        c,
        threshold,
        max_levels,
        force_top,
        hint,
        cache,
    )?;
    Ok(MultiLevelMinCutDS {
        levels,
        schedule: schedule.clone(),
        c,
        threshold,
        max_levels,
        force_top,
        stage: 0,
    })
}

/// Apply one batch: cascade the update level by level while each level's
/// diff stays below n^(i)/ln(n^(i)); at the first violation (or a forced
/// top) the suffix is rebuilt from the updated level-i graph at the
/// degraded stage parameters.
pub fn mc_multi_update(
    mut mds: MultiLevelMinCutDS,
    seq: &UpdateSeq,
    cache: &mut EngineCache,
) -> Result<MultiLevelMinCutDS> {
    if seq.is_empty() {
        return Ok(mds);
    }
    if mds.stage + 1 > mds.schedule.zeta {
        return Err(DynCutError::ScheduleExhausted(format!(
            "instance already consumed {} of {} batches",
            mds.stage, mds.schedule.zeta
        )));
    }
    let new_stage = mds.stage + 1;
    let schedule = mds.schedule.clone();
    let c_new = schedule.c_seq[new_stage];
    let mut cur_seq = seq.clone();
    let mut gt = {
        let mut g = mds.levels[0].ec.g.clone();
        g.apply_seq(&cur_seq)?;
        g
    };
    let mut i = 0;
    while i < mds.levels.len() {
        let n_i = mds.levels[i].ec.g.n();
        let thresh = (n_i as f64 / ((n_i.max(3)) as f64).ln()).floor() as usize;
        if cur_seq.len() > thresh || mds.levels[i].forced_single {
            // Rebuild the suffix from the updated level-i graph at the
            // degraded φ of the new stage.
            mds.levels.truncate(i);
            extend_levels(
                &mut mds.levels,
                gt,
                new_stage,
                &schedule,
                mds.c,
                mds.threshold,
                mds.max_levels,
                mds.force_top,
                None,
                cache,
            )?;
            mds.stage = new_stage;
            return Ok(mds);
        }
        let (lev2, diff) = mc_one_update_to(&mds.levels[i], &gt, &cur_seq, c_new, cache)?;
        let single = lev2.ec.partition.clusters.len() <= 1;
        let next_g = lev2.ec.sparsifier.h.clone();
        mds.levels[i] = lev2;
        if single {
            mds.levels.truncate(i + 1);
            mds.stage = new_stage;
            return Ok(mds);
        }
        if i + 1 == mds.levels.len() {
            // The top is no longer a single cluster: grow the hierarchy.
            extend_levels(
                &mut mds.levels,
                next_g,
                new_stage,
                &schedule,
                mds.c,
                mds.threshold,
                mds.max_levels,
                mds.force_top,
                None,
                cache,
            )?;
            mds.stage = new_stage;
            return Ok(mds);
        }
        cur_seq = diff;
        gt = next_g;
        i += 1;
    }
    mds.stage = new_stage;
    Ok(mds)
}

// TEMP: phase profiler, enabled with DYNCUT_PROF=1; remove before release.
#[doc(hidden)]
pub mod prof {
    use std::collections::BTreeMap;
    use std::sync::Mutex;
    use std::time::Instant;

    pub static STATS: Mutex<BTreeMap<&'static str, (u128, u64)>> = Mutex::new(BTreeMap::new());

    pub fn on() -> bool {
        std::env::var("DYNCUT_PROF").is_ok()
    }

    pub fn record(name: &'static str, t0: Instant) {
        if on() {
            let mut s = STATS.lock().unwrap();
            let e = s.entry(name).or_insert((0, 0));
            e.0 += t0.elapsed().as_nanos();
            e.1 += 1;
        }
    }

    pub fn dump() {
        if on() {
            for (k, (ns, n)) in STATS.lock().unwrap().iter() {
                eprintln!(
                    "prof {k}: total={:.3}s calls={n} avg={:.3}ms",
                    *ns as f64 / 1e9,
                    *ns as f64 / 1e6 / (*n).max(1) as f64
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Query
// ---------------------------------------------------------------------------

/// Result of `query_min_cut`: `size` is None when the minimum cut exceeds c.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub size: Option<Mult>,
    /// Cut-set triples of G^(0).
    pub cutset: Vec<(VertexId, VertexId, Mult)>,
    /// Smaller side of the bipartition (components of G^(0) minus cut-set).
    pub side_hint: Vec<VertexId>,
}

impl QueryResult {
    pub fn to_json(&self) -> String {
        match self.size {
            None => serde_json::json!({"size": null}).to_string(),
            Some(k) => {
                let cutset: Vec<[i64; 3]> = self
                    .cutset
                    .iter()
                    .map(|&(u, v, m)| [u.0 as i64, v.0 as i64, m])
                    .collect();
                let side: Vec<u64> = self.side_hint.iter().map(|v| v.0).collect();
                serde_json::json!({"size": k, "cutset": cutset, "side_hint": side}).to_string()
            }
        }
    }
}

/// Boundary cut-set of a Λ entry within its cluster view (real pairs only;
/// special-terminal edges are internal to every stored entry by invariant).
fn entry_cutset(level: &OneLevelMinCutDS, e: &LocalCutEntry) -> Result<Vec<(VertexId, VertexId, Mult)>> {
    let aux = &level.aux;
    let ci = *aux
        .cluster_of_star
        .get(e.u_real.iter().next().ok_or_else(|| {
            DynCutError::InternalInconsistency("empty Λ entry".into())
        })?)
        .ok_or_else(|| DynCutError::InternalInconsistency("entry vertex outside aux".into()))?;
    let mut out = Vec::new();
    let mut total = 0;
    for &x in &e.u_real {
        for (w, rec) in aux.gstar.neighbors(x) {
            if aux.cluster_of_star.get(&w) == Some(&ci)
                && !aux.is_special(w)
                && !e.u_real.contains(&w)
            {
                let (a, b) = if x < w { (x, w) } else { (w, x) };
                out.push((a, b, rec.mult));
                total += rec.mult;
            }
        }
    }
    if total != e.cut_size {
        return Err(DynCutError::InternalInconsistency(format!(
            "entry cut-size {} does not match boundary {total}",
            e.cut_size
        )));
    }
    Ok(out)
}

/// Check a candidate cut-set exists, pair for pair, in the given graph, and
/// carries no gamma edge.
fn validate_lift(g: &Multigraph, cutset: &[(VertexId, VertexId, Mult)]) -> Result<()> {
    for &(u, v, m) in cutset {
        let rec = g.edge(u, v).ok_or_else(|| {
            DynCutError::InternalInconsistency(format!("cut edge ({u},{v}) missing after lift"))
        })?;
        if rec.mult != m {
            return Err(DynCutError::InternalInconsistency(format!(
                "cut edge ({u},{v}) multiplicity drifted: {m} vs {}",
                rec.mult
            )));
        }
        if rec.id.origin == crate::graph::EdgeOrigin::ForestGamma {
            return Err(DynCutError::InternalInconsistency(format!(
                "gamma edge ({u},{v}) in a candidate cut-set"
            )));
        }
    }
    Ok(())
}

/// Level-descending minimum-cut query.
pub fn query_min_cut(mds: &MultiLevelMinCutDS) -> Result<QueryResult> {
    let t_q = std::time::Instant::now();
    let r = query_min_cut_inner(mds);
    prof::record("query", t_q);
    r
}

fn query_min_cut_inner(mds: &MultiLevelMinCutDS) -> Result<QueryResult> {
    let g0 = &mds.levels[0].ec.g;
    if g0.n() == 0 {
        return Ok(QueryResult { size: None, cutset: Vec::new(), side_hint: Vec::new() });
    }
    let comps = g0.components();
    if comps.len() > 1 {
        let side = comps
            .iter()
            .min_by_key(|c| (c.len(), *c.iter().next().unwrap()))
            .unwrap();
        return Ok(QueryResult {
            size: Some(0),
            cutset: Vec::new(),
            side_hint: side.iter().copied().collect(),
        });
    }
    let mut best: Option<(Mult, Vec<(VertexId, VertexId, Mult)>)> = None;
    for i in (0..mds.levels.len()).rev() {
        let level = &mds.levels[i];
        // Lift the surviving candidate into this level's graph (identity on
        // pairs; provenance guarantees presence).
        if let Some((_, cutset)) = &best {
            validate_lift(&level.ec.g, cutset)?;
        }
        // Skip 0-size entries: with G^(0) connected (handled above) they can
        // only describe a whole terminal-free component-cluster, not a cut.
        if let Some(e) = level.lambda.iter().find(|e| e.cut_size >= 1) {
            if best.as_ref().map_or(true, |(b, _)| e.cut_size < *b) {
                let cutset = entry_cutset(level, e)?;
                validate_lift(&level.ec.g, &cutset)?;
                best = Some((e.cut_size, cutset));
            }
        }
    }
    let Some((size, cutset)) = best else {
        return Ok(QueryResult { size: None, cutset: Vec::new(), side_hint: Vec::new() });
    };
    if size > mds.c {
        return Ok(QueryResult { size: None, cutset: Vec::new(), side_hint: Vec::new() });
    }
    // Recover the bipartition: components of G^(0) minus the cut-set.
    let skip: BTreeSet<(VertexId, VertexId)> = cutset.iter().map(|&(u, v, _)| (u, v)).collect();
    let comps = g0.components_without(&skip);
    if comps.len() < 2 {
        return Err(DynCutError::InternalInconsistency(
            "reported cut-set does not disconnect the graph".into(),
        ));
    }
    let side = comps
        .iter()
        .min_by_key(|c| (c.len(), *c.iter().next().unwrap()))
        .unwrap();
    Ok(QueryResult { size: Some(size), cutset, side_hint: side.iter().copied().collect() })
}

// ---------------------------------------------------------------------------
// Instance pool (offline batches -> fully dynamic)
// ---------------------------------------------------------------------------

/// Rotating pool of multi-level instances.  Snapshot j is rebuilt every
/// ceil(w^{j/ξ}) operations from snapshot j+1 plus one batch (snapshot ξ is
/// re-initialized from scratch); the serving instance is snapshot 1 plus the
/// pending tail, so it never accumulates more than ξ batches.
#[derive(Debug)]
pub struct InstancePool {
    pub c: Mult,
    pub xi: usize,
    pub w: usize,
    pub schedule: ParameterSchedule,
    pub threshold: usize,
    pub max_levels: usize,
    pub force_top: bool,
    /// The up-to-date graph.
    pub g: Multigraph,
    log: Vec<UpdateOp>,
    /// snapshots[j-1] holds (instance, base op index) for pool level j.
    snapshots: Vec<(MultiLevelMinCutDS, usize)>,
    periods: Vec<usize>,
    current: MultiLevelMinCutDS,
    pub cache: EngineCache,
}

/// Initialize the pool.  Requires ξ >= 1, ξ <= ζ, and w >= 2·6^ξ.
#[allow(clippy::too_many_arguments)]
pub fn fd_init(
    g: &Multigraph,
    c: Mult,
    xi: usize,
    w: usize,
    zeta_override: Option<usize>,
    phi_floor: Rat,
    k_phi: u32,
    threshold: usize,
    max_levels: usize,
    force_top: bool,
) -> Result<InstancePool> {
    if xi < 1 {
        return Err(DynCutError::ParameterViolation(format!("fd_init: xi={xi} must be >= 1")));
    }
    let min_w = 2 * 6usize.pow(xi as u32);
    if w < min_w {
        return Err(DynCutError::ParameterViolation(format!(
            "fd_init: w={w} must be >= 2*6^xi = {min_w}"
        )));
    }
    let zeta_needed = zeta_override.map(|z| z.max(xi)).or(Some(xi.max(1)));
    let schedule = schedule_params(c, g.n().max(2), zeta_needed, phi_floor, k_phi)?;
    if xi > schedule.zeta {
        return Err(DynCutError::ParameterViolation(format!(
            "fd_init: xi={xi} exceeds schedule depth zeta={}",
            schedule.zeta
        )));
    }
    let mut cache = EngineCache::new();
    let base = mc_multi_init(g, &schedule, c, threshold, max_levels, force_top, &mut cache)?;
    let periods: Vec<usize> = (1..=xi)
        .map(|j| (w as f64).powf(j as f64 / xi as f64).ceil().max(1.0) as usize)
        .collect();
    let snapshots: Vec<(MultiLevelMinCutDS, usize)> =
        (1..=xi).map(|_| (base.clone(), 0)).collect();
    Ok(InstancePool {
        c,
        xi,
        w,
        schedule,
        threshold,
        max_levels,
        force_top,
        g: g.clone(),
        log: Vec::new(),
        snapshots,
        periods,
        current: base,
        cache,
    })
}

/// [`fd_init`] with every knob taken from a [`Config`].
pub fn fd_init_cfg(g: &Multigraph, cfg: &crate::config::Config) -> Result<InstancePool> {
    fd_init(
        g,
        cfg.c,
        cfg.xi,
        cfg.w,
        cfg.zeta,
        cfg.phi_floor,
        cfg.k_phi,
        cfg.exhaustive_threshold,
        cfg.max_levels,
        cfg.force_top,
    )
}

/// Partition hint for a window re-initialization: the outgoing level-0
/// partition with every extracted singleton folded back into its heaviest
/// adjacent multi-vertex cluster.  Vertices touching no such cluster stay
/// singletons.  The hint is only a proposal — `decompose_with_hint`
/// re-certifies every cluster before accepting it.
fn reinit_hint(prev: &MultiLevelMinCutDS, g: &Multigraph) -> Option<Partition> {
    let old = &prev.levels.first()?.ec.partition;
    let mut label: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, set) in old.clusters.iter().enumerate() {
        if set.len() > 1 {
            for &v in set {
                if g.contains_vertex(v) {
                    label.insert(v, i);
                }
            }
        }
    }
    for v in g.vertices() {
        if label.contains_key(&v) {
            continue;
        }
        let mut weight: BTreeMap<usize, Mult> = BTreeMap::new();
        for (w, rec) in g.neighbors(v) {
            if let Some(&i) = label.get(&w) {
                *weight.entry(i).or_insert(0) += rec.mult;
            }
        }
        if let Some((&i, _)) = weight.iter().max_by_key(|&(_, &m)| m) {
            label.insert(v, i);
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
    let mut singles: Vec<BTreeSet<VertexId>> = Vec::new();
    for v in g.vertices() {
        match label.get(&v) {
            Some(&i) => {
                groups.entry(i).or_default().insert(v);
            }
            None => singles.push(BTreeSet::from([v])),
        }
    }
    let mut clusters: Vec<BTreeSet<VertexId>> = groups.into_values().collect();
    clusters.extend(singles);
    if clusters.is_empty() {
        return None;
    }
    Some(Partition::from_clusters(clusters))
}

/// Apply one operation and refresh the serving instance.
pub fn fd_update(pool: &mut InstancePool, op: UpdateOp) -> Result<()> {
    pool.g.apply_update(op)?;
    pool.log.push(op);
    let t = pool.log.len();
    for j in (1..=pool.xi).rev() {
        if t % pool.periods[j - 1] != 0 {
            continue;
        }
        if j == pool.xi {
            let t0 = std::time::Instant::now();
            let hint = reinit_hint(&pool.current, &pool.g);
            pool.snapshots[j - 1] = (
                mc_multi_init_hinted(
                    &pool.g,
                    &pool.schedule,
                    pool.c,
                    pool.threshold,
                    pool.max_levels,
                    pool.force_top,
                    hint.as_ref(),
                    &mut pool.cache,
                )?,
                t,
            );
            prof::record("fd.reinit", t0);
        } else {
            let (base, base_t) = &pool.snapshots[j];
            let batch: UpdateSeq = pool.log[*base_t..t].to_vec();
            let inst = mc_multi_update(base.clone(), &batch, &mut pool.cache)?;
            pool.snapshots[j - 1] = (inst, t);
        }
    }
    let (base, base_t) = &pool.snapshots[0];
    let pending: UpdateSeq = pool.log[*base_t..t].to_vec();
    let t0 = std::time::Instant::now();
    let cloned = base.clone();
    prof::record("fd.clone", t0);
    let t0 = std::time::Instant::now();
    pool.current = if pending.is_empty() {
        cloned
    } else {
        mc_multi_update(cloned, &pending, &mut pool.cache)?
    };
    prof::record("fd.replay", t0);
    Ok(())
}

/// The designated up-to-date instance.
pub fn fd_current(pool: &InstancePool) -> &MultiLevelMinCutDS {
    &pool.current
}
