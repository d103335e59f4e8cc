//! Unit tests for conductance, expander decomposition, and pruning.

use std::collections::BTreeSet;

use num_rational::Ratio;

use dyncut::expander::{
    conductance, expander_decompose, expander_prune, verify_decomposition, Conductance, Partition,
    Rat, VerifyOutcome,
};
use dyncut::graph::{Multigraph, VertexId};
use dyncut::DynCutError;

const THRESH: usize = 18;

fn v(i: u64) -> VertexId {
    VertexId(i)
}

fn build(vertices: std::ops::RangeInclusive<u64>, edges: &[(u64, u64)]) -> Multigraph {
    let mut g = Multigraph::new();
    for i in vertices {
        g.insert_vertex(v(i)).unwrap();
    }
    for &(a, b) in edges {
        g.insert_edge(v(a), v(b), 1).unwrap();
    }
    g
}

fn cycle(n: u64) -> Multigraph {
    let edges: Vec<(u64, u64)> = (1..=n).map(|i| (i, i % n + 1)).collect();
    build(1..=n, &edges)
}

fn two_triangle_bridge() -> Multigraph {
    build(1..=6, &[(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)])
}

fn complete(n: u64) -> Multigraph {
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            edges.push((a, b));
        }
    }
    build(1..=n, &edges)
}

#[test]
fn conductance_c4_is_half() {
    match conductance(&cycle(4), THRESH) {
        Conductance::Exact { value, .. } => assert_eq!(value, Ratio::new(1, 2)),
        other => panic!("expected exact conductance, got {other:?}"),
    }
}

#[test]
fn conductance_k2_is_one() {
    match conductance(&build(1..=2, &[(1, 2)]), THRESH) {
        Conductance::Exact { value, .. } => assert_eq!(value, Ratio::from_integer(1)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn conductance_disconnected_is_zero() {
    match conductance(&build(1..=4, &[(1, 2), (3, 4)]), THRESH) {
        Conductance::Exact { value, .. } => assert_eq!(value, Ratio::from_integer(0)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn conductance_single_vertex_undefined() {
    assert_eq!(conductance(&build(1..=1, &[]), THRESH), Conductance::Undefined);
}

#[test]
fn decompose_expander_is_identity() {
    let g = complete(4);
    let (p, cert) = expander_decompose(&g, Ratio::new(1, 3), Ratio::new(1, 2), THRESH).unwrap();
    assert_eq!(p.clusters.len(), 1);
    assert_eq!(cert.intercluster, 0);
}

#[test]
fn decompose_two_triangle_bridge() {
    let g = two_triangle_bridge();
    let (p, cert) = expander_decompose(&g, Ratio::new(1, 3), Ratio::new(1, 2), THRESH).unwrap();
    assert_eq!(p.clusters.len(), 2);
    assert_eq!(cert.intercluster, 1);
    let t1: BTreeSet<VertexId> = [1, 2, 3].iter().map(|&i| v(i)).collect();
    assert!(p.clusters.contains(&t1));
}

#[test]
fn decompose_disconnected_components_stay_separate() {
    let g = build(1..=6, &[(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]);
    let (p, cert) = expander_decompose(&g, Ratio::new(1, 3), Ratio::new(1, 2), THRESH).unwrap();
    assert_eq!(cert.intercluster, 0);
    for cl in &p.clusters {
        let has_left = cl.iter().any(|x| x.0 <= 3);
        let has_right = cl.iter().any(|x| x.0 >= 4);
        assert!(!(has_left && has_right), "cluster spans components: {cl:?}");
    }
}

#[test]
fn decompose_is_deterministic() {
    let g = two_triangle_bridge();
    let phi = Ratio::new(1, 3);
    let eps = Ratio::new(1, 2);
    let a = expander_decompose(&g, phi, eps, THRESH).unwrap().0.serialize();
    let b = expander_decompose(&g, phi, eps, THRESH).unwrap().0.serialize();
    assert_eq!(a, b);
}

#[test]
fn verify_accepts_own_decomposition() {
    let g = two_triangle_bridge();
    let phi = Ratio::new(1, 3);
    let eps = Ratio::new(1, 2);
    let (p, _) = expander_decompose(&g, phi, eps, THRESH).unwrap();
    assert!(matches!(
        verify_decomposition(&g, &p, phi, eps, THRESH),
        VerifyOutcome::Certificate(_)
    ));
    // Triangle clusters have conductance exactly 1, so phi = 1 still passes
    // the per-cluster check (intercluster 1 <= eps*m with eps = 1/2).
    assert!(matches!(
        verify_decomposition(&g, &p, Ratio::from_integer(1), eps, THRESH),
        VerifyOutcome::Certificate(_)
    ));
}

#[test]
fn verify_singletons_boundary_case() {
    let g = two_triangle_bridge();
    let p = Partition::singletons(&g);
    // intercluster = m = 7 > eps*m for eps < 1.
    assert!(matches!(
        verify_decomposition(&g, &p, Ratio::new(1, 3), Ratio::new(1, 2), THRESH),
        VerifyOutcome::Violation { .. }
    ));
    assert!(matches!(
        verify_decomposition(&g, &p, Ratio::new(1, 3), Ratio::from_integer(1), THRESH),
        VerifyOutcome::Certificate(_)
    ));
}

#[test]
fn prune_empty_deletions_is_empty() {
    let g = complete(4);
    let phi = Ratio::new(1, 2);
    let r = expander_prune(&g, phi, &[], THRESH).unwrap();
    assert!(r.pruned.is_empty());
    assert_eq!(r.vol, 0);
    assert_eq!(r.boundary, 0);
}

#[test]
fn prune_budget_enforced_on_k4() {
    // K4: phi*m/10 = (1/2)*6/10 = 0.3 < 1, so deleting one edge is over
    // budget.
    let g = complete(4);
    assert!(matches!(
        expander_prune(&g, Ratio::new(1, 2), &[(v(1), v(2))], THRESH),
        Err(DynCutError::TooManyDeletions { .. })
    ));
}

#[test]
fn prune_bounds_hold_in_budget() {
    // K8 has conductance 4/7 and m = 28: budget phi*m/10 = 1.6, so one unit
    // deletion is in budget.
    let g = complete(8);
    let phi = match conductance(&g, THRESH) {
        Conductance::Exact { value, .. } => value,
        other => panic!("unexpected {other:?}"),
    };
    assert_eq!(phi, Ratio::new(4, 7));
    let r = expander_prune(&g, phi, &[(v(1), v(2))], THRESH).unwrap();
    let k = Rat::from_integer(1);
    assert!(Rat::from_integer(r.vol) <= Rat::from_integer(8) * k / phi);
    assert!(Rat::from_integer(r.boundary) <= Rat::from_integer(4) * k);
    // Remainder conductance certified >= phi/6.
    match r.remainder_phi {
        Conductance::Exact { value, .. } => assert!(value >= phi / Rat::from_integer(6)),
        other => panic!("remainder not exhaustively certified: {other:?}"),
    }
}

#[test]
fn conductance_matches_exhaustive_small() {
    // Spot-check the exact tier against a direct bipartition sweep.
    for g in [cycle(5), cycle(8), complete(5), two_triangle_bridge()] {
        let ids: Vec<VertexId> = g.vertices().collect();
        let n = ids.len();
        let mut best: Option<Ratio<i64>> = None;
        for bits in 1u32..(1 << (n - 1)) {
            let s: BTreeSet<VertexId> =
                (0..n).filter(|i| bits >> i & 1 == 1).map(|i| ids[i]).collect();
            let vol_s = g.volume(&s).unwrap();
            let vol_c = 2 * g.m() - vol_s;
            if vol_s.min(vol_c) == 0 {
                continue;
            }
            let ratio = Ratio::new(g.boundary_size(&s).unwrap(), vol_s.min(vol_c));
            best = Some(best.map_or(ratio, |b: Ratio<i64>| b.min(ratio)));
        }
        match conductance(&g, THRESH) {
            Conductance::Exact { value, .. } => assert_eq!(Some(value), best),
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn partition_serialize_round_trip() {
    let g = two_triangle_bridge();
    let (p, _) = expander_decompose(&g, Ratio::new(1, 3), Ratio::new(1, 2), THRESH).unwrap();
    let text = p.serialize();
    let p2 = Partition::parse(&text).unwrap();
    assert_eq!(p2.clusters, p.clusters);
}
