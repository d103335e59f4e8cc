//! Unit tests for forest contraction, containment sets, terminal
//! sparsifiers, and the one-level edge-connectivity structure.

use std::collections::BTreeSet;

use num_rational::Ratio;

use dyncut::expander::Partition;
use dyncut::graph::{Multigraph, UpdateOp, VertexId};
use dyncut::oracle::steiner_min_cut;
use dyncut::sparsify::{
    build_containment, build_sparsifier_cluster, connecting_paths, contract, ec_init, ec_update,
    validate_containment, CutContainmentSet, SpanningForest, Validation,
};

fn v(i: u64) -> VertexId {
    VertexId(i)
}

fn build(vertices: &[u64], edges: &[(u64, u64, i64)]) -> Multigraph {
    let mut g = Multigraph::new();
    for &i in vertices {
        g.insert_vertex(v(i)).unwrap();
    }
    for &(a, b, m) in edges {
        g.insert_edge(v(a), v(b), m).unwrap();
    }
    g
}

fn vs(ids: &[u64]) -> BTreeSet<VertexId> {
    ids.iter().map(|&i| v(i)).collect()
}

fn path5() -> Multigraph {
    build(&[1, 2, 3, 4, 5], &[(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1)])
}

fn star() -> Multigraph {
    // Center 1, leaves 2, 3, 4.
    build(&[1, 2, 3, 4], &[(1, 2, 1), (1, 3, 1), (1, 4, 1)])
}

fn two_triangle_bridge() -> Multigraph {
    build(
        &[1, 2, 3, 4, 5, 6],
        &[(1, 2, 1), (2, 3, 1), (1, 3, 1), (4, 5, 1), (5, 6, 1), (4, 6, 1), (3, 4, 1)],
    )
}

#[test]
fn connecting_paths_on_path_endpoints() {
    let f = SpanningForest::build(&path5(), &BTreeSet::new());
    let cp = connecting_paths(&f, &vs(&[1, 5]));
    assert_eq!(cp.paths.len(), 1);
    assert_eq!(cp.paths[0].first(), Some(&v(1)));
    assert_eq!(cp.paths[0].last(), Some(&v(5)));
}

#[test]
fn connecting_paths_star_meets_at_center() {
    let f = SpanningForest::build(&star(), &BTreeSet::new());
    let cp = connecting_paths(&f, &vs(&[2, 3, 4]));
    assert_eq!(cp.paths.len(), 3);
    for p in &cp.paths {
        assert!(p.contains(&v(1)), "path {p:?} misses the center");
    }
}

#[test]
fn connecting_paths_singleton_terminal_is_empty() {
    let f = SpanningForest::build(&path5(), &BTreeSet::new());
    assert!(connecting_paths(&f, &vs(&[3])).paths.is_empty());
}

#[test]
fn contract_path_endpoints() {
    let f = SpanningForest::build(&path5(), &BTreeSet::new());
    let cf = contract(&f, &vs(&[1, 5]));
    assert_eq!(cf.vertices, vs(&[1, 5]));
    assert_eq!(cf.edges.len(), 1);
}

#[test]
fn contract_star_keeps_branch_center() {
    let f = SpanningForest::build(&star(), &BTreeSet::new());
    let cf = contract(&f, &vs(&[2, 3, 4]));
    assert_eq!(cf.vertices, vs(&[1, 2, 3, 4]));
    assert_eq!(cf.edges.len(), 3);
}

#[test]
fn contract_empty_terminals_is_empty() {
    let f = SpanningForest::build(&path5(), &BTreeSet::new());
    let cf = contract(&f, &BTreeSet::new());
    assert!(cf.vertices.is_empty());
    assert!(cf.edges.is_empty());
}

#[test]
fn contract_size_bound() {
    // |V(Contract_K)| <= 2|K| per tree for |K| >= 2, and K-connectivity is
    // preserved (single tree here, so all of K stays connected).
    let f = SpanningForest::build(&path5(), &BTreeSet::new());
    for k in [vs(&[1, 3]), vs(&[1, 3, 5]), vs(&[2, 4])] {
        let cf = contract(&f, &k);
        assert!(cf.vertices.len() <= 2 * k.len());
        assert!(cf.edges.len() < 2 * k.len());
    }
}

#[test]
fn containment_trivial_terminal_sets() {
    let g = path5();
    for t in [BTreeSet::new(), vs(&[2])] {
        let cc = build_containment(&g, &t, 2).unwrap();
        assert!(cc.edges.is_empty());
        assert_eq!(cc.refinement.clusters.len(), 1);
    }
}

#[test]
fn containment_path_terminals_validates() {
    let g = build(&[1, 2, 3], &[(1, 2, 1), (2, 3, 1)]);
    let t = vs(&[1, 3]);
    let cc = build_containment(&g, &t, 1).unwrap();
    assert!(!cc.edges.is_empty());
    assert!(matches!(validate_containment(&g, &t, 1, &cc.edges, None).unwrap(), Validation::Pass));
}

#[test]
fn containment_all_edges_always_valid() {
    let g = two_triangle_bridge();
    let all: BTreeSet<(VertexId, VertexId)> = g.edges().map(|e| e.pair()).collect();
    let t = vs(&[1, 4, 6]);
    assert!(matches!(validate_containment(&g, &t, 3, &all, None).unwrap(), Validation::Pass));
}

#[test]
fn containment_empty_cc_violates_on_path() {
    let g = build(&[1, 2, 3], &[(1, 2, 1), (2, 3, 1)]);
    assert!(matches!(
        validate_containment(&g, &vs(&[1, 3]), 1, &BTreeSet::new(), None).unwrap(),
        Validation::Violation(_)
    ));
}

#[test]
fn containment_bridge_edge_suffices() {
    let g = two_triangle_bridge();
    let cc: BTreeSet<(VertexId, VertexId)> = BTreeSet::from([(v(3), v(4))]);
    assert!(matches!(
        validate_containment(&g, &vs(&[3, 4]), 1, &cc, None).unwrap(),
        Validation::Pass
    ));
}

#[test]
fn sparsifier_degenerate_cc_equals_graph() {
    let g = two_triangle_bridge();
    let cc = CutContainmentSet {
        edges: g.edges().map(|e| e.pair()).collect(),
        refinement: Partition::singletons(&g),
    };
    let f = SpanningForest::build(&g, &cc.edges);
    let sp = build_sparsifier_cluster(&g, &vs(&[1]), &cc, &f, 2, 3).unwrap();
    let orig: BTreeSet<(VertexId, VertexId, i64)> =
        g.edges().map(|e| (e.pair().0, e.pair().1, e.mult)).collect();
    let got: BTreeSet<(VertexId, VertexId, i64)> =
        sp.h.edges().map(|e| (e.pair().0, e.pair().1, e.mult)).collect();
    assert_eq!(got, orig);
}

#[test]
fn sparsifier_path_preserves_terminal_connectivity() {
    let g = build(&[1, 2, 3], &[(1, 2, 1), (2, 3, 1)]);
    let cc = CutContainmentSet {
        edges: BTreeSet::from([(v(1), v(2))]),
        refinement: Partition::from_clusters(vec![vs(&[1]), vs(&[2, 3])]),
    };
    let f = SpanningForest::build(&g, &cc.edges);
    let sp = build_sparsifier_cluster(&g, &vs(&[1, 3]), &cc, &f, 1, 2).unwrap();
    assert_eq!(sp.h.edge(v(1), v(2)).unwrap().mult, 1);
    assert_eq!(sp.h.edge(v(2), v(3)).unwrap().mult, 2); // gamma edge
    assert_eq!(steiner_min_cut(&sp.h, &vs(&[1]), &vs(&[3]), 1), 1);
}

#[test]
fn sparsifier_no_terminals_is_empty() {
    let g = path5();
    let cc = CutContainmentSet::empty(&g);
    let f = SpanningForest::build(&g, &cc.edges);
    let sp = build_sparsifier_cluster(&g, &BTreeSet::new(), &cc, &f, 1, 2).unwrap();
    assert_eq!(sp.h.n(), 0);
    assert_eq!(sp.h.m(), 0);
}

#[test]
fn ec_init_expander_single_cluster() {
    let g = build(&[1, 2, 3], &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]);
    let ds = ec_init(&g, 3, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    assert_eq!(ds.partition.clusters.len(), 1);
    assert!(ds.terminals().is_empty());
}

#[test]
fn ec_init_bridge_terminals_and_connectivity() {
    let g = two_triangle_bridge();
    let ds = ec_init(&g, 3, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    assert_eq!(ds.terminals(), vs(&[3, 4]));
    assert_eq!(
        steiner_min_cut(&ds.sparsifier.h, &vs(&[3]), &vs(&[4]), 3),
        steiner_min_cut(&g, &vs(&[3]), &vs(&[4]), 3)
    );
}

#[test]
fn ec_init_disconnected_preserves_nonconnectivity() {
    let g = build(&[1, 2, 3, 4], &[(1, 2, 1), (3, 4, 1)]);
    let ds = ec_init(&g, 3, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    // Cross-component terminal pairs stay disconnected in the sparsifier
    // (when both sides appear in it at all).
    for a in [v(1), v(2)] {
        for b in [v(3), v(4)] {
            if ds.sparsifier.h.contains_vertex(a) && ds.sparsifier.h.contains_vertex(b) {
                let sm = steiner_min_cut(
                    &ds.sparsifier.h,
                    &BTreeSet::from([a]),
                    &BTreeSet::from([b]),
                    3,
                );
                assert_eq!(sm, 0);
            }
        }
    }
}

#[test]
fn ec_update_empty_seq_is_noop() {
    let g = two_triangle_bridge();
    let ds = ec_init(&g, 3, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    let (ds2, diff, s) = ec_update(&ds, &Vec::new(), 1).unwrap();
    assert!(diff.is_empty());
    assert!(s.is_empty());
    assert_eq!(ds2.g.canonical_serialize(), g.canonical_serialize());
}

#[test]
fn ec_update_bridge_deletion_clears_terminals() {
    let g = two_triangle_bridge();
    let ds = ec_init(&g, 3, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    let (ds2, diff, s) = ec_update(&ds, &vec![UpdateOp::DeleteEdge(v(3), v(4))], 1).unwrap();
    // S is the symmetric difference of the old and new terminal sets.
    let expected: BTreeSet<VertexId> =
        ds.terminals().symmetric_difference(&ds2.terminals()).copied().collect();
    assert_eq!(s, expected);
    // 3 and 4 are no longer terminals of each other's side: the bridge is
    // gone, so no intercluster edge crosses between the two triangles.
    let t2 = ds2.terminals();
    let cross: Vec<_> = ds2
        .g
        .intercluster_edges(&ds2.partition.cluster_of)
        .unwrap()
        .into_iter()
        .filter(|e| (e.u.0 <= 3) != (e.v.0 <= 3))
        .collect();
    assert!(cross.is_empty(), "unexpected cross-triangle edges: {cross:?}, terminals {t2:?}");
    // The diff transforms the old sparsifier into the new one.
    let mut h = ds.sparsifier.h.clone();
    h.apply_seq(&diff).unwrap();
    let pairs = |g: &Multigraph| -> BTreeSet<(VertexId, VertexId, i64)> {
        g.edges().map(|e| (e.pair().0, e.pair().1, e.mult)).collect()
    };
    assert_eq!(pairs(&h), pairs(&ds2.sparsifier.h));
}

#[test]
fn ec_update_cross_cluster_insert_marks_endpoints() {
    let g = two_triangle_bridge();
    let ds = ec_init(&g, 3, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    let (ds2, _, s) = ec_update(&ds, &vec![UpdateOp::InsertEdge(v(1), v(6), 1)], 1).unwrap();
    assert!(s.contains(&v(1)) && s.contains(&v(6)));
    assert!(ds2.terminals().contains(&v(1)));
    assert!(ds2.terminals().contains(&v(6)));
}

#[test]
fn ec_update_matches_fresh_init_on_terminal_connectivity() {
    let g = two_triangle_bridge();
    let ds = ec_init(&g, 3, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    let seq = vec![UpdateOp::InsertEdge(v(2), v(5), 1)];
    let (ds2, _, _) = ec_update(&ds, &seq, 1).unwrap();
    let mut g2 = g.clone();
    g2.apply_seq(&seq).unwrap();
    let fresh = ec_init(&g2, 1, Ratio::new(1, 3), 4, Ratio::new(1, 2), 18).unwrap();
    let common: Vec<VertexId> =
        ds2.terminals().intersection(&fresh.terminals()).copied().collect();
    for (i, &a) in common.iter().enumerate() {
        for &b in &common[i + 1..] {
            let sa = BTreeSet::from([a]);
            let sb = BTreeSet::from([b]);
            // lambda_c-equivalence guarantees agreement of min(c, lambda).
            assert_eq!(
                steiner_min_cut(&ds2.sparsifier.h, &sa, &sb, 1).min(1),
                steiner_min_cut(&fresh.sparsifier.h, &sa, &sb, 1).min(1),
                "terminal pair ({a},{b})"
            );
        }
    }
}
