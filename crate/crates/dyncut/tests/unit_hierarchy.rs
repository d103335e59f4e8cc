//! Unit tests for the one-level / multi-level minimum-cut structures, the
//! parameter schedule, and the level-descending query.

use std::collections::BTreeSet;

use num_rational::Ratio;

use dyncut::graph::{Multigraph, UpdateOp, VertexId};
use dyncut::hierarchy::{
    mc_multi_init, mc_multi_update, mc_one_init, mc_one_update, query_min_cut, rebuild_lambda,
    schedule_params, EngineCache,
};
use dyncut::oracle::brute_min_cut;

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

fn two_triangle_bridge() -> Multigraph {
    build(
        &[1, 2, 3, 4, 5, 6],
        &[(1, 2, 1), (2, 3, 1), (1, 3, 1), (4, 5, 1), (5, 6, 1), (4, 6, 1), (3, 4, 1)],
    )
}

fn cycle(n: u64) -> Multigraph {
    let edges: Vec<(u64, u64, i64)> = (1..=n).map(|i| (i, i % n + 1, 1)).collect();
    build(&(1..=n).collect::<Vec<_>>(), &edges)
}

fn complete(n: u64) -> Multigraph {
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            edges.push((a, b, 1));
        }
    }
    build(&(1..=n).collect::<Vec<_>>(), &edges)
}

fn schedule_for(c: i64, n: usize) -> dyncut::hierarchy::ParameterSchedule {
    schedule_params(c, n, Some(1), Ratio::new(1, 16), 2).unwrap()
}

#[test]
fn schedule_invariants_sweep() {
    for c in 1..=4i64 {
        for zeta in 1..=3usize {
            let s = schedule_params(c, 1000, Some(zeta), Ratio::new(1, 16), 2).unwrap();
            assert_eq!(*s.c_seq.last().unwrap(), c);
            assert_eq!(s.gamma, s.c_seq[0] + 1);
            for i in 0..=zeta {
                assert!(s.gamma > s.c_seq[i]);
                assert!(
                    Ratio::from_integer(s.alpha)
                        >= Ratio::from_integer(s.c_seq[i]) / s.phi_seq[i],
                    "alpha too small at stage {i} (c={c}, zeta={zeta})"
                );
                if i > 0 {
                    assert!(s.phi_seq[i] < s.phi_seq[i - 1]);
                }
            }
        }
    }
}

#[test]
fn one_level_triangle_no_entries_at_c1() {
    // Terminal-free triangle: its minimum cut is 2 > c = 1, so Λ is empty.
    let g = build(&[1, 2, 3], &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]);
    let mut cache = EngineCache::new();
    let ds = mc_one_init(&g, 1, Ratio::new(1, 3), 3, 4, 16, 18, &mut cache).unwrap();
    assert_eq!(ds.ec.partition.clusters.len(), 1);
    assert!(ds.lambda.is_empty());
}

#[test]
fn one_level_c6_min_entry_is_two() {
    let g = cycle(6);
    let mut cache = EngineCache::new();
    let ds = mc_one_init(&g, 2, Ratio::new(1, 4), 8, 9, 64, 18, &mut cache).unwrap();
    assert_eq!(ds.ec.partition.clusters.len(), 1);
    assert_eq!(ds.lambda.min().unwrap().cut_size, 2);
}

#[test]
fn one_level_two_triangles_c1() {
    // No 1-local-cut avoids a triangle's terminal; the bridge is carried by
    // the terminal structure, not Λ.
    let g = two_triangle_bridge();
    let mut cache = EngineCache::new();
    let ds = mc_one_init(&g, 1, Ratio::new(1, 3), 3, 4, 16, 18, &mut cache).unwrap();
    assert_eq!(ds.ec.partition.clusters.len(), 2);
    assert!(ds.lambda.iter().all(|e| e.has_special), "non-terminal-side entries: {:?}", ds.lambda.iter().collect::<Vec<_>>());
}

#[test]
fn one_level_update_empty_seq_is_noop() {
    let g = two_triangle_bridge();
    let mut cache = EngineCache::new();
    let ds = mc_one_init(&g, 1, Ratio::new(1, 3), 3, 4, 16, 18, &mut cache).unwrap();
    let (ds2, diff) = mc_one_update(&ds, &Vec::new(), &mut cache).unwrap();
    assert!(diff.is_empty());
    assert_eq!(ds2.ec.g.canonical_serialize(), g.canonical_serialize());
}

#[test]
fn one_level_update_pendant_insert_gains_entry() {
    let g = two_triangle_bridge();
    let mut cache = EngineCache::new();
    let ds = mc_one_init(&g, 1, Ratio::new(1, 3), 3, 4, 16, 18, &mut cache).unwrap();
    let seq = vec![UpdateOp::InsertVertex(v(7)), UpdateOp::InsertEdge(v(1), v(7), 1)];
    let (ds2, _) = mc_one_update(&ds, &seq, &mut cache).unwrap();
    // The pendant vertex becomes its own cluster, so its 1-cut is carried
    // by the terminal structure rather than Λ; the live Λ must still equal
    // a from-scratch rebuild.
    let fresh = rebuild_lambda(&ds2, &mut cache).unwrap();
    let live: BTreeSet<_> = ds2.lambda.iter().map(|e| e.key()).collect();
    let want: BTreeSet<_> = fresh.iter().map(|e| e.key()).collect();
    assert_eq!(live, want);
    // End to end, the pendant is found as a minimum cut of size 1.
    let mut g2 = g.clone();
    g2.apply_seq(&seq).unwrap();
    let s = schedule_for(1, 7);
    let mds = mc_multi_init(&g2, &s, 1, 18, 12, true, &mut cache).unwrap();
    let q = query_min_cut(&mds).unwrap();
    assert_eq!(q.size, Some(1));
}

#[test]
fn multi_init_expander_is_short() {
    let g = complete(4);
    let mut cache = EngineCache::new();
    let s = schedule_for(2, 4);
    let mds = mc_multi_init(&g, &s, 2, 18, 12, true, &mut cache).unwrap();
    assert_eq!(mds.levels.len(), 1);
    // K4 min cut is 3 > 2.
    assert_eq!(query_min_cut(&mds).unwrap().size, None);
}

#[test]
fn multi_init_two_triangles_levels() {
    let g = two_triangle_bridge();
    let mut cache = EngineCache::new();
    // phi floor 1/4 sits between triangle conductance (1) and the whole
    // graph's cut ratio (1/7), so level 0 splits into the two triangles.
    let s = schedule_params(1, 6, Some(1), Ratio::new(1, 4), 2).unwrap();
    let mds = mc_multi_init(&g, &s, 1, 18, 12, true, &mut cache).unwrap();
    assert_eq!(mds.levels[0].ec.partition.clusters.len(), 2);
    let q = query_min_cut(&mds).unwrap();
    assert_eq!(q.size, Some(1));
    assert_eq!(q.cutset, vec![(v(3), v(4), 1)]);
    assert!(q.side_hint == vec![v(1), v(2), v(3)] || q.side_hint == vec![v(4), v(5), v(6)]);
}

#[test]
fn multi_init_empty_graph() {
    let g = Multigraph::new();
    let mut cache = EngineCache::new();
    let s = schedule_for(1, 2);
    let mds = mc_multi_init(&g, &s, 1, 18, 12, true, &mut cache).unwrap();
    assert_eq!(query_min_cut(&mds).unwrap().size, None);
}

#[test]
fn query_disconnected_is_zero_cut() {
    let g = build(&[1, 2, 3, 4], &[(1, 2, 1), (3, 4, 1)]);
    let mut cache = EngineCache::new();
    let s = schedule_for(1, 4);
    let mds = mc_multi_init(&g, &s, 1, 18, 12, true, &mut cache).unwrap();
    let q = query_min_cut(&mds).unwrap();
    assert_eq!(q.size, Some(0));
    assert!(q.cutset.is_empty());
    assert!(!q.side_hint.is_empty() && q.side_hint.len() < 4);
}

#[test]
fn query_c6_matches_oracle() {
    let g = cycle(6);
    let mut cache = EngineCache::new();
    let s = schedule_for(2, 6);
    let mds = mc_multi_init(&g, &s, 2, 18, 12, true, &mut cache).unwrap();
    let q = query_min_cut(&mds).unwrap();
    assert_eq!(q.size, Some(2));
    assert_eq!(q.cutset.iter().map(|&(_, _, m)| m).sum::<i64>(), 2);
    assert_eq!(q.size, brute_min_cut(&g).min_cut_size);
}

#[test]
fn multi_update_rebuild_matches_fresh_init() {
    // A batch larger than n/ln(n) forces a rebuild from level 0; the query
    // must agree with a from-scratch initialization.
    let g = two_triangle_bridge();
    let mut cache = EngineCache::new();
    let s = schedule_params(1, 6, Some(2), Ratio::new(1, 16), 2).unwrap();
    let mds = mc_multi_init(&g, &s, 1, 18, 12, true, &mut cache).unwrap();
    let seq = vec![
        UpdateOp::DeleteEdge(v(3), v(4)),
        UpdateOp::InsertEdge(v(1), v(4), 1),
        UpdateOp::InsertEdge(v(2), v(5), 1),
        UpdateOp::DeleteEdge(v(1), v(2)),
        UpdateOp::InsertEdge(v(1), v(2), 3),
    ];
    let mds2 = mc_multi_update(mds, &seq, &mut cache).unwrap();
    let mut g2 = g.clone();
    g2.apply_seq(&seq).unwrap();
    let fresh = mc_multi_init(&g2, &s, 1, 18, 12, true, &mut cache).unwrap();
    assert_eq!(query_min_cut(&mds2).unwrap().size, query_min_cut(&fresh).unwrap().size);
    assert_eq!(query_min_cut(&mds2).unwrap().size, brute_min_cut(&g2).min_cut_size.filter(|&k| k <= 1));
}

#[test]
fn one_level_live_lambda_matches_rebuild_under_random_ops() {
    // The cluster-granular Λ maintenance (including the localized ball
    // repair for kept clusters) must reproduce a from-scratch rebuild after
    // every update.
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..12u64 {
        let n = rng.gen_range(8..=22);
        let mut g = build(&(1..=n).collect::<Vec<_>>(), &[]);
        for i in 2..=n {
            let p = rng.gen_range(1..i);
            g.insert_edge(v(i), v(p), rng.gen_range(1..=2)).unwrap();
        }
        for _ in 0..n {
            let a = rng.gen_range(1..=n);
            let b = rng.gen_range(1..=n);
            if a != b && g.edge(v(a), v(b)).is_none() {
                g.insert_edge(v(a), v(b), rng.gen_range(1..=2)).unwrap();
            }
        }
        let mut cache = EngineCache::new();
        for step in 0..12 {
            // One structure per step, matching production: the instance pool
            // replays a single batch against a freshly built snapshot.
            let ds = mc_one_init(&g, 2, Ratio::new(1, 4), 8, 9, 64, 18, &mut cache).unwrap();
            let mut seq = Vec::new();
            for _ in 0..rng.gen_range(1..=4) {
                let a = rng.gen_range(1..=n);
                let b = rng.gen_range(1..=n);
                if a == b {
                    continue;
                }
                let op = if g.edge(v(a), v(b)).is_some() {
                    UpdateOp::DeleteEdge(v(a), v(b))
                } else {
                    UpdateOp::InsertEdge(v(a), v(b), rng.gen_range(1..=2))
                };
                g.apply_seq(&[op.clone()]).unwrap();
                seq.push(op);
            }
            if seq.is_empty() {
                continue;
            }
            let (ds2, _) =
                dyncut::hierarchy::mc_one_update_to(&ds, &g, &seq, 2, &mut cache).unwrap();
            let fresh = rebuild_lambda(&ds2, &mut cache).unwrap();
            let live: BTreeSet<_> = ds2.lambda.iter().map(|e| e.key()).collect();
            let want: BTreeSet<_> = fresh.iter().map(|e| e.key()).collect();
            assert_eq!(live, want, "trial {trial} step {step}");
        }
    }
}

#[test]
fn query_json_shapes() {
    let g = two_triangle_bridge();
    let mut cache = EngineCache::new();
    let s = schedule_for(1, 6);
    let mds = mc_multi_init(&g, &s, 1, 18, 12, true, &mut cache).unwrap();
    let json = query_min_cut(&mds).unwrap().to_json();
    let val: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(val["size"], 1);
    assert_eq!(val["cutset"][0][2], 1);
    // Above-c case serializes to a null size.
    let k4 = complete(4);
    let mds4 = mc_multi_init(&k4, &schedule_for(2, 4), 2, 18, 12, true, &mut cache).unwrap();
    assert_eq!(query_min_cut(&mds4).unwrap().to_json(), "{\"size\":null}");
}
