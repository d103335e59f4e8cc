//! Unit tests for the ground-truth oracles themselves: the engine is tested
//! *against* these, so they get their own cross-checks here.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use dyncut::config::Config;
use dyncut::expander::Partition;
use dyncut::graph::{Multigraph, VertexId};
use dyncut::local_cuts::build_aux;
use dyncut::oracle::{
    baseline_min_cut, brute_local_cuts, brute_min_cut, check_cutset, steiner_min_cut,
    verify_stream,
};

fn v(i: u64) -> VertexId {
    VertexId(i)
}

fn vs(ids: &[u64]) -> BTreeSet<VertexId> {
    ids.iter().map(|&i| v(i)).collect()
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

fn random_graph(rng: &mut ChaCha8Rng, n: u64, extra: usize) -> Multigraph {
    let mut g = build(&(1..=n).collect::<Vec<_>>(), &[]);
    // Random spanning tree plus extra random pairs.
    for i in 2..=n {
        let p = rng.gen_range(1..i);
        g.insert_edge(v(i), v(p), rng.gen_range(1..=2)).unwrap();
    }
    for _ in 0..extra {
        let a = rng.gen_range(1..=n);
        let b = rng.gen_range(1..=n);
        if a != b && g.edge(v(a), v(b)).is_none() {
            g.insert_edge(v(a), v(b), rng.gen_range(1..=2)).unwrap();
        }
    }
    g
}

#[test]
fn brute_min_cut_fixed_examples() {
    assert_eq!(brute_min_cut(&two_triangle_bridge()).min_cut_size, Some(1));
    let c6: Vec<(u64, u64, i64)> = (1..=6).map(|i| (i, i % 6 + 1, 1)).collect();
    assert_eq!(brute_min_cut(&build(&[1, 2, 3, 4, 5, 6], &c6)).min_cut_size, Some(2));
    let mut k4 = Vec::new();
    for a in 1..=4u64 {
        for b in a + 1..=4 {
            k4.push((a, b, 1));
        }
    }
    assert_eq!(brute_min_cut(&build(&[1, 2, 3, 4], &k4)).min_cut_size, Some(3));
}

#[test]
fn brute_min_cut_witness_is_consistent() {
    let g = two_triangle_bridge();
    let r = brute_min_cut(&g);
    let size = r.min_cut_size.unwrap();
    assert!(check_cutset(&g, &r.witness, size).is_ok());
}

#[test]
fn exhaustive_and_stoer_wagner_agree() {
    // brute_min_cut switches methods at n = 20; cross-check the two by
    // comparing the small-n exhaustive answer against baseline_min_cut's
    // independent sparse Stoer–Wagner on random graphs.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let n = rng.gen_range(4..=12);
        let g = random_graph(&mut rng, n, n as usize);
        assert_eq!(
            brute_min_cut(&g).min_cut_size,
            baseline_min_cut(&g),
            "disagreement on trial {trial}"
        );
    }
}

#[test]
fn steiner_fixed_examples() {
    let path = build(&[1, 2, 3], &[(1, 2, 1), (2, 3, 1)]);
    assert_eq!(steiner_min_cut(&path, &vs(&[1]), &vs(&[3]), 5), 1);
    let disc = build(&[1, 2, 3, 4], &[(1, 2, 1), (3, 4, 1)]);
    assert_eq!(steiner_min_cut(&disc, &vs(&[1]), &vs(&[3]), 5), 0);
    let g = two_triangle_bridge();
    assert_eq!(steiner_min_cut(&g, &vs(&[1, 2, 3]), &vs(&[4, 5, 6]), 5), 1);
}

#[test]
fn steiner_pairwise_matches_global_when_capped() {
    // min over pairs of capped s-t cuts equals min(cap, global min cut) on
    // connected graphs.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let g = random_graph(&mut rng, 8, 6);
        let global = brute_min_cut(&g).min_cut_size.unwrap();
        let ids: Vec<VertexId> = g.vertices().collect();
        let cap = 4;
        let mut best = i64::MAX;
        for i in 1..ids.len() {
            let a = BTreeSet::from([ids[0]]);
            let b = BTreeSet::from([ids[i]]);
            best = best.min(steiner_min_cut(&g, &a, &b, cap));
        }
        assert_eq!(best.min(cap), global.min(cap));
    }
}

#[test]
fn brute_local_cuts_fixed_examples() {
    // Triangle with one terminal: no 1-local-cut exists.
    let g = build(&[1, 2, 3, 4], &[(1, 2, 1), (2, 3, 1), (1, 3, 1), (1, 4, 1)]);
    let p = Partition::from_clusters(vec![vs(&[1, 2, 3]), vs(&[4])]);
    let aux = build_aux(&g, &p).unwrap();
    let view = aux.cluster_view(0).unwrap();
    let specials = BTreeSet::from([aux.special[0]]);
    let sets = brute_local_cuts(&view, &specials, 3, 1).unwrap();
    assert!(sets.iter().all(|u| u.contains(&aux.special[0])), "non-terminal-side 1-cuts: {sets:?}");

    // Path cluster 1-2-3 with terminal 1: {3} and {2,3}.
    let g = build(&[1, 2, 3, 4], &[(1, 2, 1), (2, 3, 1), (1, 4, 1)]);
    let p = Partition::from_clusters(vec![vs(&[1, 2, 3]), vs(&[4])]);
    let aux = build_aux(&g, &p).unwrap();
    let view = aux.cluster_view(0).unwrap();
    let specials = BTreeSet::from([aux.special[0]]);
    let sets = brute_local_cuts(&view, &specials, 3, 1).unwrap();
    let real_only: BTreeSet<BTreeSet<VertexId>> = sets
        .into_iter()
        .filter(|u| !u.contains(&aux.special[0]))
        .collect();
    assert_eq!(real_only, BTreeSet::from([vs(&[3]), vs(&[2, 3])]));
}

#[test]
fn brute_local_cuts_relaxed_constraints() {
    // No terminals and c >= max degree: every connected proper subset within
    // the volume budget qualifies.
    let g = build(&[1, 2, 3], &[(1, 2, 1), (2, 3, 1)]);
    let aux = build_aux(&g, &Partition::whole(&g)).unwrap();
    let view = aux.cluster_view(0).unwrap();
    let specials = BTreeSet::from([aux.special[0]]);
    let sets = brute_local_cuts(&view, &specials, 4, 2).unwrap();
    for u in [vs(&[1]), vs(&[2]), vs(&[3]), vs(&[1, 2]), vs(&[2, 3])] {
        assert!(sets.contains(&u), "missing {u:?} in {sets:?}");
    }
}

#[test]
fn verify_stream_empty_is_one_check() {
    let g = two_triangle_bridge();
    let mut cfg = Config::default();
    cfg.c = 1;
    let report = verify_stream(&g, &[], &cfg).unwrap();
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.mismatches(), 0);
}

#[test]
fn report_json_lines_shape() {
    let g = two_triangle_bridge();
    let mut cfg = Config::default();
    cfg.c = 1;
    let report = verify_stream(&g, &[], &cfg).unwrap();
    let line = report.to_json_lines();
    let val: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(val["op_index"], 0);
    assert_eq!(val["ok"], true);
}

#[test]
fn baseline_matches_brute_on_larger_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let g = random_graph(&mut rng, 30, 25);
        assert_eq!(baseline_min_cut(&g), brute_min_cut(&g).min_cut_size);
    }
}
