//! Fast end-to-end smoke checks of the dynamic engine, kept well below the
//! acceptance suite's scale so failures localize quickly.

use num_rational::Ratio;

use dyncut::config::Config;
use dyncut::gen::{generate, GenKind};
use dyncut::graph::{Multigraph, StreamItem, UpdateOp, VertexId};
use dyncut::hierarchy::{
    direct_min_cut, fd_current, fd_init, fd_update, query_min_cut, schedule_params,
};
use dyncut::oracle::{brute_min_cut, verify_stream};

fn v(i: u64) -> VertexId {
    VertexId(i)
}

/// Two triangles joined by a single bridge edge: min cut 1.
fn two_triangle_bridge() -> Multigraph {
    let mut g = Multigraph::default();
    for i in 1..=6 {
        g.insert_vertex(v(i)).unwrap();
    }
    for (a, b) in [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)] {
        g.insert_edge(v(a), v(b), 1).unwrap();
    }
    g
}

#[test]
fn schedule_recurrence_examples() {
    let s = schedule_params(3, 1000, Some(2), Ratio::new(1, 16), 2).unwrap();
    assert_eq!(s.c_seq, vec![255, 15, 3]);
    assert_eq!(s.gamma, 256);
    let s = schedule_params(1, 1000, Some(1), Ratio::new(1, 16), 2).unwrap();
    assert_eq!(s.c_seq, vec![3, 1]);
    assert_eq!(s.gamma, 4);
}

#[test]
fn pool_window_legality() {
    let g = two_triangle_bridge();
    assert!(fd_init(&g, 1, 1, 12, None, Ratio::new(1, 16), 2, 18, 12, true).is_ok());
    assert!(fd_init(&g, 1, 2, 12, None, Ratio::new(1, 16), 2, 18, 12, true).is_err());
}

#[test]
fn direct_min_cut_bridge() {
    let (val, side) = direct_min_cut(&two_triangle_bridge()).unwrap();
    assert_eq!(val, 1);
    assert_eq!(side.len(), 3);
}

#[test]
fn bridge_toggle_stream_matches_oracle() {
    let g = two_triangle_bridge();
    let mut pool = fd_init(&g, 1, 1, 12, None, Ratio::new(1, 16), 2, 18, 12, true).unwrap();
    for step in 0..50 {
        let op = if step % 2 == 0 {
            UpdateOp::DeleteEdge(v(3), v(4))
        } else {
            UpdateOp::InsertEdge(v(3), v(4), 1)
        };
        fd_update(&mut pool, op).unwrap();
        let truth = brute_min_cut(&pool.g).min_cut_size.filter(|&k| k <= 1);
        let got = query_min_cut(fd_current(&pool)).unwrap().size;
        assert_eq!(got, truth, "mismatch at step {step}");
    }
}

#[test]
fn verify_stream_random_toggle_small() {
    let gen = generate(GenKind::RandomToggle, 12, 40, 7).unwrap();
    let mut cfg = Config::default();
    cfg.c = 2;
    let report = verify_stream(&gen.graph, &gen.stream, &cfg).unwrap();
    assert_eq!(report.records.len(), 41);
    assert_eq!(report.mismatches(), 0, "{}", report.to_json_lines());
}

#[test]
fn verify_stream_churn_burst_small() {
    let gen = generate(GenKind::ChurnBurst, 10, 40, 3).unwrap();
    let mut cfg = Config::default();
    cfg.c = 2;
    let report = verify_stream(&gen.graph, &gen.stream, &cfg).unwrap();
    assert_eq!(report.mismatches(), 0, "{}", report.to_json_lines());
}

#[test]
fn planted_cut_sidecar_is_truth() {
    let gen = generate(GenKind::PlantedCut, 16, 30, 5).unwrap();
    let mut g = gen.graph.clone();
    let sidecar = gen.sidecar.unwrap();
    let mut i = 0;
    for item in &gen.stream {
        if let StreamItem::Op(op) = item {
            g.apply_update(*op).unwrap();
            assert_eq!(brute_min_cut(&g).min_cut_size, Some(sidecar[i]), "op {i}");
            i += 1;
        }
    }
}

#[test]
fn generator_determinism() {
    let a = generate(GenKind::RandomToggle, 20, 60, 42).unwrap();
    let b = generate(GenKind::RandomToggle, 20, 60, 42).unwrap();
    assert_eq!(a.graph.canonical_serialize(), b.graph.canonical_serialize());
    assert_eq!(a.stream, b.stream);
}

#[test]
fn verify_stream_planted_cut_small() {
    let gen = generate(GenKind::PlantedCut, 16, 30, 9).unwrap();
    let mut cfg = Config::default();
    cfg.c = 2;
    let report = verify_stream(&gen.graph, &gen.stream, &cfg).unwrap();
    assert_eq!(report.mismatches(), 0, "{}", report.to_json_lines());
}
