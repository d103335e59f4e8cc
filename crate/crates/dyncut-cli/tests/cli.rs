//! End-to-end tests of the `dyncut` binary: exit codes, output shapes, and
//! determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use dyncut::graph::{Multigraph, VertexId};

fn v(i: u64) -> VertexId {
    VertexId(i)
}

fn two_triangle_bridge() -> Multigraph {
    let mut g = Multigraph::new();
    for i in 1..=6 {
        g.insert_vertex(v(i)).unwrap();
    }
    for (a, b) in [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)] {
        g.insert_edge(v(a), v(b), 1).unwrap();
    }
    g
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dyncut-cli-test-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_fixture(dir: &PathBuf, stream: &str) -> (PathBuf, PathBuf) {
    let gp = dir.join("g.graph");
    let sp = dir.join("g.stream");
    std::fs::write(&gp, two_triangle_bridge().to_graph_file()).unwrap();
    std::fs::write(&sp, stream).unwrap();
    (gp, sp)
}

fn dyncut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyncut")).args(args).output().unwrap()
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn run_query_marker_answers_bridge() {
    let dir = workdir("run-q");
    let (gp, sp) = write_fixture(&dir, "q\n");
    let out = dyncut(&["run", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "1", "--queries-only"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["size"], 1);
    assert_eq!(recs[0]["cutset"], serde_json::json!([[3, 4, 1]]));
}

#[test]
fn run_reports_disconnection_as_zero() {
    let dir = workdir("run-disc");
    let (gp, sp) = write_fixture(&dir, "de 3 4\nq\n");
    let out = dyncut(&["run", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "1", "--queries-only"]);
    assert!(out.status.success());
    let recs = json_lines(&out);
    assert_eq!(recs.last().unwrap()["size"], 0);
}

#[test]
fn run_small_c_yields_null() {
    // C6 has min cut 2 > c = 1.
    let dir = workdir("run-null");
    let mut g = Multigraph::new();
    for i in 1..=6 {
        g.insert_vertex(v(i)).unwrap();
    }
    for i in 1..=6u64 {
        g.insert_edge(v(i), v(i % 6 + 1), 1).unwrap();
    }
    let gp = dir.join("c6.graph");
    let sp = dir.join("c6.stream");
    std::fs::write(&gp, g.to_graph_file()).unwrap();
    std::fs::write(&sp, "q\n").unwrap();
    let out = dyncut(&["run", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "1", "--queries-only"]);
    assert!(out.status.success());
    assert_eq!(json_lines(&out)[0]["size"], serde_json::Value::Null);
}

#[test]
fn run_continuous_emits_record_per_op() {
    let dir = workdir("run-cont");
    let (gp, sp) = write_fixture(&dir, "de 3 4\nie 3 4 2\n");
    let out = dyncut(&["run", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "2"]);
    assert!(out.status.success());
    let recs = json_lines(&out);
    // Init record plus one per op.
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[0]["size"], 1);
    assert_eq!(recs[1]["size"], 0);
    assert_eq!(recs[2]["size"], 2);
}

#[test]
fn run_csv_format() {
    let dir = workdir("run-csv");
    let (gp, sp) = write_fixture(&dir, "q\n");
    let out = dyncut(&[
        "run", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "1", "--format", "csv",
        "--queries-only",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("op_index,size,elapsed_ns"));
    assert!(lines.next().unwrap().starts_with("0,1,"));
}

#[test]
fn verify_clean_stream_exits_zero() {
    let dir = workdir("verify-ok");
    let (gp, sp) = write_fixture(&dir, "de 3 4\nie 3 4 1\nq\n");
    let out = dyncut(&["verify", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for rec in json_lines(&out) {
        assert_eq!(rec["ok"], true);
    }
}

#[test]
fn bad_config_exits_two() {
    let dir = workdir("badcfg");
    let (gp, sp) = write_fixture(&dir, "q\n");
    let out = dyncut(&[
        "verify", gp.to_str().unwrap(), sp.to_str().unwrap(), "--set", "c=notanumber",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_graph_exits_two() {
    let dir = workdir("badgraph");
    let gp = dir.join("bad.graph");
    let sp = dir.join("bad.stream");
    std::fs::write(&gp, "not a graph\n").unwrap();
    std::fs::write(&sp, "q\n").unwrap();
    let out = dyncut(&["run", gp.to_str().unwrap(), sp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let dir = workdir("gen-det");
    let o1 = dir.join("a");
    let o2 = dir.join("b");
    for out in [&o1, &o2] {
        let r = dyncut(&[
            "gen", "random-toggle", "--n", "20", "--ops", "50", "--seed", "9", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    for ext in ["graph", "stream"] {
        let a = std::fs::read(o1.with_extension(ext)).unwrap();
        let b = std::fs::read(o2.with_extension(ext)).unwrap();
        assert_eq!(a, b, "{ext} files differ");
    }
}

#[test]
fn gen_zero_ops_and_planted_sidecar() {
    let dir = workdir("gen-zero");
    let o = dir.join("z");
    let r = dyncut(&["gen", "planted-cut", "--n", "12", "--ops", "0", "--seed", "1", "--out", o.to_str().unwrap()]);
    assert!(r.status.success());
    assert_eq!(std::fs::read_to_string(o.with_extension("stream")).unwrap(), "");
    assert!(o.with_extension("sidecar").exists());
}

#[test]
fn bench_csv_schema() {
    let dir = workdir("bench");
    let (gp, sp) = write_fixture(&dir, "de 3 4\nie 3 4 1\n");
    let out = dyncut(&[
        "bench", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "1", "--set",
        "baseline_every=1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("op_index,engine_ns,baseline_ns,answer_size"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.split(',').count(), 4);
    }
}

#[test]
fn run_answers_are_deterministic() {
    let dir = workdir("run-det");
    let (gp, sp) = write_fixture(&dir, "de 3 4\nie 3 4 1\nde 1 2\nq\n");
    let get = || {
        let out = dyncut(&["run", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "2"]);
        assert!(out.status.success());
        json_lines(&out)
            .into_iter()
            .map(|r| (r["size"].clone(), r["cutset"].clone()))
            .collect::<Vec<_>>()
    };
    assert_eq!(get(), get());
}

#[test]
fn simple_mode_lifts_answers() {
    // Simple path 1-2-3: min cut 1; answers must name original simple edges.
    let dir = workdir("simple");
    let mut g = Multigraph::new();
    for i in 1..=3 {
        g.insert_vertex(v(i)).unwrap();
    }
    g.insert_edge(v(1), v(2), 1).unwrap();
    g.insert_edge(v(2), v(3), 1).unwrap();
    let gp = dir.join("s.graph");
    let sp = dir.join("s.stream");
    std::fs::write(&gp, g.to_graph_file()).unwrap();
    std::fs::write(&sp, "q\nde 1 2\nq\n").unwrap();
    let out = dyncut(&[
        "run", gp.to_str().unwrap(), sp.to_str().unwrap(), "--c", "1", "--simple",
        "--queries-only",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = json_lines(&out);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["size"], 1);
    let cut = recs[0]["cutset"].as_array().unwrap();
    assert_eq!(cut.len(), 1);
    let pair = (cut[0][0].as_u64().unwrap(), cut[0][1].as_u64().unwrap());
    assert!(pair == (1, 2) || pair == (2, 3), "unlifted cutset {cut:?}");
    assert_eq!(recs[1]["size"], 0);
}
