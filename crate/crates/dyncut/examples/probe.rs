use std::time::Instant;

use dyncut::expander::expander_decompose;
use dyncut::graph::Multigraph;
use dyncut::local_cuts::{build_aux, entries_for_vertex_opts};
use num_rational::Ratio;

fn main() {
    let text = std::fs::read_to_string("/tmp/p10k.graph").unwrap();
    let g = Multigraph::from_graph_file(&text).unwrap();
    let t0 = Instant::now();
    let (p, _) = expander_decompose(&g, Ratio::new(1, 16), Ratio::from_integer(1), 18).unwrap();
    eprintln!("decompose: {:?} clusters={}", t0.elapsed(), p.clusters.len());
    let t0 = Instant::now();
    let aux = build_aux(&g, &p).unwrap();
    eprintln!("build_aux: {:?}", t0.elapsed());
    let seeds: Vec<_> = g.vertices().take(2000).collect();
    let t0 = Instant::now();
    let mut total = 0usize;
    for &s in &seeds {
        total += entries_for_vertex_opts(&aux, s, 19, 2, true).unwrap().len();
    }
    eprintln!(
        "enumerate {} seeds: {:?} ({:?}/seed), entries={}",
        seeds.len(),
        t0.elapsed(),
        t0.elapsed() / seeds.len() as u32,
        total
    );
}
