//! Command-line harness for the dyncut engine.
//!
//! Commands: `run` (drive the dynamic engine over a stream, one answer per
//! op), `verify` (replay against the brute-force oracle), `gen` (write
//! deterministic graph/stream fixtures), `bench` (per-op latency CSV with a
//! sampled from-scratch baseline).  Exit codes: 0 ok, 1 mismatch, 2
//! parse/config error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

/// Print a line to stdout, exiting quietly when the reader closed the pipe.
fn emit(line: std::fmt::Arguments) {
    use std::io::Write;
    if writeln!(std::io::stdout(), "{line}").is_err() {
        std::process::exit(0);
    }
}

use dyncut::config::{Config, OutputFormat};
use dyncut::gen::{generate, GenKind};
use dyncut::graph::{parse_stream, Multigraph, StreamItem, UpdateOp};
use dyncut::hierarchy::{fd_current, fd_init_cfg, fd_update, query_min_cut, InstancePool};
use dyncut::oracle::{baseline_min_cut, verify_stream};
use dyncut::reduce::{degree_reduce, lift_cutset, reduce_update, SimpleMirror};
use dyncut::DynCutError;

#[derive(Parser)]
#[command(name = "dyncut", about = "Fully dynamic minimum c-cut engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct EngineOpts {
    /// key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Target cut bound c.
    #[arg(long)]
    c: Option<i64>,
    /// Instance-pool depth.
    #[arg(long)]
    xi: Option<usize>,
    /// Instance-pool window.
    #[arg(long)]
    w: Option<usize>,
    /// Treat the input as a simple graph behind the degree-reduction layer.
    #[arg(long)]
    simple: bool,
    /// Output format: json | csv.
    #[arg(long)]
    format: Option<String>,
    /// Deterministic seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Additional key=value overrides for any config key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Drive the dynamic engine over a stream, answering after every op
    /// (and at every "q" marker).
    Run {
        graph: PathBuf,
        stream: PathBuf,
        #[command(flatten)]
        opts: EngineOpts,
        /// Answer only at "q" markers instead of after every op.
        #[arg(long)]
        queries_only: bool,
    },
    /// Replay a stream against the brute-force oracle; exit 1 on mismatch.
    Verify {
        graph: PathBuf,
        stream: PathBuf,
        #[command(flatten)]
        opts: EngineOpts,
    },
    /// Generate a deterministic (graph, stream) fixture.
    Gen {
        /// random-toggle | planted-cut | churn-burst
        kind: String,
        #[arg(long, default_value_t = 40)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        ops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix: writes <out>.graph, <out>.stream and, for
        /// planted-cut, <out>.sidecar.
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-op latency CSV: op_index,engine_ns,baseline_ns,answer_size.
    Bench {
        graph: PathBuf,
        stream: PathBuf,
        #[command(flatten)]
        opts: EngineOpts,
        /// Skip the engine and emit only sampled baseline rows.
        #[arg(long)]
        baseline_only: bool,
    },
}

fn build_config(opts: &EngineOpts) -> dyncut::Result<Config> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| DynCutError::ConfigError(format!("read {}: {e}", path.display())))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    for kv in &opts.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            DynCutError::ConfigError(format!("--set expects key=value, got {kv:?}"))
        })?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(c) = opts.c {
        cfg.c = c;
    }
    if let Some(xi) = opts.xi {
        cfg.xi = xi;
    }
    if let Some(w) = opts.w {
        cfg.w = w;
    }
    if opts.simple {
        cfg.simple = true;
    }
    if let Some(f) = &opts.format {
        cfg.format = OutputFormat::parse(f)?;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_graph(path: &PathBuf) -> dyncut::Result<Multigraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DynCutError::ParseError(format!("read {}: {e}", path.display())))?;
    Multigraph::from_graph_file(&text)
}

fn load_stream(path: &PathBuf) -> dyncut::Result<Vec<StreamItem>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DynCutError::ParseError(format!("read {}: {e}", path.display())))?;
    parse_stream(&text)
}

/// The engine being driven: either directly on the input multigraph, or on
/// the degree-reduced image of a simple graph.
struct Engine {
    pool: InstancePool,
    mirror: Option<SimpleMirror>,
}

impl Engine {
    fn new(g: &Multigraph, cfg: &Config) -> dyncut::Result<Engine> {
        if cfg.simple {
            let (reduced, mirror) = degree_reduce(g, cfg.c)?;
            let pool = fd_init_cfg(&reduced, cfg)?;
            Ok(Engine { pool, mirror: Some(mirror) })
        } else {
            Ok(Engine { pool: fd_init_cfg(g, cfg)?, mirror: None })
        }
    }

    fn apply(&mut self, op: UpdateOp) -> dyncut::Result<()> {
        match &mut self.mirror {
            Some(m) => {
                for rop in reduce_update(m, op)? {
                    fd_update(&mut self.pool, rop)?;
                }
                Ok(())
            }
            None => fd_update(&mut self.pool, op),
        }
    }

    /// (size, cutset triples in the caller's graph).
    fn answer(&self) -> dyncut::Result<(Option<i64>, Vec<(u64, u64, i64)>)> {
        let r = query_min_cut(fd_current(&self.pool))?;
        let Some(size) = r.size else {
            return Ok((None, Vec::new()));
        };
        match &self.mirror {
            Some(m) => {
                let lifted = lift_cutset(m, &r.cutset)?;
                Ok((Some(size), lifted.into_iter().map(|(u, v)| (u.0, v.0, 1)).collect()))
            }
            None => Ok((Some(size), r.cutset.into_iter().map(|(u, v, m)| (u.0, v.0, m)).collect())),
        }
    }
}

fn emit_run_record(
    cfg: &Config,
    op_index: usize,
    op: Option<&UpdateOp>,
    size: Option<i64>,
    cutset: &[(u64, u64, i64)],
    elapsed_ns: u128,
) {
    match cfg.format {
        OutputFormat::Json => {
            let rec = serde_json::json!({
                "op_index": op_index,
                "op": op.map(|o| o.to_line()).unwrap_or_else(|| "q".into()),
                "size": size,
                "cutset": cutset.iter().map(|&(u, v, m)| vec![u as i64, v as i64, m]).collect::<Vec<_>>(),
                "elapsed_ns": elapsed_ns as u64,
            });
            emit(format_args!("{rec}"));
        }
        OutputFormat::Csv => {
            let size_s = size.map(|s| s.to_string()).unwrap_or_default();
            emit(format_args!("{op_index},{size_s},{elapsed_ns}"));
        }
    }
}

fn cmd_run(
    graph: &PathBuf,
    stream: &PathBuf,
    opts: &EngineOpts,
    queries_only: bool,
) -> dyncut::Result<()> {
    let cfg = build_config(opts)?;
    let g = load_graph(graph)?;
    let items = load_stream(stream)?;
    let mut engine = Engine::new(&g, &cfg)?;
    if cfg.format == OutputFormat::Csv {
        emit(format_args!("op_index,size,elapsed_ns"));
    }
    let mut op_index = 0usize;
    if !queries_only {
        let t0 = Instant::now();
        let (size, cutset) = engine.answer()?;
        emit_run_record(&cfg, 0, None, size, &cutset, t0.elapsed().as_nanos());
    }
    for item in &items {
        match item {
            StreamItem::Op(op) => {
                op_index += 1;
                let t0 = Instant::now();
                engine.apply(*op)?;
                if !queries_only {
                    let (size, cutset) = engine.answer()?;
                    emit_run_record(&cfg, op_index, Some(op), size, &cutset, t0.elapsed().as_nanos());
                }
            }
            StreamItem::Query => {
                let t0 = Instant::now();
                let (size, cutset) = engine.answer()?;
                emit_run_record(&cfg, op_index, None, size, &cutset, t0.elapsed().as_nanos());
            }
        }
    }
    dyncut::hierarchy::prof::dump();
    Ok(())
}

fn cmd_verify(graph: &PathBuf, stream: &PathBuf, opts: &EngineOpts) -> dyncut::Result<bool> {
    let cfg = build_config(opts)?;
    let g = load_graph(graph)?;
    let items = load_stream(stream)?;
    let report = verify_stream(&g, &items, &cfg)?;
    for line in report.to_json_lines().lines() {
        emit(format_args!("{line}"));
    }
    let mism = report.mismatches();
    eprintln!("verify: {} checks, {} mismatches", report.records.len(), mism);
    Ok(mism == 0)
}

fn cmd_gen(kind: &str, n: usize, ops: usize, seed: u64, out: &PathBuf) -> dyncut::Result<()> {
    let kind = GenKind::parse(kind)?;
    let gen = generate(kind, n, ops, seed)?;
    let write = |suffix: &str, text: String| -> dyncut::Result<()> {
        let mut path = out.clone();
        path.set_extension(suffix);
        std::fs::write(&path, text)
            .map_err(|e| DynCutError::ConfigError(format!("write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    };
    write("graph", gen.graph.to_graph_file())?;
    let mut stream_text = String::new();
    for item in &gen.stream {
        match item {
            StreamItem::Op(op) => stream_text.push_str(&op.to_line()),
            StreamItem::Query => stream_text.push_str("q"),
        }
        stream_text.push('\n');
    }
    write("stream", stream_text)?;
    if let Some(sidecar) = &gen.sidecar {
        let text: String = sidecar.iter().map(|k| format!("{k}\n")).collect();
        write("sidecar", text)?;
    }
    Ok(())
}

fn cmd_bench(
    graph: &PathBuf,
    stream: &PathBuf,
    opts: &EngineOpts,
    baseline_only: bool,
) -> dyncut::Result<()> {
    let cfg = build_config(opts)?;
    let g0 = load_graph(graph)?;
    let items = load_stream(stream)?;
    let mut engine = if baseline_only { None } else { Some(Engine::new(&g0, &cfg)?) };
    let mut g = g0.clone();
    emit(format_args!("op_index,engine_ns,baseline_ns,answer_size"));
    let mut op_index = 0usize;
    for item in &items {
        let StreamItem::Op(op) = item else { continue };
        op_index += 1;
        g.apply_update(*op)?;
        let (engine_ns, answer) = match &mut engine {
            Some(e) => {
                let t0 = Instant::now();
                e.apply(*op)?;
                let (size, _) = e.answer()?;
                (t0.elapsed().as_nanos().to_string(), size.map(|s| s.to_string()).unwrap_or_default())
            }
            None => (String::new(), String::new()),
        };
        let baseline_ns = if op_index % cfg.baseline_every.max(1) == 0 {
            let t0 = Instant::now();
            let _ = baseline_min_cut(&g);
            t0.elapsed().as_nanos().to_string()
        } else {
            String::new()
        };
        emit(format_args!("{op_index},{engine_ns},{baseline_ns},{answer}"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Run { graph, stream, opts, queries_only } => {
            cmd_run(graph, stream, opts, *queries_only).map(|()| true)
        }
        Cmd::Verify { graph, stream, opts } => cmd_verify(graph, stream, opts),
        Cmd::Gen { kind, n, ops, seed, out } => cmd_gen(kind, *n, *ops, *seed, out).map(|()| true),
        Cmd::Bench { graph, stream, opts, baseline_only } => {
            cmd_bench(graph, stream, opts, *baseline_only).map(|()| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
