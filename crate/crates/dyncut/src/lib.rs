//! Fully dynamic minimum c-cut engine.
//!
//! The crate maintains, under online edge/vertex insertions and deletions, a
//! minimum cut of a multigraph whenever its size is at most `c`.  The engine is
//! built from four layers:
//!
//! * [`graph`] — the multigraph model, update operations, and the
//!   degree-reduction gadget that maps simple graphs to bounded-degree
//!   multigraphs with a bijection on small cuts;
//! * [`expander`] — conductance, expander decomposition, and expander pruning
//!   with verifiable output contracts;
//! * [`sparsify`] — cut containment sets, forest contraction, and terminal
//!   edge-connectivity sparsifiers, plus the one-level data structure built
//!   from them;
//! * [`local_cuts`] + [`hierarchy`] — the auxiliary graph with special
//!   terminals, the local-cut enumerator with its priority queue, the
//!   multi-level structure, the level-descending query, and the rotating
//!   instance pool that turns batch updates into per-operation updates.
//!
//! [`oracle`] holds independent brute-force ground truth used by the test
//! suite; it deliberately shares no code with the engine layers.

pub mod config;
pub mod expander;
pub mod gen;
pub mod graph;
pub mod hierarchy;
pub mod local_cuts;
pub mod oracle;
pub mod reduce;
pub mod sparsify;

pub(crate) mod flow;

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Unified error type for every layer of the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynCutError {
    /// An update operation's precondition failed (names the condition).
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    /// A cut-set lift encountered a chain edge (multiplicity c+1).
    #[error("non-liftable edge in cut-set: {0}")]
    NonLiftableEdge(String),
    /// A vertex id was not present in the graph.
    #[error("unknown vertex {0}")]
    UnknownVertex(u64),
    /// Requested decomposition parameters cannot be met; reports what was achieved.
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    /// Pruning budget exceeded: k > phi*m/10.
    #[error("too many deletions for pruning: k={k}, budget={budget}")]
    TooManyDeletions { k: i64, budget: String },
    /// A structural parameter constraint (e.g. gamma > c) failed.
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    /// Incremental maintenance cannot proceed; the caller must re-initialize.
    #[error("rebuild required: {0}")]
    RebuildRequired(String),
    /// Exhaustive terminal-bipartition validation asked for too many terminals.
    #[error("too many terminals: {0}")]
    TooManyTerminals(usize),
    /// Multi-level initialization exceeded the configured level cap.
    #[error("level cap exceeded: {0}")]
    LevelCapExceeded(String),
    /// The batch schedule ran out of parameter grades.
    #[error("schedule exhausted: {0}")]
    ScheduleExhausted(String),
    /// An internal invariant that is impossible by construction was violated.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    /// A file or stream failed to parse (reports the line).
    #[error("parse error: {0}")]
    ParseError(String),
    /// A configuration key or value was invalid.
    #[error("config error: {0}")]
    ConfigError(String),
    /// The verify harness size cap was exceeded.
    #[error("size cap exceeded: {0}")]
    SizeCapExceeded(String),
    /// A brute-force oracle was asked for an instance above its size cap.
    #[error("instance too large for oracle: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, DynCutError>;

static EDGE_ID_COUNTER: AtomicU64 = AtomicU64::new(1);
/// Internal vertices (degree-reduction gadgets, special terminals) are
/// allocated from a high range so they can never collide with user ids.
static INTERNAL_VERTEX_COUNTER: AtomicU64 = AtomicU64::new(1 << 40);

/// Allocate a session-unique edge id.  Ids are never recycled.
pub fn fresh_edge_id() -> u64 {
    EDGE_ID_COUNTER.fetch_add(1, Ordering::Relaxed)
}

/// Allocate a session-unique internal vertex id (>= 2^40).
pub fn fresh_internal_vertex() -> graph::VertexId {
    graph::VertexId(INTERNAL_VERTEX_COUNTER.fetch_add(1, Ordering::Relaxed))
}
