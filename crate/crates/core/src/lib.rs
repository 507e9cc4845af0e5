//! Mass-based dynamic graphs.
//!
//! Nodes carry a mass (importance of an atomic proposition), edges a weight
//! (strength of association). A phase-1 settlement makes the raw phase-0
//! inputs consistent; afterwards every phase applies one event: a new edge
//! reinforces both endpoint masses and re-weights their other edges, a new
//! node simply joins, and a prune forgets weak edges and the nodes they leave
//! isolated.
//!
//! The crate is `no_std` with `alloc`. All transcendental functions go through
//! `libm`, so results are bit-identical across platforms.

#![cfg_attr(not(test), no_std)]
// `!(x > y)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod engine;
pub mod graph;
pub mod kernel;
pub mod scenario;

pub use engine::{
    apply_edge_event, apply_event, apply_node_event, apply_prune, settle_phase_one, EngineError, Event, PruneReport,
};
pub use graph::{EdgeKey, EdgeRecord, GraphError, GraphState, NodeId, NodeRecord};
pub use kernel::{
    log_cauchy_pdf, reinforcement, validate_kernel_params, KernelError, KernelParams, MonotonicityReport,
};
pub use scenario::{
    generate_scenario, metrics, run_script, EventMix, KernelChoice, MetricsReport, PhaseHistory, RunError, Scenario,
    ScenarioConfig, ScenarioError, Snapshot, SnapshotContent, SnapshotMode,
};
