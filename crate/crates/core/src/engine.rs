//! Phase transitions. Each transition maps one [`GraphState`] to the next and
//! never mutates its input.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{EdgeKey, GraphError, GraphState, NodeId};
use crate::kernel::{reinforcement, KernelError};

/// One phase's dynamic input.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    AddEdge { k: NodeId, l: NodeId, initial_weight: f64 },
    AddNode { initial_mass: f64, label: Option<String> },
    Prune { threshold: f64 },
}

/// Removals performed by one prune.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneReport {
    pub threshold: f64,
    /// Removed pairs with the weight they had when removed.
    pub removed_edges: Vec<(EdgeKey, f64)>,
    pub removed_nodes: Vec<NodeId>,
}

impl PruneReport {
    pub fn is_empty(&self) -> bool {
        self.removed_edges.is_empty() && self.removed_nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("settlement requires phase 0, state is at phase {0}")]
    NotPhaseZero(u64),
    #[error("edge events require phase 1 or later; settle the phase-0 state first")]
    NotSettled,
    #[error("edge ({k}, {l}) already exists")]
    DuplicateEdge { k: NodeId, l: NodeId },
    #[error("edge ({k}, {l}) would lie on the diagonal")]
    Diagonal { k: NodeId, l: NodeId },
    #[error("node {0} has been removed")]
    DeadNode(NodeId),
    #[error("initial weight {0} must be finite and greater than 1")]
    InvalidWeight(f64),
    #[error("initial mass {0} must be finite and greater than 1")]
    InvalidMass(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Phase 0 -> phase 1.
///
/// Masses absorb `f` of every incident initial weight; then each existing
/// edge adds `ln` of the sum of its endpoints' new masses. Absent pairs stay
/// absent.
pub fn settle_phase_one(state: &GraphState) -> Result<GraphState, EngineError> {
    if state.phase() != 0 {
        return Err(EngineError::NotPhaseZero(state.phase()));
    }
    let params = *state.params();
    let mut next = state.clone();

    // Per-node increments are summed in ascending neighbour order.
    for node in state.nodes() {
        if !node.alive {
            continue;
        }
        let mut gain = 0.0;
        for other in state.neighbors(node.id)? {
            gain += reinforcement(state.weight(node.id, other)?, &params)?;
        }
        next.node_mut(node.id).mass = node.mass + gain;
    }

    let keys: Vec<EdgeKey> = state.edges().map(|e| e.key).collect();
    for key in keys {
        let sum = next.mass(key.lo())? + next.mass(key.hi())?;
        if let Some(edge) = next.edge_mut(&key) {
            edge.weight += libm::log(sum);
        }
    }
    next.set_phase(1);
    Ok(next)
}

fn require_alive(state: &GraphState, id: NodeId) -> Result<(), EngineError> {
    if state.is_alive(id)? {
        Ok(())
    } else {
        Err(EngineError::DeadNode(id))
    }
}

/// Adds the edge `(k, l)` with dynamic input `initial_weight`.
///
/// Order of evaluation: both endpoint masses grow by `f(w)`, the new edge gets
/// `w + ln(M_k + M_l)` from the grown masses, then every other edge at `k` or
/// `l` adds `ln f(w)` in ascending neighbour order. `ln f(w)` is negative when
/// `f(w) < 1`, in which case those weights shrink.
pub fn apply_edge_event(
    state: &GraphState,
    k: NodeId,
    l: NodeId,
    initial_weight: f64,
) -> Result<GraphState, EngineError> {
    if state.phase() == 0 {
        return Err(EngineError::NotSettled);
    }
    if k == l {
        return Err(EngineError::Diagonal { k, l });
    }
    require_alive(state, k)?;
    require_alive(state, l)?;
    if !(initial_weight > 1.0) || !initial_weight.is_finite() {
        return Err(EngineError::InvalidWeight(initial_weight));
    }
    if state.has_edge(k, l) {
        return Err(EngineError::DuplicateEdge { k, l });
    }

    let params = *state.params();
    let gain = reinforcement(initial_weight, &params)?;
    let phase = state.phase() + 1;
    let mut next = state.clone();

    let mass_k = state.mass(k)? + gain;
    let mass_l = state.mass(l)? + gain;
    next.node_mut(k).mass = mass_k;
    next.node_mut(l).mass = mass_l;

    next.insert_edge(EdgeKey::new(k, l), initial_weight + libm::log(mass_k + mass_l), phase);

    // Incident updates walk the previous state's neighbour lists, which never
    // include the new pair. The increment is ln(M_t - M_{t-1}) taken literally
    // from the stored masses.
    let delta_k = libm::log(mass_k - state.mass(k)?);
    let delta_l = libm::log(mass_l - state.mass(l)?);

    for (endpoint, delta) in [(k, delta_k), (l, delta_l)] {
        for p in state.neighbors(endpoint)? {
            if let Some(edge) = next.edge_mut(&EdgeKey::new(endpoint, p)) {
                edge.weight += delta;
            }
        }
    }

    next.set_phase(phase);
    Ok(next)
}

/// Appends a node; nothing else changes apart from the phase counter.
pub fn apply_node_event(
    state: &GraphState,
    initial_mass: f64,
    label: Option<String>,
) -> Result<GraphState, EngineError> {
    if !(initial_mass > 1.0) || !initial_mass.is_finite() {
        return Err(EngineError::InvalidMass(initial_mass));
    }
    let mut next = state.clone();
    next.push_node(initial_mass, label);
    next.set_phase(state.phase() + 1);
    Ok(next)
}

/// Removes every edge with weight below `threshold`, then every alive node
/// left without edges (including nodes that were already isolated).
pub fn apply_prune(state: &GraphState, threshold: f64) -> (GraphState, PruneReport) {
    let mut next = state.clone();
    let doomed: Vec<(EdgeKey, f64)> = state
        .edges()
        .filter(|e| e.weight < threshold)
        .map(|e| (e.key, e.weight))
        .collect();
    for (key, _) in &doomed {
        next.remove_edge(key);
    }
    let mut removed_nodes = Vec::new();
    for node in state.nodes() {
        if node.alive && next.degree(node.id).unwrap_or(0) == 0 {
            next.node_mut(node.id).alive = false;
            removed_nodes.push(node.id);
        }
    }
    next.set_phase(state.phase() + 1);
    (
        next,
        PruneReport {
            threshold,
            removed_edges: doomed,
            removed_nodes,
        },
    )
}

/// Dispatches one event to the matching transition.
pub fn apply_event(state: &GraphState, event: &Event) -> Result<(GraphState, Option<PruneReport>), EngineError> {
    match event {
        Event::AddEdge { k, l, initial_weight } => Ok((apply_edge_event(state, *k, *l, *initial_weight)?, None)),
        Event::AddNode { initial_mass, label } => Ok((apply_node_event(state, *initial_mass, label.clone())?, None)),
        Event::Prune { threshold } => {
            let (next, report) = apply_prune(state, *threshold);
            Ok((next, Some(report)))
        }
    }
}
