//! Glue between the engine's types and the dense oracle.

#![allow(dead_code)]

use massgraph::{Event, GraphState, NodeId};

use super::oracle::{Dense, DenseEvent};

pub fn dense_from(initial: &GraphState) -> Dense {
    let masses: Vec<f64> = initial.nodes().iter().map(|n| n.mass).collect();
    let edges: Vec<(usize, usize, f64)> = initial
        .edges()
        .map(|e| (e.key.lo().get() as usize, e.key.hi().get() as usize, e.weight))
        .collect();
    Dense::new(initial.params().mu(), initial.params().sigma(), &masses, &edges)
}

pub fn dense_event(event: &Event) -> DenseEvent {
    match event {
        Event::AddEdge { k, l, initial_weight } => {
            DenseEvent::Edge(k.get() as usize, l.get() as usize, *initial_weight)
        }
        Event::AddNode { initial_mass, .. } => DenseEvent::Node(*initial_mass),
        Event::Prune { threshold } => DenseEvent::Prune(*threshold),
    }
}

/// Largest absolute deviation over masses and all matrix entries, or a
/// description of a structural mismatch.
pub fn max_deviation(dense: &Dense, state: &GraphState) -> Result<f64, String> {
    if dense.phase != state.phase() {
        return Err(format!("phase {} vs {}", dense.phase, state.phase()));
    }
    if dense.n() != state.nodes().len() {
        return Err(format!("{} nodes vs {}", dense.n(), state.nodes().len()));
    }
    let mut worst: f64 = 0.0;
    for (i, node) in state.nodes().iter().enumerate() {
        if node.alive != dense.alive[i] {
            return Err(format!(
                "node {} alive {} vs oracle {}",
                i + 1,
                node.alive,
                dense.alive[i]
            ));
        }
        worst = worst.max((node.mass - dense.mass[i]).abs());
    }
    let n = dense.n();
    for i in 0..n {
        for j in 0..n {
            let w = state
                .weight(NodeId(i as u32 + 1), NodeId(j as u32 + 1))
                .map_err(|e| e.to_string())?;
            let present = state.has_edge(NodeId(i as u32 + 1), NodeId(j as u32 + 1));
            if present != (dense.w[i][j] != 0.0) {
                return Err(format!("pair ({}, {}) presence differs", i + 1, j + 1));
            }
            worst = worst.max((w - dense.w[i][j]).abs());
        }
    }
    Ok(worst)
}
