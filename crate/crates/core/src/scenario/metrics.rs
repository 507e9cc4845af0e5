use alloc::vec;
use alloc::vec::Vec;
use core::num::NonZeroUsize;

use crate::graph::{GraphState, NodeId};

/// Summary statistics of one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub phase: u64,
    pub total_mass: f64,
    pub alive_nodes: usize,
    pub alive_edges: usize,
    /// Heaviest alive node; the lowest id wins ties.
    pub max_mass_node: Option<(NodeId, f64)>,
    /// Share of total mass held by the `k` heaviest nodes; 1 when at most `k`
    /// nodes are alive.
    pub top_k_mass_share: f64,
    /// `degree_histogram[d]` counts alive nodes of degree `d`.
    pub degree_histogram: Vec<usize>,
}

pub fn metrics(state: &GraphState, k: NonZeroUsize) -> MetricsReport {
    let k = k.get();
    let total_mass = state.total_mass();
    let mut masses: Vec<f64> = state.alive_nodes().map(|n| n.mass).collect();
    let alive_nodes = masses.len();

    let max_mass_node = state
        .alive_nodes()
        .fold(None, |best: Option<(NodeId, f64)>, n| match best {
            Some((_, m)) if m >= n.mass => best,
            _ => Some((n.id, n.mass)),
        });

    let top_k_mass_share = if alive_nodes <= k {
        1.0
    } else {
        masses.sort_by(|a, b| b.total_cmp(a));
        masses[..k].iter().sum::<f64>() / total_mass
    };

    let mut degree_histogram = vec![];
    for node in state.alive_nodes() {
        let d = state.degree(node.id).unwrap_or(0);
        if degree_histogram.len() <= d {
            degree_histogram.resize(d + 1, 0);
        }
        degree_histogram[d] += 1;
    }

    MetricsReport {
        phase: state.phase(),
        total_mass,
        alive_nodes,
        alive_edges: state.edge_count(),
        max_mass_node,
        top_k_mass_share,
        degree_histogram,
    }
}
