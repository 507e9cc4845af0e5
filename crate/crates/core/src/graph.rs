//! Graph state: node masses, a sparse symmetric weight matrix and the phase counter.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::kernel::KernelParams;

/// Permanent 1-based node identifier. Ids are never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn get(self) -> u32 {
        self.0
    }

    fn index(self) -> usize {
        (self.0 as usize).wrapping_sub(1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unordered node pair, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    lo: NodeId,
    hi: NodeId,
}

impl EdgeKey {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            EdgeKey { lo: a, hi: b }
        } else {
            EdgeKey { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> NodeId {
        self.lo
    }

    pub fn hi(&self) -> NodeId {
        self.hi
    }

    pub fn other(&self, id: NodeId) -> Option<NodeId> {
        if id == self.lo {
            Some(self.hi)
        } else if id == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub mass: f64,
    pub label: Option<String>,
    pub alive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub key: EdgeKey,
    pub weight: f64,
    /// Phase of the most recent creation of this pair's edge.
    pub created_phase: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("node {index}: mass {mass} must be finite and greater than 1")]
    InvalidMass { index: usize, mass: f64 },
    #[error("edge {pair}: weight {weight} must be finite and greater than 1")]
    InvalidWeight { pair: EdgeKey, weight: f64 },
    #[error("edge ({i}, {j}) lies on the diagonal")]
    Diagonal { i: u32, j: u32 },
    #[error("edge ({i}, {j}) refers to a node outside 1..={n}")]
    OutOfRange { i: u32, j: u32, n: usize },
    #[error("duplicate edge {pair}")]
    DuplicateEdge { pair: EdgeKey },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node at position {position} carries id {id} (ids must run 1, 2, 3, ...)")]
    Misnumbered { id: NodeId, position: usize },
}

/// One phase of a mass-based graph.
///
/// The weight matrix is implied by `edges`: each unordered pair is stored once,
/// so reads through either orientation agree, and absent pairs read as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState {
    phase: u64,
    nodes: Vec<NodeRecord>,
    edges: BTreeMap<EdgeKey, EdgeRecord>,
    adjacency: Vec<BTreeSet<NodeId>>,
    params: KernelParams,
}

impl GraphState {
    /// Builds the phase-0 state from initial masses and `(i, j, w)` triples
    /// with 1-based indices.
    pub fn new(masses: &[f64], weights: &[(u32, u32, f64)], params: KernelParams) -> Result<Self, GraphError> {
        for (index, &mass) in masses.iter().enumerate() {
            if !(mass > 1.0) || !mass.is_finite() {
                return Err(GraphError::InvalidMass { index: index + 1, mass });
            }
        }
        let n = masses.len();
        let nodes = masses
            .iter()
            .enumerate()
            .map(|(i, &mass)| NodeRecord {
                id: NodeId(i as u32 + 1),
                mass,
                label: None,
                alive: true,
            })
            .collect();
        let mut state = GraphState {
            phase: 0,
            nodes,
            edges: BTreeMap::new(),
            adjacency: alloc::vec![BTreeSet::new(); n],
            params,
        };
        for &(i, j, w) in weights {
            if i == j {
                return Err(GraphError::Diagonal { i, j });
            }
            if i == 0 || j == 0 || i as usize > n || j as usize > n {
                return Err(GraphError::OutOfRange { i, j, n });
            }
            let key = EdgeKey::new(NodeId(i), NodeId(j));
            if !(w > 1.0) || !w.is_finite() {
                return Err(GraphError::InvalidWeight { pair: key, weight: w });
            }
            if state.edges.contains_key(&key) {
                return Err(GraphError::DuplicateEdge { pair: key });
            }
            state.insert_edge(key, w, 0);
        }
        Ok(state)
    }

    /// Assembles a state without checking any invariant. Use [`validate`] to
    /// inspect the result. Nodes must be listed in id order starting at 1.
    ///
    /// Only duplicate pairs are refused, since the sparse representation cannot
    /// hold them.
    pub fn from_parts(
        phase: u64,
        nodes: Vec<NodeRecord>,
        edges: Vec<EdgeRecord>,
        params: KernelParams,
    ) -> Result<Self, GraphError> {
        for (index, node) in nodes.iter().enumerate() {
            if node.id.index() != index {
                return Err(GraphError::Misnumbered {
                    id: node.id,
                    position: index + 1,
                });
            }
        }
        let mut state = GraphState {
            phase,
            adjacency: alloc::vec![BTreeSet::new(); nodes.len()],
            nodes,
            edges: BTreeMap::new(),
            params,
        };
        for edge in edges {
            let key = EdgeKey::new(edge.key.lo, edge.key.hi);
            if state.edges.contains_key(&key) {
                return Err(GraphError::DuplicateEdge { pair: key });
            }
            state.edges.insert(key, EdgeRecord { key, ..edge });
            for (a, b) in [(key.lo, key.hi), (key.hi, key.lo)] {
                if let Some(set) = state.adjacency.get_mut(a.index()) {
                    set.insert(b);
                }
            }
        }
        Ok(state)
    }

    pub fn phase(&self) -> u64 {
        self.phase
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// Id the next added node will receive.
    pub fn next_id(&self) -> NodeId {
        NodeId(self.nodes.len() as u32 + 1)
    }

    /// All nodes ever created, dead ones included, in id order.
    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn alive_nodes(&self) -> impl Iterator<Item = &NodeRecord> + '_ {
        self.nodes.iter().filter(|n| n.alive)
    }

    /// Present edges in ascending pair order.
    pub fn edges(&self) -> impl Iterator<Item = &EdgeRecord> + '_ {
        self.edges.values()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Result<&NodeRecord, GraphError> {
        self.nodes.get(id.index()).ok_or(GraphError::UnknownNode(id))
    }

    pub fn mass(&self, id: NodeId) -> Result<f64, GraphError> {
        self.node(id).map(|n| n.mass)
    }

    pub fn is_alive(&self, id: NodeId) -> Result<bool, GraphError> {
        self.node(id).map(|n| n.alive)
    }

    /// Symmetric weight lookup; the diagonal and absent pairs read as 0.
    pub fn weight(&self, i: NodeId, j: NodeId) -> Result<f64, GraphError> {
        self.node(i)?;
        self.node(j)?;
        Ok(self.edges.get(&EdgeKey::new(i, j)).map_or(0.0, |e| e.weight))
    }

    pub fn edge(&self, i: NodeId, j: NodeId) -> Option<&EdgeRecord> {
        self.edges.get(&EdgeKey::new(i, j))
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        i != j && self.edges.contains_key(&EdgeKey::new(i, j))
    }

    pub fn degree(&self, id: NodeId) -> Result<usize, GraphError> {
        self.node(id)?;
        Ok(self.adjacency[id.index()].len())
    }

    /// Neighbours of `id` in ascending id order.
    pub fn neighbors(&self, id: NodeId) -> Result<impl Iterator<Item = NodeId> + '_, GraphError> {
        self.node(id)?;
        Ok(self.adjacency[id.index()].iter().copied())
    }

    /// Sum of alive masses (Neumaier-compensated, ascending id order).
    pub fn total_mass(&self) -> f64 {
        let mut sum = 0.0f64;
        let mut carry = 0.0f64;
        for m in self.alive_nodes().map(|n| n.mass) {
            let t = sum + m;
            if sum.abs() >= m.abs() {
                carry += (sum - t) + m;
            } else {
                carry += (m - t) + sum;
            }
            sum = t;
        }
        sum + carry
    }

    /// Every violated structural invariant. Empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (index, node) in self.nodes.iter().enumerate() {
            if node.id.index() != index {
                out.push(format!("node at position {} carries id {}", index + 1, node.id));
            }
            if node.alive && (!(node.mass > 1.0) || !node.mass.is_finite()) {
                out.push(format!("node {}: mass {} is not greater than 1", node.id, node.mass));
            }
        }
        for (key, edge) in &self.edges {
            if edge.key != *key {
                out.push(format!("edge {key}: record stores pair {}", edge.key));
            }
            if key.lo == key.hi {
                out.push(format!("edge {key}: diagonal entry"));
            }
            match (self.nodes.get(key.lo.index()), self.nodes.get(key.hi.index())) {
                (Some(a), Some(b)) => {
                    if !a.alive || !b.alive {
                        out.push(format!("edge {key}: touches a dead node"));
                    }
                }
                _ => out.push(format!("edge {key}: touches an unknown node")),
            }
            if !edge.weight.is_finite() {
                out.push(format!("edge {key}: weight {} is not finite", edge.weight));
            }
            if edge.created_phase > self.phase {
                out.push(format!(
                    "edge {key}: created at phase {} after current phase {}",
                    edge.created_phase, self.phase
                ));
            }
        }
        for (index, set) in self.adjacency.iter().enumerate() {
            let id = NodeId(index as u32 + 1);
            for &other in set {
                if !self.edges.contains_key(&EdgeKey::new(id, other)) {
                    out.push(format!("adjacency of {id} lists {other} without an edge"));
                }
            }
        }
        let listed: usize = self.adjacency.iter().map(BTreeSet::len).sum();
        if listed != 2 * self.edges.len() {
            out.push(format!(
                "adjacency lists {listed} endpoints for {} edges",
                self.edges.len()
            ));
        }
        out
    }

    /// SHA-256 over a canonical byte encoding of the state.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.phase.to_le_bytes());
        h.update(self.params.mu().to_bits().to_le_bytes());
        h.update(self.params.sigma().to_bits().to_le_bytes());
        h.update((self.nodes.len() as u64).to_le_bytes());
        for node in &self.nodes {
            h.update(node.id.0.to_le_bytes());
            h.update(node.mass.to_bits().to_le_bytes());
            h.update([node.alive as u8]);
            match &node.label {
                Some(label) => {
                    h.update([1]);
                    h.update((label.len() as u64).to_le_bytes());
                    h.update(label.as_bytes());
                }
                None => h.update([0]),
            }
        }
        h.update((self.edges.len() as u64).to_le_bytes());
        for edge in self.edges.values() {
            h.update(edge.key.lo.0.to_le_bytes());
            h.update(edge.key.hi.0.to_le_bytes());
            h.update(edge.weight.to_bits().to_le_bytes());
            h.update(edge.created_phase.to_le_bytes());
        }
        h.finalize().into()
    }

    // Mutation is crate-private: the phase engine produces each next state
    // from a clone of the previous one.

    pub(crate) fn set_phase(&mut self, phase: u64) {
        self.phase = phase;
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut NodeRecord {
        &mut self.nodes[id.index()]
    }

    pub(crate) fn edge_mut(&mut self, key: &EdgeKey) -> Option<&mut EdgeRecord> {
        self.edges.get_mut(key)
    }

    pub(crate) fn insert_edge(&mut self, key: EdgeKey, weight: f64, created_phase: u64) {
        self.edges.insert(
            key,
            EdgeRecord {
                key,
                weight,
                created_phase,
            },
        );
        self.adjacency[key.lo.index()].insert(key.hi);
        self.adjacency[key.hi.index()].insert(key.lo);
    }

    pub(crate) fn remove_edge(&mut self, key: &EdgeKey) -> Option<EdgeRecord> {
        let removed = self.edges.remove(key)?;
        self.adjacency[key.lo.index()].remove(&key.hi);
        self.adjacency[key.hi.index()].remove(&key.lo);
        Some(removed)
    }

    pub(crate) fn push_node(&mut self, mass: f64, label: Option<String>) -> NodeId {
        let id = self.next_id();
        self.nodes.push(NodeRecord {
            id,
            mass,
            label,
            alive: true,
        });
        self.adjacency.push(BTreeSet::new());
        id
    }
}
