//! History JSON.
//!
//! `{"script": <script document>, "snapshots": [...], "prune_reports": [...]}`
//! where a full snapshot is `{"phase", "nodes": [{"id", "mass", "alive"}], "edges": [[i, j, w]]}`
//! and a digest-only snapshot is `{"phase", "digest": "<sha256 hex>"}`.
//! Nodes carry `"label"` only when they have one.

use massgraph::{EdgeKey, EdgeRecord, GraphState, NodeId, NodeRecord, PhaseHistory, PruneReport, SnapshotContent};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::canonical::to_canonical_string;
use crate::script::{document_to_domain, render_document, syntax_error, JsonFloat, ScriptDocument, ScriptError};

fn float(v: f64) -> Value {
    serde_json::to_value(JsonFloat(v)).expect("floats always serialize")
}

fn edge_triple(key: EdgeKey, weight: f64) -> Value {
    json!([key.lo().get(), key.hi().get(), float(weight)])
}

pub fn state_value(state: &GraphState) -> Value {
    let nodes: Vec<Value> = state
        .nodes()
        .iter()
        .map(|n| {
            let mut m = Map::new();
            m.insert("id".into(), json!(n.id.get()));
            m.insert("mass".into(), float(n.mass));
            m.insert("alive".into(), json!(n.alive));
            if let Some(label) = &n.label {
                m.insert("label".into(), json!(label));
            }
            Value::Object(m)
        })
        .collect();
    let edges: Vec<Value> = state.edges().map(|e| edge_triple(e.key, e.weight)).collect();
    json!({"phase": state.phase(), "nodes": nodes, "edges": edges})
}

fn prune_value(phase: u64, report: &PruneReport) -> Value {
    json!({
        "phase": phase,
        "threshold": float(report.threshold),
        "removed_edges": report.removed_edges.iter().map(|(k, w)| edge_triple(*k, *w)).collect::<Vec<_>>(),
        "removed_nodes": report.removed_nodes.iter().map(|id| id.get()).collect::<Vec<_>>(),
    })
}

pub fn history_value(history: &PhaseHistory) -> Value {
    let script =
        serde_json::to_value(render_document(&history.initial, &history.events)).expect("script documents serialize");
    let snapshots: Vec<Value> = history
        .snapshots
        .iter()
        .map(|s| match &s.content {
            SnapshotContent::Full(state) => state_value(state),
            SnapshotContent::Digest(d) => json!({"phase": s.phase, "digest": hex::encode(d)}),
        })
        .collect();
    let prune_reports: Vec<Value> = history.prune_reports.iter().map(|(p, r)| prune_value(*p, r)).collect();
    json!({"script": script, "snapshots": snapshots, "prune_reports": prune_reports})
}

/// Canonical history JSON. Identical histories give identical bytes.
pub fn export_history_json(history: &PhaseHistory) -> Vec<u8> {
    to_canonical_string(&history_value(history)).into_bytes()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryDoc {
    pub script: ScriptDocument,
    pub snapshots: Vec<SnapshotDoc>,
    pub prune_reports: Vec<PruneReportDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotDoc {
    pub phase: u64,
    #[serde(default)]
    pub nodes: Option<Vec<NodeDoc>>,
    #[serde(default)]
    pub edges: Option<Vec<(u32, u32, JsonFloat)>>,
    #[serde(default)]
    pub digest: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: u32,
    pub mass: JsonFloat,
    pub alive: bool,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PruneReportDoc {
    pub phase: u64,
    pub threshold: JsonFloat,
    pub removed_edges: Vec<(u32, u32, JsonFloat)>,
    pub removed_nodes: Vec<u32>,
}

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error("snapshots[{index}]: {message}")]
    Snapshot { index: usize, message: String },
}

/// One decoded snapshot: a full state, or only its digest.
#[derive(Debug, Clone)]
pub enum LoadedSnapshot {
    Full(GraphState),
    Digest { phase: u64, digest: String },
}

pub struct LoadedHistory {
    pub doc: HistoryDoc,
    pub snapshots: Vec<LoadedSnapshot>,
}

pub fn parse_history(bytes: &[u8]) -> Result<LoadedHistory, HistoryError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let doc: HistoryDoc = serde_path_to_error::deserialize(&mut de).map_err(syntax_error)?;
    let params = document_to_domain(&doc.script)
        .map_err(|e| match e {
            ScriptError::Constraint { path, message } => ScriptError::Constraint {
                path: format!("script.{path}"),
                message,
            },
            other => other,
        })?
        .params;

    let mut snapshots = Vec::with_capacity(doc.snapshots.len());
    for (index, snap) in doc.snapshots.iter().enumerate() {
        let fail = |message: String| HistoryError::Snapshot { index, message };
        let loaded = match (&snap.nodes, &snap.edges, &snap.digest) {
            (Some(nodes), Some(edges), None) => {
                let nodes = nodes
                    .iter()
                    .map(|n| NodeRecord {
                        id: NodeId(n.id),
                        mass: n.mass.0,
                        label: n.label.clone(),
                        alive: n.alive,
                    })
                    .collect();
                // creation phases are not part of the format
                let edges = edges
                    .iter()
                    .map(|&(i, j, w)| EdgeRecord {
                        key: EdgeKey::new(NodeId(i), NodeId(j)),
                        weight: w.0,
                        created_phase: 0,
                    })
                    .collect();
                LoadedSnapshot::Full(
                    GraphState::from_parts(snap.phase, nodes, edges, params).map_err(|e| fail(e.to_string()))?,
                )
            }
            (None, None, Some(d)) => LoadedSnapshot::Digest {
                phase: snap.phase,
                digest: d.clone(),
            },
            _ => return Err(fail("expected either nodes and edges, or a digest".into())),
        };
        snapshots.push(loaded);
    }
    Ok(LoadedHistory { doc, snapshots })
}
