use alloc::vec::Vec;

use thiserror::Error;

use crate::engine::{apply_event, settle_phase_one, EngineError, Event, PruneReport};
use crate::graph::GraphState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotMode {
    #[default]
    Full,
    /// Keep only a SHA-256 digest per phase; for long runs.
    DigestOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotContent {
    Full(GraphState),
    Digest([u8; 32]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub phase: u64,
    pub content: SnapshotContent,
}

impl Snapshot {
    fn capture(state: &GraphState, mode: SnapshotMode) -> Self {
        let content = match mode {
            SnapshotMode::Full => SnapshotContent::Full(state.clone()),
            SnapshotMode::DigestOnly => SnapshotContent::Digest(state.digest()),
        };
        Snapshot {
            phase: state.phase(),
            content,
        }
    }

    pub fn state(&self) -> Option<&GraphState> {
        match &self.content {
            SnapshotContent::Full(s) => Some(s),
            SnapshotContent::Digest(_) => None,
        }
    }

    pub fn digest(&self) -> [u8; 32] {
        match &self.content {
            SnapshotContent::Full(s) => s.digest(),
            SnapshotContent::Digest(d) => *d,
        }
    }
}

/// Every phase of one run: snapshot `i` is phase `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistory {
    pub initial: GraphState,
    pub events: Vec<Event>,
    pub snapshots: Vec<Snapshot>,
    /// Prune reports keyed by the phase the prune produced.
    pub prune_reports: Vec<(u64, PruneReport)>,
    pub final_state: GraphState,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("initial state is invalid: {}", .0.join("; "))]
    InvalidInitial(Vec<alloc::string::String>),
    #[error("settlement failed: {0}")]
    Settlement(EngineError),
    #[error("phase {phase} (event #{index}, {event:?}): {source}")]
    Event {
        phase: u64,
        index: usize,
        event: Event,
        source: EngineError,
    },
}

/// Settles `initial` and applies `events` in order, capturing a snapshot after
/// every transition.
pub fn run_script(initial: &GraphState, events: &[Event], mode: SnapshotMode) -> Result<PhaseHistory, RunError> {
    let violations = initial.validate();
    if !violations.is_empty() {
        return Err(RunError::InvalidInitial(violations));
    }
    let mut snapshots = Vec::with_capacity(events.len() + 2);
    snapshots.push(Snapshot::capture(initial, mode));

    let mut state = settle_phase_one(initial).map_err(RunError::Settlement)?;
    snapshots.push(Snapshot::capture(&state, mode));

    let mut prune_reports = Vec::new();
    for (index, event) in events.iter().enumerate() {
        let (next, report) = apply_event(&state, event).map_err(|source| RunError::Event {
            phase: state.phase() + 1,
            index,
            event: event.clone(),
            source,
        })?;
        if let Some(report) = report {
            prune_reports.push((next.phase(), report));
        }
        snapshots.push(Snapshot::capture(&next, mode));
        state = next;
    }

    Ok(PhaseHistory {
        initial: initial.clone(),
        events: events.to_vec(),
        snapshots,
        prune_reports,
        final_state: state,
    })
}
