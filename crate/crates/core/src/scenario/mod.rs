//! Scripted and seeded runs of the phase engine.

mod generate;
mod history;
mod metrics;

pub use generate::{generate_scenario, EventMix, KernelChoice, Scenario, ScenarioConfig, ScenarioError};
pub use history::{run_script, PhaseHistory, RunError, Snapshot, SnapshotContent, SnapshotMode};
pub use metrics::{metrics, MetricsReport};
