//! File formats and command-line driver for the `massgraph` simulator.

mod canonical;
pub mod cli;
pub mod dot;
pub mod history;
pub mod script;

pub use canonical::to_canonical_string;
pub use cli::run_cli;
pub use dot::{export_dot, DotStyle};
pub use history::{export_history_json, parse_history};
pub use script::{parse_script, render_script, ParsedScript, ScriptDocument, ScriptError};
