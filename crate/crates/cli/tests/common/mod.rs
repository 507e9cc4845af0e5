#![allow(dead_code)]

use std::path::PathBuf;

use massgraph::{run_script, GraphState, KernelParams, PhaseHistory, SnapshotMode};
use massgraph_cli::{parse_script, run_cli};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares `actual` against the pinned file. `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, actual: &[u8]) -> Result<(), String> {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{name} differs from the pinned golden file"))
    }
}

/// Runs the CLI in-process, returning (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["massgraph"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn oracle_trace_history() -> PhaseHistory {
    let parsed = parse_script(&std::fs::read(data("oracle_trace.json")).unwrap()).unwrap();
    run_script(&parsed.initial, &parsed.events, SnapshotMode::Full).unwrap()
}

pub fn empty_events_history() -> PhaseHistory {
    let g = GraphState::new(&[2.0, 2.0], &[(1, 2, 2.0)], KernelParams::default()).unwrap();
    run_script(&g, &[], SnapshotMode::Full).unwrap()
}

/// `gen --seed 42 --nodes 5 --phases 22` followed by `run`, in a temp dir.
/// Returns (script bytes, history bytes).
pub fn seed42_round() -> (Vec<u8>, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("s.json");
    let history = dir.path().join("h.json");
    let (code, _, err) = cli(&[
        "gen",
        "--seed",
        "42",
        "--nodes",
        "5",
        "--phases",
        "22",
        "--out",
        script.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, _, err) = cli(&[
        "run",
        "--script",
        script.to_str().unwrap(),
        "--out",
        history.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    (std::fs::read(script).unwrap(), std::fs::read(history).unwrap())
}
