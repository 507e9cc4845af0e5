//! The `massgraph` command line.
//!
//! Exit codes: 0 on success, 1 on a domain or IO error, 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use massgraph::{
    generate_scenario, metrics, run_script, validate_kernel_params, EventMix, KernelChoice, KernelError, KernelParams,
    RunError, ScenarioConfig, ScenarioError, SnapshotMode,
};
use thiserror::Error;

use crate::dot::{export_dot, DotStyle};
use crate::history::{export_history_json, parse_history, HistoryError, LoadedSnapshot};
use crate::script::{parse_script, render_script, ScriptError};

#[derive(Debug, Parser)]
#[command(name = "massgraph", version, about = "Mass-based dynamic graph memory simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a script and write its phase history as JSON.
    Run(RunArgs),
    /// Generate a seeded random scenario script.
    Gen(GenArgs),
    /// Parse a script, run it and check every phase's structural invariants.
    Validate {
        #[arg(long)]
        script: PathBuf,
    },
    /// Per-phase summary statistics of a history file.
    Stats {
        #[arg(long)]
        history: PathBuf,
        #[arg(long, default_value_t = NonZeroUsize::new(3).unwrap())]
        top_k: NonZeroUsize,
    },
    /// Scan the reinforcement kernel for monotonicity.
    KernelCheck(KernelCheckArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub script: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a DOT file for every N-th phase, next to the output file.
    #[arg(long, value_name = "N", conflicts_with = "digest_only")]
    pub dot_every: Option<NonZeroUsize>,
    /// Store only a SHA-256 digest per phase.
    #[arg(long)]
    pub digest_only: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    /// Initial node count.
    #[arg(long)]
    pub nodes: usize,
    /// Index of the last phase; the script carries phases - 1 events.
    #[arg(long)]
    pub phases: usize,
    /// Event probabilities add_edge,add_node,prune.
    #[arg(long, value_parser = parse_triple, default_value = "0.8,0.2,0")]
    pub mix: (f64, f64, f64),
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub prune_threshold: f64,
    #[arg(long, value_parser = parse_pair, default_value = "2,100")]
    pub mass_range: (f64, f64),
    #[arg(long, value_parser = parse_pair, default_value = "2,100")]
    pub weight_range: (f64, f64),
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, conflicts_with_all = ["draw_mu", "draw_sigma"])]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, conflicts_with_all = ["draw_mu", "draw_sigma"])]
    pub sigma: f64,
    /// Draw mu uniformly from LO,HI once per scenario.
    #[arg(long, value_parser = parse_pair, requires = "draw_sigma", allow_hyphen_values = true)]
    pub draw_mu: Option<(f64, f64)>,
    /// Draw sigma uniformly from LO,HI once per scenario.
    #[arg(long, value_parser = parse_pair, requires = "draw_mu")]
    pub draw_sigma: Option<(f64, f64)>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelCheckArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.001)]
    pub lo: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if v.len() == n => Ok(v),
        Ok(v) => Err(format!("expected {n} comma-separated numbers, got {}", v.len())),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_triple(s: &str) -> Result<(f64, f64, f64), String> {
    let v = parse_floats(s, 3)?;
    Ok((v[0], v[1], v[2]))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Script { path: PathBuf, source: ScriptError },
    #[error("{path}: {source}")]
    History { path: PathBuf, source: HistoryError },
    #[error("{path}: {source}")]
    Run { path: PathBuf, source: RunError },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{0}")]
    Invalid(String),
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, bytes),
        None => stdout.write_all(bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let parsed = parse_script(&read(&args.script)?).map_err(|source| CliError::Script {
        path: args.script.clone(),
        source,
    })?;
    let mode = if args.digest_only {
        SnapshotMode::DigestOnly
    } else {
        SnapshotMode::Full
    };
    let history = run_script(&parsed.initial, &parsed.events, mode).map_err(|source| CliError::Run {
        path: args.script.clone(),
        source,
    })?;
    emit(args.out.as_deref(), &export_history_json(&history), stdout)?;

    if let Some(every) = args.dot_every {
        let (dir, stem) = match &args.out {
            Some(out) => (
                out.parent().map(Path::to_path_buf).unwrap_or_default(),
                out.file_stem()
                    .map_or("history".into(), |s| s.to_string_lossy().into_owned()),
            ),
            None => (PathBuf::new(), "history".to_string()),
        };
        let style = DotStyle::default();
        for snap in &history.snapshots {
            if snap.phase % every.get() as u64 != 0 {
                continue;
            }
            if let Some(state) = snap.state() {
                let path = dir.join(format!("{stem}-phase{:05}.dot", snap.phase));
                write_file(&path, &export_dot(state, &style))?;
            }
        }
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let kernel = match (args.draw_mu, args.draw_sigma) {
        (Some(mu), Some(sigma)) => KernelChoice::Draw { mu, sigma },
        _ => KernelChoice::Fixed(KernelParams::new(args.mu, args.sigma)?),
    };
    let config = ScenarioConfig {
        seed: args.seed,
        n_initial: args.nodes,
        mass_range: args.mass_range,
        weight_range: args.weight_range,
        initial_edge_density: args.density,
        n_phases: args.phases,
        event_mix: EventMix {
            add_edge: args.mix.0,
            add_node: args.mix.1,
            prune: args.mix.2,
        },
        prune_threshold: args.prune_threshold,
        kernel,
    };
    let scenario = generate_scenario(&config)?;
    emit(
        args.out.as_deref(),
        render_script(&scenario.initial, &scenario.events).as_bytes(),
        stdout,
    )
}

fn cmd_validate(script: &Path, stdout: &mut dyn Write) -> Result<(), CliError> {
    let parsed = parse_script(&read(script)?).map_err(|source| CliError::Script {
        path: script.to_owned(),
        source,
    })?;
    let history = run_script(&parsed.initial, &parsed.events, SnapshotMode::Full).map_err(|source| CliError::Run {
        path: script.to_owned(),
        source,
    })?;
    for snap in &history.snapshots {
        let violations = snap.state().map(|s| s.validate()).unwrap_or_default();
        if !violations.is_empty() {
            return Err(CliError::Invalid(format!(
                "phase {}: {}",
                snap.phase,
                violations.join("; ")
            )));
        }
    }
    let last = &history.final_state;
    let _ = writeln!(
        stdout,
        "ok: {} events, final phase {}, {} alive nodes, {} edges",
        history.events.len(),
        last.phase(),
        last.alive_nodes().count(),
        last.edge_count()
    );
    Ok(())
}

fn cmd_stats(path: &Path, top_k: NonZeroUsize, stdout: &mut dyn Write) -> Result<(), CliError> {
    let loaded = parse_history(&read(path)?).map_err(|source| CliError::History {
        path: path.to_owned(),
        source,
    })?;
    let mut rows = String::from(
        "phase\ttotal_mass\talive_nodes\talive_edges\tmax_node\tmax_mass\ttop_k_share\tdegree_histogram\n",
    );
    for (index, snap) in loaded.snapshots.iter().enumerate() {
        match snap {
            LoadedSnapshot::Full(state) => {
                let violations = state.validate();
                if !violations.is_empty() {
                    return Err(CliError::Invalid(format!(
                        "{}: snapshots[{index}] (phase {}): {}",
                        path.display(),
                        state.phase(),
                        violations.join("; ")
                    )));
                }
                let m = metrics(state, top_k);
                let (max_node, max_mass) = m
                    .max_mass_node
                    .map_or(("-".to_string(), "-".to_string()), |(id, mass)| {
                        (id.to_string(), mass.to_string())
                    });
                let hist: Vec<String> = m.degree_histogram.iter().map(usize::to_string).collect();
                rows.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    m.phase,
                    m.total_mass,
                    m.alive_nodes,
                    m.alive_edges,
                    max_node,
                    max_mass,
                    m.top_k_mass_share,
                    hist.join(",")
                ));
            }
            LoadedSnapshot::Digest { phase, digest } => {
                rows.push_str(&format!("{phase}\tdigest {digest}\n"));
            }
        }
    }
    emit(None, rows.as_bytes(), stdout)
}

fn cmd_kernel_check(args: &KernelCheckArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = KernelParams::new(args.mu, args.sigma)?;
    let report = validate_kernel_params(&params, args.lo, args.hi, args.steps)?;
    let _ = writeln!(
        stdout,
        "mu={} sigma={} grid=[{}, {}] steps={} monotone={}",
        args.mu, args.sigma, args.lo, args.hi, report.steps, report.monotone
    );
    if let Some(x) = report.first_violation {
        let _ = writeln!(stdout, "first violation at x={x}");
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => cmd_run(args, stdout),
        Command::Gen(args) => cmd_gen(args, stdout),
        Command::Validate { script } => cmd_validate(script, stdout),
        Command::Stats { history, top_k } => cmd_stats(history, *top_k, stdout),
        Command::KernelCheck(args) => cmd_kernel_check(args, stdout),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let text = err.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            1
        }
    }
}
