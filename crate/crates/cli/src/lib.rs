//! Batch front end for `rwre-core`: reads a TOML experiment description,
//! runs it, and writes a one-line summary plus optional per-trial and DOT
//! outputs.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on an invalid
//! configuration, 3 when a checked property fails.

pub mod config;
mod logfmt;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use config::{Experiment, ExperimentConfig};
pub use logfmt::Record;
pub use run::{run, RunOutput};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SEED_ENV: &str = "RWRE_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("property check failed: {0}")]
    Property(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Property(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "rwre", version, about = "Run a random-walk-in-Dirichlet-environment experiment")]
pub struct Cli {
    /// Experiment description (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Master seed; overrides the config file and RWRE_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Directory for summary.txt, trials.ndjson and cylinder.dot. Without
    /// it everything goes to stdout.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Write the cylinder graph in DOT format.
    #[arg(long)]
    pub emit_dot: bool,
    /// Write one JSON record per trial.
    #[arg(long)]
    pub per_trial: bool,
}

/// Seed precedence: flag, then config file, then `RWRE_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{SEED_ENV}: not an unsigned 64-bit integer: {v:?}"))),
        None => Ok(0),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Runs `cli` and writes its outputs. `stdout` receives the summary line,
/// and the other streams too when no `--out` directory is given.
pub fn execute(cli: &Cli, env_seed: Option<&str>, stdout: &mut dyn Write) -> Result<Record, CliError> {
    let mut cfg = config::load(&cli.config)?;
    if let Some(t) = cli.trials {
        if t == 0 {
            return Err(CliError::Validation("--trials must be at least 1".into()));
        }
        cfg.trials = t;
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Validation("--workers must be at least 1".into()));
        }
        cfg.workers = w;
    }
    let seed = resolve_seed(cli.seed, cfg.seed, env_seed)?;
    let digest = cfg.digest();

    let out = run(&cfg, seed, cli.emit_dot)?;
    let mut summary = Record::new();
    summary
        .push("experiment", cfg.experiment)
        .push("version", VERSION)
        .push("seed", seed)
        .push("config_digest", &digest);
    for (k, v) in out.summary.fields() {
        summary.push(k, v);
    }

    let stamp = |mut v: serde_json::Value| {
        if let Some(obj) = v.as_object_mut() {
            obj.insert("config_digest".into(), digest.clone().into());
            obj.insert("seed".into(), seed.into());
            obj.insert("version".into(), VERSION.into());
        }
        v
    };
    let mut trials = Vec::new();
    if cli.per_trial {
        for v in out.trials {
            serde_json::to_writer(&mut trials, &stamp(v)).expect("json values serialize");
            trials.push(b'\n');
        }
    }

    let line = summary.render() + "\n";
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            let write = |name: &str, bytes: &[u8]| {
                let p = dir.join(name);
                std::fs::write(&p, bytes).map_err(|e| io_err(&p, e))
            };
            write("summary.txt", line.as_bytes())?;
            if cli.per_trial {
                write("trials.ndjson", &trials)?;
            }
            if let Some(dot) = &out.dot {
                write("cylinder.dot", dot.as_bytes())?;
            }
            stdout.write_all(line.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
        }
        None => {
            let mut all = line.into_bytes();
            all.extend(trials);
            if let Some(dot) = &out.dot {
                all.extend(dot.as_bytes());
            }
            stdout.write_all(&all).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }

    match out.property_failure {
        Some(msg) => Err(CliError::Property(msg)),
        None => Ok(summary),
    }
}
