//! Configuration-driven experiment runner for `darkprobe`.

pub mod config;
pub mod experiments;
pub mod fixtures;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

pub use config::{Experiment, ExperimentConfig};
pub use output::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(#[from] darkprobe::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("manifest error: {0}")]
    Manifest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            _ => 1,
        }
    }
}

/// Converts any module error into the numerical class.
pub(crate) fn num<E: Into<darkprobe::Error>>(e: E) -> CliError {
    CliError::Numerical(e.into())
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::parse(&text)
}

/// Result of one `run` invocation.
pub struct RunOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub report: Report,
}

/// Runs a configured experiment and writes its outputs under `dir`.
pub fn run_experiment(cfg: &ExperimentConfig, dir: &Path, threads: usize) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let report = experiments::run(cfg)?;
    let files = output::write_run(dir, cfg, &report, threads, start.elapsed().as_secs_f64())?;
    Ok(RunOutcome {
        dir: dir.to_path_buf(),
        files,
        report,
    })
}
