//! CSV tables and the run manifest, written atomically.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// Floats use 17 significant digits so they read back bit-exactly.
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.name);
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.to_string(), v);
    }

    pub fn note(&mut self, key: &str, v: impl Into<String>) {
        self.notes.insert(key.to_string(), v.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    rows: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunInfo {
    tool: &'static str,
    version: &'static str,
    experiment: &'static str,
    seed: u64,
    threads: usize,
    wall_time_s: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    run: RunInfo,
    warnings: &'a [String],
    metrics: &'a BTreeMap<String, f64>,
    notes: &'a BTreeMap<String, String>,
    files: Vec<FileEntry>,
    config: &'a ExperimentConfig,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Writes the tables and a manifest that lists each of them with its hash.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    report: &Report,
    threads: usize,
    wall_time_s: f64,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut written = Vec::new();
    for t in &report.tables {
        let name = format!("{}.csv", t.name);
        let bytes = t.to_bytes()?;
        let path = dir.join(&name);
        write_atomic(&path, &bytes)?;
        files.push(FileEntry {
            name,
            rows: t.rows.len(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        });
        written.push(path);
    }
    let manifest = Manifest {
        run: RunInfo {
            tool: "darkprobe",
            version: env!("CARGO_PKG_VERSION"),
            experiment: cfg.experiment.name(),
            seed: cfg.seed,
            threads,
            wall_time_s,
        },
        warnings: &report.warnings,
        metrics: &report.metrics,
        notes: &report.notes,
        files,
        config: cfg,
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Manifest(e.to_string()))?;
    let path = dir.join(MANIFEST);
    write_atomic(&path, text.as_bytes())?;
    written.push(path);
    Ok(written)
}
