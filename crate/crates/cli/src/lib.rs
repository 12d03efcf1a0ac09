//! Configuration, execution and artifact output for `shadowdrift run`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

pub use config::ExperimentConfig;
pub use experiments::{run_experiment, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] shadowdrift::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Paths of the files written by [`run_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
}

/// Full sidecar document: config echo, versions and summary.
pub fn sidecar(cfg: &ExperimentConfig, outcome: &Outcome) -> serde_json::Value {
    json!({
        "config": cfg,
        "library_version": shadowdrift::VERSION,
        "rng": shadowdrift::RNG_NAME,
        "experiment": cfg.experiment.as_str(),
        "summary": outcome.summary,
    })
}

/// Runs `cfg` and writes its CSV and JSON sidecar under `out_dir` (or the
/// directory named in the config).
pub fn run_config(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<Artifacts, CliError> {
    let outcome = run_experiment(cfg)?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let stem = cfg
        .output
        .stem
        .clone()
        .unwrap_or_else(|| cfg.experiment.as_str().to_string());
    let mut artifacts = Artifacts {
        csv: None,
        sidecar: None,
    };
    use config::OutputFormat::*;
    if matches!(cfg.output.format, Csv | Both) {
        let path = dir.join(format!("{stem}.csv"));
        fs::write(&path, &outcome.csv)?;
        artifacts.csv = Some(path);
    }
    if matches!(cfg.output.format, Json | Both) {
        let path = dir.join(format!("{stem}.json"));
        let text = serde_json::to_string_pretty(&sidecar(cfg, &outcome)).expect("serializable");
        fs::write(&path, text + "\n")?;
        artifacts.sidecar = Some(path);
    }
    Ok(artifacts)
}

/// Reads a config file, applying an optional seed override.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config {
        field: "<file>".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}
