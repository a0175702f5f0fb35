//! Experiment specs and the run records that echo them.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cli::{Cli, Command, Format};
use crate::error::{HarnessError, Result};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub version: String,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub command: Command,
}

impl ExperimentSpec {
    pub fn new(command: Command, seed: u64) -> Self {
        Self {
            version: ARTIFACT_VERSION.to_string(),
            seed,
            out: None,
            format: None,
            command,
        }
    }

    pub fn from_cli(cli: &Cli) -> Self {
        Self {
            out: cli.out.clone(),
            format: cli.format,
            ..Self::new(cli.command.clone(), cli.seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub spec: ExperimentSpec,
    pub wall_time_secs: f64,
    pub payload: Value,
    pub warnings: Vec<String>,
    /// Files written by the run, main output first.
    pub outputs: Vec<PathBuf>,
}

impl RunRecord {
    pub fn to_json(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("serializable record");
        v.push(b'\n');
        v
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes)
            .map_err(|e| HarnessError::Validation(format!("unreadable run record: {e}")))
    }
}
