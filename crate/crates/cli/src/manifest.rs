//! Run manifests: enough to replay a command and reproduce its outputs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::error::{CliError, CliResult};
use crate::io::{manifest_path, write_atomic};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub invocation: Command,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(
        invocation: Command,
        tolerances: BTreeMap<String, f64>,
        outputs: Vec<String>,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            invocation,
            tolerances,
            outputs,
        }
    }

    /// Written next to `primary` as `<stem>.manifest.json`.
    pub fn write_beside(&self, primary: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serialises");
        text.push('\n');
        write_atomic(&manifest_path(primary), text.as_bytes())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Manifest(e.to_string()))
    }
}

pub fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
