//! Pass/fail checks collected by the verification commands.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliResult, ExitCode};
use crate::io::write_atomic;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Raw numbers behind the checks.
    pub data: serde_json::Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            checks: Vec::new(),
            notes: Vec::new(),
            data: serde_json::Map::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> ExitCode {
        if self.passed() {
            ExitCode::Pass
        } else {
            ExitCode::Failed
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{} {verdict}\n", self.command));
        out
    }

    pub fn write_json(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}

/// Formats a list of numbers compactly for report lines.
pub fn fmt_list(vals: &[f64]) -> String {
    let inner: Vec<String> = vals.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", inner.join(", "))
}
