use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::suites::{SuiteOutcome, SUITES};

pub const NOT_YET_RUN: &str = "not yet run";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub id: u32,
    pub suite: String,
    pub statement: String,
    /// `PASS`, `FAIL` or [`NOT_YET_RUN`].
    pub status: String,
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceabilityReport {
    pub rows: Vec<TraceRow>,
}

/// Result file of a suite inside an output directory.
pub fn suite_result_path(out: &Path, name: &str) -> std::path::PathBuf {
    out.join("suites").join(format!("{name}.json"))
}

/// One row per suite, filled from the suite results found under `out` (if any).
pub fn traceability_report(out: Option<&Path>) -> Result<TraceabilityReport> {
    let mut rows = Vec::with_capacity(SUITES.len());
    for info in SUITES {
        let mut row = TraceRow {
            id: info.id,
            suite: info.name.into(),
            statement: info.statement.into(),
            status: NOT_YET_RUN.into(),
            constants: BTreeMap::new(),
        };
        if let Some(dir) = out {
            let path = suite_result_path(dir, info.name);
            if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let outcome: SuiteOutcome = serde_json::from_str(&text)?;
                row.status = if outcome.passed { "PASS" } else { "FAIL" }.into();
                row.constants = outcome.metrics;
            }
        }
        rows.push(row);
    }
    Ok(TraceabilityReport { rows })
}

impl TraceabilityReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| # | suite | statement | status | measured |\n|---|---|---|---|---|\n");
        for r in &self.rows {
            let measured: Vec<String> = r.constants.iter().map(|(k, v)| format!("{k} = {v:.4e}")).collect();
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} |",
                r.id,
                r.suite,
                r.statement,
                r.status,
                measured.join("<br>")
            );
        }
        s
    }
}
