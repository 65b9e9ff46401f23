//! Versioned report documents and their CSV and file emission.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const SCHEMA: &str = "gluedyn-report";
/// Bumped in the major position on any incompatible change.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub exit_code: i32,
    pub outcome: String,
}

/// A flat table, emitted as CSV and used for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?).map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub schema_version: String,
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    pub status: Status,
    pub result: serde_json::Value,
    #[serde(default)]
    pub tables: Vec<Table>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Wall-clock time; the only field allowed to differ between reruns.
    pub timing_ms: u64,
}

impl Report {
    pub fn new(config: &RunConfig, result: serde_json::Value) -> Self {
        Self {
            schema: SCHEMA.into(),
            schema_version: SCHEMA_VERSION.into(),
            command: config.command.label(),
            config: config.clone(),
            seed: config.params.seed,
            status: Status { exit_code: 0, outcome: "ok".into() },
            result,
            tables: Vec::new(),
            notes: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let r: Report = serde_json::from_str(text).map_err(|e| CliError::Config(format!("report: {e}")))?;
        let major = |v: &str| v.split('.').next().map(str::to_owned);
        if r.schema != SCHEMA || major(&r.schema_version) != major(SCHEMA_VERSION) {
            return Err(CliError::Config(format!("unsupported report schema {} {}", r.schema, r.schema_version)));
        }
        Ok(r)
    }

    /// The report with timing removed, for byte comparisons.
    pub fn body(&self) -> String {
        let mut r = self.clone();
        r.timing_ms = 0;
        r.to_json()
    }
}

/// An SVG file to write next to the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub file: String,
    pub svg: String,
}

/// Writes the report (JSON or one CSV per table) and figures into `dir`.
pub fn write_outputs(report: &Report, figures: &[Figure], dir: &Path, format: Format) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    let mut put = |name: String, text: &str| -> Result<(), CliError> {
        std::fs::write(dir.join(&name), text).map_err(io)?;
        written.push(name);
        Ok(())
    };
    match format {
        Format::Json => put("report.json".into(), &report.to_json())?,
        Format::Csv => {
            // The JSON document carries the certificates; CSV only the tables.
            put("report.json".into(), &report.to_json())?;
            for t in &report.tables {
                put(format!("{}.csv", t.name), &t.to_csv()?)?;
            }
        }
    }
    for f in figures {
        put(f.file.clone(), &f.svg)?;
    }
    Ok(written)
}
