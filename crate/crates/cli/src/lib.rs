//! Command implementations behind the `gluedyn` binary.
//!
//! Each command takes a [`RunConfig`] and returns an [`Outcome`]: a report
//! whose `status.exit_code` follows the scripting contract, plus any
//! figures. Exit codes: 0 success, 1 a demo check failed, 2 configuration
//! error, 3 budget exhausted, 4 a construction stage failed.

pub mod analyze;
pub mod config;
pub mod construct;
pub mod demo;
pub mod glue;
pub mod report;
pub mod svg;
pub mod verify;

use std::time::Instant;

pub use config::{Command, Construction, Format, GlueMode, Params, RunConfig};
pub use report::{Figure, Report, Table, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] gluedyn::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(gluedyn::Error::Budget { .. }) => 3,
            CliError::Library(
                gluedyn::Error::Construction(_) | gluedyn::Error::Precondition(_) | gluedyn::Error::WitnessNotFound { .. },
            ) => 4,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub figures: Vec<Figure>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.report.status.exit_code
    }
}

/// Dispatches on `config.command` and stamps the elapsed time.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut out = match config.command {
        Command::Analyze => analyze::cmd_analyze(config)?,
        Command::Glue { .. } => glue::cmd_glue(config)?,
        Command::Construct { .. } => construct::cmd_construct(config)?,
        Command::DemoTheorem => demo::cmd_demo_theorem(config)?,
    };
    out.report.timing_ms = start.elapsed().as_millis() as u64;
    Ok(out)
}

/// A report for a run that failed before producing results.
pub fn error_report(config: &RunConfig, err: &CliError) -> Report {
    let mut r = Report::new(config, serde_json::Value::Null);
    r.status = report::Status { exit_code: err.exit_code(), outcome: "error".into() };
    r.notes.push(err.to_string());
    if let CliError::Library(gluedyn::Error::Budget { cursor: Some(c), .. }) = err {
        r.notes.push(format!("resume from gap prefix {c:?}"));
    }
    r
}

pub(crate) fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("results serialize")
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
