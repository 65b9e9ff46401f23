//! Run configuration: a system descriptor, a command and its parameters.
//!
//! Configs come from flags or a JSON file; unknown keys are rejected in
//! both. Every field that a command consults is echoed into its report.

use std::path::{Path, PathBuf};

use gluedyn::gluing::{OrbitSequence, SearchLimits};
use gluedyn::systems::{DynSystem, Point, SystemDescriptor};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_BUDGET: u64 = 1 << 22;
/// Node cap behind `--budget tiny`.
pub const TINY_BUDGET: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlueMode {
    Check,
    Search,
    Estimate,
    Refute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Family,
    InducedShift,
    Lambda,
    ProperSubsystem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    Analyze,
    Glue { mode: GlueMode },
    Construct { construction: Construction },
    DemoTheorem,
}

impl Command {
    pub fn label(&self) -> String {
        match self {
            Command::Analyze => "analyze".into(),
            Command::Glue { mode } => format!("glue {}", serde_plain(mode)),
            Command::Construct { construction } => format!("construct {}", serde_plain(construction)),
            Command::DemoTheorem => "demo-theorem".into(),
        }
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Numeric knobs. `None` means the command's default for the system,
/// which is filled in and echoed by the command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bigm: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// `N`, the number of levels of a separated family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_rig: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread_tol: Option<f64>,
    /// Growth-rate threshold below which entropy counts as zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Search node cap.
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<OrbitSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Point>,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDescriptor>,
    pub command: Command,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command, system: Option<SystemDescriptor>) -> Self {
        Self { system, command, params: Params { budget: DEFAULT_BUDGET, ..Params::default() }, out: None, format: Format::Json }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn descriptor(&self) -> Result<&SystemDescriptor, CliError> {
        self.system.as_ref().ok_or_else(|| CliError::Config("no system given (use --system or --preset)".into()))
    }

    pub fn make_system(&self) -> Result<DynSystem, CliError> {
        let mut sys = self.descriptor()?.make_system().map_err(CliError::from)?;
        if let Some(h) = self.params.horizon {
            if sys.is_symbolic() && h as usize > sys.horizon() {
                sys = sys.with_horizon(h as usize + 64);
            }
        }
        Ok(sys)
    }

    pub fn limits(&self) -> SearchLimits {
        SearchLimits::nodes(self.params.budget)
    }
}

pub const PRESETS: &[(&str, &str)] = &[
    ("golden-rotation", "kind = circle-rotation\nalpha = golden\n"),
    ("full-shift", "kind = full-shift\nsymbols = 2\n"),
    ("golden-mean", "kind = sft\nsymbols = 2\nforbidden_words = 11\n"),
    ("sturmian", "kind = sturmian\nalpha = golden\n"),
    ("skew-product", "kind = skew-product\nalpha = golden\n"),
];

pub fn preset(name: &str) -> Result<SystemDescriptor, CliError> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Config(format!("unknown preset `{name}` (known: {})", names.join(", ")))
        })?;
    SystemDescriptor::parse(text).map_err(CliError::from)
}

pub fn read_descriptor(path: &Path) -> Result<SystemDescriptor, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    SystemDescriptor::parse(&text).map_err(CliError::from)
}

/// `tiny`, `default` or a node count.
pub fn parse_budget(text: &str) -> Result<u64, CliError> {
    match text {
        "tiny" => Ok(TINY_BUDGET),
        "default" => Ok(DEFAULT_BUDGET),
        n => n.parse().map_err(|_| CliError::Config(format!("budget must be `tiny`, `default` or a count, got `{n}`"))),
    }
}

/// A point: a symbol string (`1211`) on subshifts, `/`-separated
/// coordinates (`0.25/0.5`) on tori.
pub fn parse_point(sys: &DynSystem, text: &str) -> Result<Point, CliError> {
    let text = text.trim();
    if sys.is_symbolic() {
        let word: Vec<u8> = text
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| CliError::Config(format!("bad symbol `{c}` in `{text}`"))))
            .collect::<Result<_, _>>()?;
        sys.point_from_word(&word).map_err(CliError::from)
    } else {
        let coords: Vec<f64> = text
            .split('/')
            .map(|c| c.trim().parse().map_err(|_| CliError::Config(format!("bad coordinate `{c}` in `{text}`"))))
            .collect::<Result<_, _>>()?;
        let p = Point::torus(coords);
        sys.validate_point(&p).map_err(CliError::from)?;
        Ok(p)
    }
}

/// `point:len,point:len,...`.
pub fn parse_sequence(sys: &DynSystem, text: &str) -> Result<OrbitSequence, CliError> {
    let pairs = text
        .split(',')
        .map(|seg| {
            let (p, l) = seg
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("segment `{seg}` must be point:length")))?;
            let len = l.trim().parse().map_err(|_| CliError::Config(format!("bad length `{l}`")))?;
            Ok((parse_point(sys, p)?, len))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    OrbitSequence::from_pairs(pairs).map_err(CliError::from)
}

pub fn parse_gap(text: &str) -> Result<Vec<u32>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Config(format!("bad gap entry `{t}`"))))
        .collect()
}
