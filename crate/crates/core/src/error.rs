use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid system: {0}")]
    Validation(String),

    #[error("point does not belong to the system's space: {0}")]
    VariantMismatch(String),

    #[error("symbolic horizon exhausted: need {needed} symbols, have {available}")]
    Horizon { needed: usize, available: usize },

    /// A search or enumeration hit its configured cap. `cursor` is the gap
    /// prefix at which the search stopped and can be fed back to resume.
    #[error("budget exceeded: {what} (cap {cap})")]
    Budget {
        what: String,
        cap: usize,
        cursor: Option<Vec<u32>>,
    },

    #[error("{op} is not supported for {kind} systems")]
    Unsupported { op: &'static str, kind: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("no non-rigidity witness for k = {k} up to the horizon (max defect {max_defect})")]
    WitnessNotFound { k: usize, max_defect: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),
}
