use thiserror::Error;

/// Errors raised by the rank statistics, tests and generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WnError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index out of range: {0}")]
    IndexError(String),

    #[error("sample too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("invalid score function: {0}")]
    InvalidScore(String),

    #[error("enumeration budget exceeded: {evaluations} kernel evaluations (limit {limit})")]
    TooLarge { evaluations: u128, limit: u128 },

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("L must lie in 1..={max}, got {got}")]
    InvalidL { got: usize, max: usize },

    #[error("model trajectory diverged at t = {t}")]
    DivergedModel { t: usize },

    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("pair (i={i}, j={j}, k={k}) failed: {source}")]
    Pair {
        i: usize,
        j: usize,
        k: usize,
        #[source]
        source: Box<WnError>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, WnError>;

impl From<std::io::Error> for WnError {
    fn from(e: std::io::Error) -> Self {
        WnError::Io(e.to_string())
    }
}
