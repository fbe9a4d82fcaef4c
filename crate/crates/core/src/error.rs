use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("stream exhausted: bit {requested} requested but only {available} bits are available")]
    StreamExhausted { requested: usize, available: usize },

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("hex digit position {position} is outside the precision-safe range 1..={max}")]
    PrecisionRange { position: u64, max: u64 },

    #[error("predictor `{predictor}` exceeded its fuel budget of {fuel} steps")]
    PredictorNonTotal { predictor: String, fuel: u64 },

    #[error("extractor `{extractor}` may not read {component}")]
    ScopeViolation {
        extractor: String,
        component: String,
    },

    #[error("adversarial construction needs hi <= l <= k, got hi={hi}, l={l}, k={k}")]
    ScopeTooWide { hi: usize, l: usize, k: usize },

    #[error("state is not normalised (squared norm {norm_sqr})")]
    NotNormalised { norm_sqr: f64 },

    #[error("exhaustive enumeration is limited to q_max <= {max}, got {requested}")]
    EnumerationTooLarge { requested: usize, max: usize },

    #[error("sequence of length {len} is too short for block length {max_block} (need at least {min_blocks} blocks)")]
    InsufficientLength {
        len: usize,
        max_block: usize,
        min_blocks: usize,
    },

    #[error("extractor `{extractor}` is not admitted by policy `{policy}`")]
    PolicyViolation { extractor: String, policy: String },

    #[error("experiment `{experiment}` does not support preparation {preparation}")]
    UnsupportedPreparation {
        experiment: String,
        preparation: String,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::StreamExhausted { .. } => "STREAM_EXHAUSTED",
            Error::UnknownRule(_) => "UNKNOWN_RULE",
            Error::PrecisionRange { .. } => "PRECISION_RANGE",
            Error::PredictorNonTotal { .. } => "PREDICTOR_NONTOTAL",
            Error::ScopeViolation { .. } => "SCOPE_VIOLATION",
            Error::ScopeTooWide { .. } => "SCOPE_TOO_WIDE",
            Error::NotNormalised { .. } => "NOT_NORMALISED",
            Error::EnumerationTooLarge { .. } => "ENUMERATION_TOO_LARGE",
            Error::InsufficientLength { .. } => "INSUFFICIENT_LENGTH",
            Error::PolicyViolation { .. } => "POLICY_VIOLATION",
            Error::UnsupportedPreparation { .. } => "UNSUPPORTED_PREPARATION",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Config(_) => "INVALID_CONFIG",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::Io { .. } => "IO_ERROR",
        }
    }
}
