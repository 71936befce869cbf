use crate::stimulus::SeriesKind;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid series spec: {0}")]
    InvalidSpec(String),

    #[error("empty design: {0}")]
    EmptyDesign(&'static str),

    #[error("invalid trial counts: {0}")]
    InvalidCounts(String),

    #[error("no trials match the filter")]
    EmptySelection,

    #[error("insufficient single-series {kind} trials: {found} left after exclusion, need at least 2")]
    InsufficientSingles { kind: SeriesKind, found: usize },

    #[error("degenerate sample set: all values identical")]
    DegenerateDistribution,

    #[error("insufficient samples for bandwidth selection: got {0}, need at least 2")]
    InsufficientSamples(usize),

    #[error("invalid bandwidth {0}: must be finite and positive")]
    InvalidBandwidth(f64),

    #[error("invalid grid size {0}: need at least 16 points")]
    InvalidGrid(usize),

    #[error("no observations to score")]
    EmptyObservations,

    #[error("weight {w} outside [{lo}, {hi}]")]
    WeightOutOfRange { w: f64, lo: f64, hi: f64 },

    #[error("start weight {start} outside [{lo}, {hi}]")]
    StartOutOfRange { start: f64, lo: f64, hi: f64 },

    #[error("objective not finite at w = {0}")]
    NonFinite(f64),

    #[error("missing condition: {0}")]
    MissingCondition(String),

    #[error("empty value list for interval")]
    EmptyValues,

    #[error("{path}:{line}: schema error: {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: bad row: {message}")]
    Row {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: inconsistent row: {message}")]
    Consistency {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: parse error: {message}")]
    ConfigParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid weight grid '{spec}': {message}")]
    Grid { spec: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit status category: 3 for input parsing/validation, 4 for fit-stage failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. }
            | Error::Row { .. }
            | Error::Consistency { .. }
            | Error::ConfigParse { .. }
            | Error::Validation(_)
            | Error::Grid { .. }
            | Error::InvalidCounts(_)
            | Error::Io { .. } => 3,
            _ => 4,
        }
    }

    /// One-word category used as the machine-parsable diagnostic prefix.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Schema { .. } | Error::Row { .. } | Error::Consistency { .. } => "trials",
            Error::ConfigParse { .. } | Error::Validation(_) => "config",
            Error::Grid { .. } | Error::InvalidCounts(_) => "args",
            Error::Io { .. } => "io",
            _ => "fit",
        }
    }
}
