use std::path::PathBuf;

/// Errors produced anywhere in the classification pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("hypervector dimension must be positive")]
    ZeroDimension,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot combine a {left} hypervector with a {right} hypervector")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("cannot bundle an empty list of hypervectors")]
    EmptyBundle,

    #[error("bipolar entry {value} at position {index} is not -1 or +1")]
    InvalidBipolar { index: usize, value: i64 },

    #[error("degenerate generator state: {0}")]
    DegenerateState(String),

    #[error("Sobol point index must be at least 1")]
    SobolIndexZero,

    #[error("Sobol dimension {requested} is not available (table holds {available})")]
    SobolDimension { requested: usize, available: usize },

    #[error("malformed Sobol direction table at line {line}: {reason}")]
    SobolTable { line: usize, reason: String },

    #[error("Hadamard order {0} is not a power of two")]
    HadamardOrder(usize),

    #[error("Hadamard row {row} is out of range for order {order}")]
    HadamardRow { order: usize, row: usize },

    #[error("requested {requested} distinct vectors but only {available} are available")]
    Exhausted { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing required column {0:?}")]
    MissingColumn(String),

    #[error("row {row}, column {column:?}: cannot parse {value:?}")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("column {0:?} has no present values to impute from")]
    AllMissing(String),

    #[error("record {row} has no AMS score")]
    MissingScore { row: usize },

    #[error("AMS score {score} at row {row} is outside 0..=12")]
    ScoreRange { row: usize, score: i64 },

    #[error("unseen {kind} category {value:?}")]
    UnseenCategory { kind: &'static str, value: String },

    #[error("class {label} has {count} samples, at least {needed} required")]
    ClassTooSmall {
        label: u16,
        count: usize,
        needed: usize,
    },

    #[error("feature selection is empty")]
    EmptySelection,

    #[error("class {0} has no training samples")]
    MissingClass(String),

    #[error("model format error at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input files, schemas, and category vocabularies.
    Data,
    /// Everything else: invalid parameters, degenerate numerics, model state.
    Computation,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::MissingColumn(_)
            | Error::Parse { .. }
            | Error::AllMissing(_)
            | Error::MissingScore { .. }
            | Error::ScoreRange { .. }
            | Error::UnseenCategory { .. }
            | Error::Format { .. }
            | Error::Io { .. }
            | Error::Csv { .. }
            | Error::SobolTable { .. } => ErrorClass::Data,
            _ => ErrorClass::Computation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
