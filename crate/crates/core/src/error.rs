//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across parsing, encoding, training,
/// evaluation and model persistence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arff: line {line}: {message}")]
    ArffSyntax { line: usize, message: String },

    #[error("arff: line {line}: value '{value}' is not declared for attribute '{attribute}'")]
    UndeclaredValue {
        line: usize,
        attribute: String,
        value: String,
    },

    #[error("arff: line {line}: row has {found} values, expected {expected}")]
    RowArity {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("csv: record {record}: {message}")]
    CsvRecord { record: usize, message: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("percentage {value} out of range for {field}")]
    PercentOutOfRange { field: &'static str, value: f64 },

    #[error("graduation percentage {0} is below the minimum pass mark (36)")]
    BelowPassMark(f64),

    #[error("invalid generator parameters: {0}")]
    InvalidGeneratorParams(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("attribute '{attribute}' is numeric; {algorithm} accepts nominal attributes only (use C4.5)")]
    NumericNotSupported {
        algorithm: &'static str,
        attribute: String,
    },

    #[error("missing values are not supported by {algorithm} (use C4.5); first at instance {instance}, attribute '{attribute}'")]
    MissingNotSupported {
        algorithm: &'static str,
        instance: usize,
        attribute: String,
    },

    #[error("class attribute has {found} values; expected exactly 2")]
    NonBinaryClass { found: usize },

    #[error("class column contains no known values")]
    AllClassesMissing,

    #[error("instance does not match the model schema: {0}")]
    SchemaMismatch(String),

    #[error("missing value at attribute '{attribute}' required by a decision condition")]
    MissingAtCondition { attribute: String },

    #[error("fold count {k} out of range for {n} instances")]
    BadFoldCount { k: usize, n: usize },

    #[error("unknown class label '{0}'")]
    UnknownClassLabel(String),

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures raised while fitting a model (as opposed to bad
    /// input data or I/O); lets callers distinguish exit statuses.
    pub fn is_training_error(&self) -> bool {
        match self {
            Error::EmptyTrainingSet
            | Error::NumericNotSupported { .. }
            | Error::MissingNotSupported { .. }
            | Error::NonBinaryClass { .. }
            | Error::AllClassesMissing => true,
            Error::Fold { source, .. } => source.is_training_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
