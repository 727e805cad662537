use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    ScenarioParse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),

    #[error("standard deviation must be positive and finite, got {0}")]
    NonPositiveSd(f64),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("empty input")]
    Empty,
    #[error("quantile level {0} outside [0, 1]")]
    QuantileOutOfRange(f64),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("{model} references missing column `{column}`")]
    MissingModelColumn { model: String, column: String },
    #[error("column `{0}` is not categorical")]
    NotCategorical(String),
    #[error("column `{column}` contains unseen level code {code}")]
    UnseenLevel { column: String, code: usize },
    #[error("categorical column `{0}` needs at least two levels")]
    TooFewLevels(String),
    #[error("column `{column}` has {len} values, table has {rows} rows")]
    RaggedColumn {
        column: String,
        len: usize,
        rows: usize,
    },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` is not binary (values must be 0 or 1)")]
    NotBinary(String),
    #[error("column `{0}` contains non-finite values")]
    NonFinite(String),
    #[error("column mismatch between table and scenario: {0}")]
    ColumnMismatch(String),

    #[error("design matrix is rank deficient; dependent columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),
    #[error("insufficient rows: {rows} rows for {terms} terms")]
    InsufficientRows { rows: usize, terms: usize },
    #[error("response `{0}` contains a single class")]
    SingleClass(String),
    #[error("logistic fit separated: linear predictor diverged (max |eta| = {max_eta:.1}) after {iterations} iterations")]
    Separation { iterations: usize, max_eta: f64 },
    #[error("no candidate predictors")]
    NoCandidates,
    #[error("bootstrap aborted: {failed} of {total} resamples failed to fit")]
    BootstrapFailures { failed: usize, total: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
