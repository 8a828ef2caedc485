use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed dataset file; `line` is 1-based and counts the header.
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid instance `{id}`: {message}")]
    Instance { id: String, message: String },

    #[error("duplicate instance id `{0}`")]
    DuplicateId(String),

    #[error("unknown instance id `{0}`")]
    UnknownId(String),

    #[error("dataset has no instances")]
    EmptyDataset,

    #[error("dataset total weight must be positive")]
    ZeroTotalWeight,

    #[error("weights need more than 53 bits once scaled to integers")]
    WeightPrecision,

    #[error("invalid weight `{0}`")]
    Weight(String),

    #[error("category `{0}` is empty or has zero weight")]
    EmptyCategory(String),

    #[error("category `{0}` covers the whole population, so it has no complement")]
    FullCategory(String),

    #[error("invalid hierarchy: {0}")]
    Hierarchy(String),

    #[error("invalid options: {0}")]
    Options(String),

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("condition `{0}` requires a category")]
    MissingCategory(&'static str),

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("exhaustive search supports at most {max} instances, dataset has {n}")]
    TooLarge { n: usize, max: usize },

    #[error("need at least {min} instances, dataset has {n}")]
    TooSmall { n: usize, min: usize },

    #[error("block count {k} is outside 1..={n}")]
    BlockCount { k: usize, n: usize },

    #[error("malformed merge trace: {0}")]
    Trace(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
