use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("duplicate doc_id {0:?}")]
    DuplicateDocId(String),
    #[error("document {doc_id:?} has no label for category {category:?}")]
    MissingLabel { doc_id: String, category: String },
    #[error("document {doc_id:?} is labeled with unknown group {group:?} in category {category:?}")]
    UnlabeledGroup {
        doc_id: String,
        category: String,
        group: String,
    },
    #[error("invalid category {name:?}: {reason}")]
    InvalidCategory { name: String, reason: String },
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("unknown group {group:?} in category {category:?}")]
    UnknownGroup { category: String, group: String },
    #[error("unknown document {0:?}")]
    UnknownDocument(String),
    #[error("rank positions start at 1, got {0}")]
    InvalidPosition(usize),
    #[error("exposure values must be nonnegative, got {0}")]
    NegativeExposure(f64),
    #[error("C({k}, {m}) = {subsets} subsets exceeds the exact enumeration budget of {budget}; use sampled mode")]
    BudgetExceeded {
        k: usize,
        m: usize,
        subsets: String,
        budget: u64,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("coefficient of variation is undefined for a zero mean")]
    ZeroMean,
    #[error("paired samples differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 paired samples, got {0}")]
    TooFewSamples(usize),
    #[error("paired differences have zero variance; t statistic undefined")]
    ZeroVariance,
    #[error("empty query")]
    EmptyQuery,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("index format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl ToString) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.to_string(),
        }
    }
}
