use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ingestion error in {path}: {message}")]
    Ingestion { path: PathBuf, message: String },

    #[error("window exceeds signal (window {window}, signal length {len})")]
    WindowExceedsSignal { window: usize, len: usize },

    #[error("zero variance")]
    ZeroVariance,

    #[error("zero signal power")]
    ZeroPower,

    #[error("signal of length {len} is shorter than the longest filter ({filter_len})")]
    SignalTooShort { len: usize, filter_len: usize },

    #[error("series too short for embedding")]
    TooShortForEmbedding,

    #[error("delay schedule is not dyadic: {0}")]
    NotDyadic(String),

    #[error("band {0:?} is missing from the delay schedule")]
    MissingBand(String),

    #[error("unknown band {0:?}")]
    UnknownBand(String),

    #[error("row count mismatch: {0}")]
    RowMismatch(String),

    #[error("zero neighbour distance at row {row}; enable jitter to break ties")]
    ZeroDistance { row: usize },

    #[error("surrogate {index} failed: {source}")]
    Surrogate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular regressor matrix for order {order}; try a smaller model order")]
    Singular { order: usize },

    #[error("non-positive variance in Granger causality: {0}")]
    NonPositiveVariance(String),

    #[error("non-positive intrinsic spectrum at frequency index {index}")]
    NonPositiveSpectrum { index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
