use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {op} got {left:?} and {right:?}")]
    Dimension {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("mask has no true entries")]
    DegenerateMask,

    #[error("token id {id} is outside the vocabulary of size {vocab_size}")]
    OutOfVocabulary { id: usize, vocab_size: usize },

    #[error("non-finite loss while perturbing parameter scalar {index}")]
    NumericInstability { index: usize },

    #[error("title contains no non-pad tokens")]
    DegenerateTitle,

    #[error("candidate list is empty")]
    EmptyCandidates,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: duplicate news id {id}")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checkpoint: bad magic bytes")]
    BadMagic,

    #[error("checkpoint: unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("checkpoint: checksum mismatch (file corrupted or truncated)")]
    ChecksumMismatch,

    #[error("checkpoint: malformed payload: {0}")]
    MalformedCheckpoint(String),

    #[error("vocabulary mismatch: {0}")]
    VocabMismatch(String),

    #[error("unknown news id {0}")]
    UnknownNewsId(String),

    #[error("training diverged: non-finite loss at epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("no scorable impressions (all {skipped} were single-class)")]
    EmptyReport { skipped: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
