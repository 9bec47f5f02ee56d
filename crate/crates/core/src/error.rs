use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bug `{bug_id}`: {message}")]
    Corpus { bug_id: String, message: String },

    #[error("bug `{bug_id}`: malformed meta file {path}: {message}")]
    Meta {
        bug_id: String,
        path: PathBuf,
        message: String,
    },

    #[error("line {line} out of range (file has {line_count} lines)")]
    LineOutOfRange { line: usize, line_count: usize },

    #[error("empty vocabulary: no token reaches min_count {min_count}")]
    EmptyVocabulary { min_count: usize },

    #[error("empty training corpus")]
    EmptyCorpus,

    #[error("invalid embedding config: {0}")]
    InvalidConfig(String),

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("non-finite value encountered during training (epoch {epoch}, document `{doc_id}`)")]
    NonFinite { epoch: usize, doc_id: String },

    #[error("unknown document id `{0}`")]
    UnknownDocument(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("model file: unsupported version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("vector lengths differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("zero-norm vector")]
    ZeroNorm,

    #[error("cosmul needs at least one positive vector")]
    NoPositives,

    #[error("rank position p={p} out of range for a list of {len}")]
    InvalidCutoff { p: usize, len: usize },

    #[error("invalid relevance score {0}: must be a multiple of 0.5 in [-1, 3]")]
    InvalidRelevance(f64),

    #[error("bug `{bug_id}`: {message}")]
    Annotation { bug_id: String, message: String },

    #[error("bug `{bug_id}`: annotations missing for {}", .missing.join(", "))]
    MissingAnnotations {
        bug_id: String,
        missing: Vec<String>,
    },

    #[error("annotators disagree and the arbiter has no score for {}", .0.join(", "))]
    UnresolvedDisagreement(Vec<String>),

    #[error("nothing to report: {0}")]
    NothingToReport(&'static str),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn corpus(bug_id: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Corpus {
            bug_id: bug_id.into(),
            message: message.into(),
        }
    }
}
