use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("requirement `{0}` has empty text")]
    EmptyText(String),
    #[error("requirement `{id}` text is {len} characters, limit is 10000")]
    TextTooLong { id: String, len: usize },
    #[error("unknown requirement id `{0}`")]
    UnknownId(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("self-pair `{0}`")]
    SelfPair(String),
    #[error("need at least two requirements, got {0}")]
    TooFewRequirements(usize),
    #[error("class `{class}` has {count} pairs, fewer than k = {k}")]
    ClassTooSmall {
        class: String,
        count: usize,
        k: usize,
    },
    #[error("duplicate-labeled pair ({0}, {1}) in a CN dataset")]
    DuplicateInCn(String, String),
    #[error("dimension mismatch for `{id}`: expected {expected}, got {got}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
    #[error("no embedding for requirement `{0}`")]
    MissingEmbedding(String),
    #[error("no {what} annotation for requirement `{id}`")]
    MissingAnnotation { id: String, what: &'static str },
    #[error("conflict prediction for ({0}, {1}) has no filter decision")]
    UncoveredPositive(String, String),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("no training data")]
    EmptyData,
    #[error("pair ({0}, {1}) has no label")]
    Unlabeled(String, String),
    #[error("label `{0}` is not admissible in this label mode")]
    LabelNotInMode(String),
    #[error("label mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("requirement `{0}` appears in both training and test sets")]
    Overlap(String),
    #[error("unsupported format version: {0}")]
    Version(String),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("all fold differences have zero variance; pipelines show no difference")]
    DegenerateVariance,
    #[error("empty confusion matrix")]
    EmptyMatrix,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
