use std::io;

use thiserror::Error;

/// Errors raised across the foraging pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate post id `{0}`")]
    DuplicatePost(String),
    #[error("unknown edge kind `{0}`")]
    UnknownEdgeKind(String),
    #[error("empty user id on record `{0}`")]
    EmptyUser(String),
    #[error("edge {0} is not a content edge of this graph")]
    UnknownEdge(usize),
    #[error("term frequency of an empty term list is undefined")]
    EmptyTerms,
    #[error("term `{0}` is not registered in the vocabulary")]
    UnknownTerm(String),
    #[error("interest extraction produced no terms")]
    EmptyInterests,
    #[error("cannot draw {k} centroids from {eligible} non-empty posts")]
    TooManyClusters { k: usize, eligible: usize },
    #[error("position {position} is outside [1, {m}]")]
    InvalidPosition { position: usize, m: usize },
    #[error("a surfing path needs at least one edge")]
    EmptyPath,
    #[error("population constraint unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{malformed} of {total} lines are malformed (limit 10%)")]
    TooManyMalformed { malformed: usize, total: usize },
    #[error("clustering snapshot mismatch: {0}")]
    SnapshotMismatch(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by how the tool was invoked rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
