use thiserror::Error;

use crate::lexicon::DatasetError;
use crate::scoring::ScoringError;
use crate::similarity::SimilarityError;
use crate::stats::StatsError;
use crate::taxonomy::TaxonomyError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error used by the report layer and the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("taxonomy: {0}")]
    Taxonomy(#[from] TaxonomyError),
    #[error("items: {0}")]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

impl Error {
    /// Process exit status: 1 for data errors, 2 for IO and configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Config(_) => 2,
            _ => 1,
        }
    }
}
