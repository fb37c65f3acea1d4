//! Significance of a subgroup's score share.
//!
//! The null model places each cognate's most similar match in a subgroup with
//! probability proportional to the subgroup's language count. Two routes test
//! it: a chi-square comparison of observed against count-proportional expected
//! scores, and a Monte Carlo reassignment of items under the same model.

mod chisq;
mod gamma;
mod permutation;

use thiserror::Error;

use crate::scoring::Weight;
use crate::taxonomy::TaxonomyError;

pub use chisq::{
    chi_square_cells, chi_square_split, verdict, CellContribution, ChiSquareResult, MultiCellResult, Verdict,
    CRITICAL_VALUES_DF1,
};
pub use gamma::{chi_square_sf, ln_gamma, regularized_gamma_q};
pub use permutation::{permutation_test, wilson_interval, PermutationConfig, PermutationResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("`{focus}` is not strictly inside `{universe}`")]
    NotStrictDescendant { focus: String, universe: String },
    #[error("`{0}` has no language_count")]
    MissingLanguageCount(String),
    #[error("language count of `{universe}` ({universe_count}) is below `{part}` ({part_count})")]
    CountOrder {
        universe: String,
        universe_count: u64,
        part: String,
        part_count: u64,
    },
    #[error("`{0}` has a zero score; nothing to test")]
    ZeroUniverseScore(String),
    #[error("degenerate input: expected score for cell `{cell}` is zero")]
    DegenerateExpectation { cell: String },
    #[error("at least two cells are needed, got {0}")]
    TooFewCells(usize),
    #[error("cells `{0}` and `{1}` overlap")]
    OverlappingCells(String, String),
    #[error("cells leave {uncovered} of the score of `{universe}` uncovered")]
    CellsDoNotCover { universe: String, uncovered: Weight },
    #[error("chi-square statistic must be a non-negative number, got {0}")]
    InvalidStatistic(f64),
    #[error("degrees of freedom must be at least 1")]
    ZeroDf,
    #[error("iterations must be at least 1")]
    ZeroIterations,
    #[error("`{0}` has no counted subgroups to reassign items to")]
    NoCountedCells(String),
    #[error("`{focus}` is not one of the counted subgroups of `{universe}` ({cells})")]
    FocusNotACell {
        focus: String,
        universe: String,
        cells: String,
    },
    #[error("no item has a most similar cognate inside `{0}`")]
    NoParticipatingItems(String),
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}
