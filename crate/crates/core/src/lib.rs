//! Closest similarity analysis (CSA) for lexicostatistics.
//!
//! Cognate items carry a set of tied "most similar cognate" groups. Each item
//! contributes a total weight of exactly 1, split as `1/m` across its `m` tied
//! groups. Scores are kept as exact rationals and rolled up a language-group
//! taxonomy. Significance of a subgroup's share comes from two independent
//! routes: a chi-square split with expectations proportional to language counts,
//! and a seeded Monte Carlo reassignment under the same null.
//!
//! The crate ships the Mayan body-part dataset as a fixture, see [`fixture`].
//! Runnable walkthroughs live under `examples/`:
//!
//! ```bash
//! cargo run -p csa --example replicate_table1
//! cargo run -p csa --example tie_weights
//! cargo run -p csa --example chi_square_split
//! cargo run -p csa --example tail_probability
//! cargo run -p csa --example permutation_null
//! cargo run -p csa --example suggest_cognates
//! cargo run -p csa --example custom_taxonomy
//! ```

pub mod error;
pub mod fixture;
pub mod lexicon;
pub mod report;
pub mod scoring;
pub mod similarity;
pub mod stats;
pub mod taxonomy;
mod tsv;

pub use error::{Error, Result};
pub use lexicon::{CognateItem, Dataset, Meaning, MeaningLabel, MeaningTier, ValidationReport};
pub use scoring::{compute_css, weights_for_tie, CssTable, Weight};
pub use similarity::{PhonemeString, PhoneticTable, RankedCandidate};
pub use stats::{
    chi_square_cells, chi_square_sf, chi_square_split, permutation_test, ChiSquareResult, MultiCellResult,
    PermutationConfig, PermutationResult,
};
pub use taxonomy::{LanguageGroupNode, Taxonomy};
