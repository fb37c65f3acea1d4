//! The Mayan basic body-part cognate dataset, embedded in the library.
//!
//! Twenty-three cognate items classified by the language group of their most
//! similar cognate, over a taxonomy with 82 Austronesian languages split into
//! Formosan (5), Western MP (26), Central MP (6), SHWNG (2) and Oceanic (41).

use std::path::Path;

use crate::lexicon::Dataset;
use crate::taxonomy::Taxonomy;
use crate::{Error, Result};

pub const TAXONOMY_TSV: &str = include_str!("../fixtures/taxonomy.tsv");
pub const ITEMS_TSV: &str = include_str!("../fixtures/items.tsv");

/// Default output names used by `csa init --fixture`.
pub const TAXONOMY_FILE: &str = "taxonomy.tsv";
pub const ITEMS_FILE: &str = "items.tsv";

pub fn taxonomy() -> Taxonomy {
    Taxonomy::from_tsv(TAXONOMY_TSV).expect("embedded taxonomy is valid")
}

pub fn dataset() -> Dataset {
    Dataset::from_tsv(taxonomy(), ITEMS_TSV).expect("embedded items are valid")
}

/// Writes both fixture files into `dir`, returning the paths written.
pub fn write_to(dir: &Path) -> Result<[std::path::PathBuf; 2]> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let tax = dir.join(TAXONOMY_FILE);
    let items = dir.join(ITEMS_FILE);
    for (path, body) in [(&tax, TAXONOMY_TSV), (&items, ITEMS_TSV)] {
        std::fs::write(path, body).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok([tax, items])
}
