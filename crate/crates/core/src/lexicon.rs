//! Meaning inventory, cognate items and dataset ingestion.
//!
//! The inventory is fixed at 31 basic body-part meanings: 25 drawn from the
//! Swadesh 100 list and 6 further items. Datasets cannot extend it. Two
//! supplementary meanings (eye, face) are recognised so that compound labels
//! such as `EYE/FACE` load, and they are flagged by [`Dataset::validate`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::taxonomy::Taxonomy;
use crate::tsv;

pub const HEADER: [&str; 5] = ["id", "meaning", "msc_groups", "table1_section", "evidence"];

/// Maximum number of tied most-similar groups for one item.
pub const MAX_TIE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeaningTier {
    /// Member of the Swadesh 100 subset (25 meanings).
    Core,
    /// One of the 6 additional body-part meanings.
    Extended,
    /// Recognised only so that source data loads; outside the 31-item inventory.
    Supplementary,
}

macro_rules! meanings {
    ($($variant:ident => $label:literal, $tier:ident;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        pub enum Meaning { $($variant),* }

        impl Meaning {
            pub const ALL: &'static [Meaning] = &[$(Meaning::$variant),*];

            pub fn label(self) -> &'static str {
                match self { $(Meaning::$variant => $label),* }
            }

            pub fn tier(self) -> MeaningTier {
                match self { $(Meaning::$variant => MeaningTier::$tier),* }
            }
        }
    };
}

meanings! {
    Belly => "belly", Core;
    Blood => "blood", Core;
    Bone => "bone", Core;
    Breast => "breast", Core;
    Ear => "ear", Core;
    Egg => "egg", Core;
    Fat => "fat", Core;
    Feather => "feather", Core;
    Foot => "foot", Core;
    Hair => "hair", Core;
    Hand => "hand", Core;
    Head => "head", Core;
    Heart => "heart", Core;
    Horn => "horn", Core;
    Knee => "knee", Core;
    Liver => "liver", Core;
    Meat => "meat", Core;
    Mouth => "mouth", Core;
    Neck => "neck", Core;
    Nose => "nose", Core;
    Saliva => "saliva", Core;
    Skin => "skin", Core;
    Tail => "tail", Core;
    Tongue => "tongue", Core;
    Tooth => "tooth", Core;
    Arm => "arm", Extended;
    Back => "back", Extended;
    Breath => "breath", Extended;
    Leg => "leg", Extended;
    Lip => "lip", Extended;
    Wing => "wing", Extended;
    Eye => "eye", Supplementary;
    Face => "face", Supplementary;
}

impl Meaning {
    /// The 31 inventory meanings, without supplementary ones.
    pub fn inventory() -> impl Iterator<Item = Meaning> {
        Self::ALL
            .iter()
            .copied()
            .filter(|m| m.tier() != MeaningTier::Supplementary)
    }

    /// Parses one meaning, accepting the long forms of the normalised labels.
    pub fn parse(raw: &str) -> Option<Meaning> {
        let key = raw.trim().to_lowercase();
        let key = match key.as_str() {
            "saliva (or spit)" | "spit" => "saliva",
            "breath (or to breathe)" | "to breathe" | "breathe" => "breath",
            "belly (or bowels)" | "bowels" => "belly",
            other => other,
        };
        Self::ALL.iter().copied().find(|m| m.label() == key)
    }
}

impl fmt::Display for Meaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An item's meaning as written in the data, with its resolved parts.
///
/// `FOOT/LEG` resolves to `[Foot, Leg]`; `saliva (or spit)` to `[Saliva]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeaningLabel {
    pub raw: String,
    pub parts: Vec<Meaning>,
}

impl MeaningLabel {
    pub fn parse(raw: &str) -> Option<MeaningLabel> {
        let raw = raw.trim();
        if raw.is_empty() {
            return None;
        }
        let parts = match Meaning::parse(raw) {
            Some(m) => vec![m],
            None => {
                let mut parts = Vec::new();
                for piece in raw.split('/') {
                    let m = Meaning::parse(piece)?;
                    if !parts.contains(&m) {
                        parts.push(m);
                    }
                }
                parts
            }
        };
        Some(MeaningLabel {
            raw: raw.to_string(),
            parts,
        })
    }

    pub fn in_inventory(&self) -> bool {
        self.parts.iter().any(|m| m.tier() != MeaningTier::Supplementary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CognateItem {
    pub id: String,
    pub meaning: MeaningLabel,
    /// Tied most-similar groups, in file order. Order carries no weight.
    pub msc_groups: Vec<String>,
    pub table1_section: Option<String>,
    pub evidence: Option<String>,
}

impl CognateItem {
    /// Tie multiplicity `m`.
    pub fn tie_size(&self) -> usize {
        self.msc_groups.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("no header line (expected `id\\tmeaning\\tmsc_groups\\ttable1_section\\tevidence`)")]
    MissingHeader,
    #[error("line {line}: unexpected header `{found}`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: expected 5 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: empty item id")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate item id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: meaning `{label}` is not in the 31-item inventory")]
    UnknownMeaning { line: usize, label: String },
    #[error("line {line}: unknown group `{group}`")]
    UnknownGroup { line: usize, group: String },
    #[error("line {line}: {m} tied groups, expected 1 to {MAX_TIE}")]
    TieSize { line: usize, m: usize },
    #[error("line {line}: group `{group}` listed twice")]
    DuplicateGroup { line: usize, group: String },
}

/// A taxonomy together with cognate items that reference it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    taxonomy: Taxonomy,
    items: Vec<CognateItem>,
}

impl Dataset {
    pub fn from_tsv(taxonomy: Taxonomy, source: &str) -> Result<Self, DatasetError> {
        let (header, rows) = tsv::rows(source);
        let Some(header) = header else {
            // A file of only comments is an empty dataset.
            return if source
                .lines()
                .all(|l| l.trim().is_empty() || l.trim_start().starts_with('#'))
            {
                Ok(Dataset {
                    taxonomy,
                    items: Vec::new(),
                })
            } else {
                Err(DatasetError::MissingHeader)
            };
        };
        if !tsv::header_matches(&header, &HEADER) {
            return Err(DatasetError::BadHeader {
                line: header.line,
                found: header.fields.join("\t"),
            });
        }

        let mut items = Vec::with_capacity(rows.len());
        let mut seen = HashSet::new();
        for row in rows {
            let line = row.line;
            if row.fields.len() != 5 {
                return Err(DatasetError::FieldCount {
                    line,
                    found: row.fields.len(),
                });
            }
            let id = row.fields[0].trim();
            if id.is_empty() {
                return Err(DatasetError::EmptyId { line });
            }
            if !seen.insert(id.to_string()) {
                return Err(DatasetError::DuplicateId {
                    line,
                    id: id.to_string(),
                });
            }
            let meaning = MeaningLabel::parse(row.fields[1]).ok_or_else(|| DatasetError::UnknownMeaning {
                line,
                label: row.fields[1].trim().to_string(),
            })?;
            let msc_groups: Vec<String> = row.fields[2]
                .split(';')
                .map(str::trim)
                .filter(|g| !g.is_empty())
                .map(str::to_string)
                .collect();
            let item = CognateItem {
                id: id.to_string(),
                meaning,
                msc_groups,
                table1_section: non_empty(row.fields[3]),
                evidence: non_empty(row.fields[4]),
            };
            check_item(&taxonomy, &item, line)?;
            items.push(item);
        }
        Ok(Dataset { taxonomy, items })
    }

    /// Builds a dataset from items in memory, checking the same invariants as
    /// [`Dataset::from_tsv`]. Error line numbers are 1-based item positions.
    pub fn new(taxonomy: Taxonomy, items: Vec<CognateItem>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for (i, item) in items.iter().enumerate() {
            if !seen.insert(item.id.as_str()) {
                return Err(DatasetError::DuplicateId {
                    line: i + 1,
                    id: item.id.clone(),
                });
            }
            check_item(&taxonomy, item, i + 1)?;
        }
        Ok(Dataset { taxonomy, items })
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn items(&self) -> &[CognateItem] {
        &self.items
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{}\n", HEADER.join("\t"));
        for item in &self.items {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                item.id,
                item.meaning.raw,
                item.msc_groups.join(";"),
                item.table1_section.as_deref().unwrap_or(""),
                item.evidence.as_deref().unwrap_or("")
            ));
        }
        out
    }

    /// Coverage and consistency report. Never fails: load already enforced the
    /// hard invariants.
    pub fn validate(&self) -> ValidationReport {
        let mut per_meaning: BTreeMap<Meaning, Vec<&str>> = BTreeMap::new();
        for item in &self.items {
            for &m in &item.meaning.parts {
                per_meaning.entry(m).or_default().push(&item.id);
            }
        }
        let uncovered: Vec<Meaning> = Meaning::inventory().filter(|m| !per_meaning.contains_key(m)).collect();

        let mut warnings = Vec::new();
        if self.items.is_empty() {
            warnings.push("no items".to_string());
        }
        warnings.extend(self.taxonomy.count_warnings().into_iter().map(|w| w.to_string()));
        if !uncovered.is_empty() && !self.items.is_empty() {
            let labels: Vec<_> = uncovered.iter().map(|m| m.label()).collect();
            warnings.push(format!(
                "{} of 31 meanings have no cognate item: {}",
                uncovered.len(),
                labels.join(", ")
            ));
        }
        for item in self.items.iter().filter(|i| !i.meaning.in_inventory()) {
            warnings.push(format!(
                "item `{}`: meaning `{}` lies outside the 31-item inventory",
                item.id, item.meaning.raw
            ));
        }

        let notes = per_meaning
            .iter()
            .filter(|(_, ids)| ids.len() > 1)
            .map(|(m, ids)| format!("meaning `{m}` carries {} items: {}", ids.len(), ids.join(", ")))
            .collect();

        ValidationReport {
            items: self.items.len(),
            meanings_covered: 31 - uncovered.len(),
            uncovered,
            errors: Vec::new(),
            warnings,
            notes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub items: usize,
    pub meanings_covered: usize,
    pub uncovered: Vec<Meaning>,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    /// Informational: meanings realised by more than one item.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

fn check_item(taxonomy: &Taxonomy, item: &CognateItem, line: usize) -> Result<(), DatasetError> {
    let m = item.msc_groups.len();
    if !(1..=MAX_TIE).contains(&m) {
        return Err(DatasetError::TieSize { line, m });
    }
    for (i, g) in item.msc_groups.iter().enumerate() {
        if !taxonomy.contains(g) {
            return Err(DatasetError::UnknownGroup { line, group: g.clone() });
        }
        if item.msc_groups[..i].contains(g) {
            return Err(DatasetError::DuplicateGroup { line, group: g.clone() });
        }
    }
    Ok(())
}

fn non_empty(field: &str) -> Option<String> {
    Some(field.trim()).filter(|f| !f.is_empty()).map(str::to_string)
}
