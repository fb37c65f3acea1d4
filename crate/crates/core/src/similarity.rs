//! Phonetic ranking of candidate cognates.
//!
//! Transcriptions are normalised and split into phoneme tokens, then compared
//! with a weighted Levenshtein distance: identical tokens cost 0, tokens of
//! the same phonetic class 0.5, anything else 1, and insertions or deletions 1.
//! The ranking is advisory. It never edits a dataset.

use std::collections::HashMap;
use std::sync::LazyLock;

use serde::Serialize;
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::tsv;

pub const DEFAULT_TABLE: &str = include_str!("../data/phonetics.tsv");

pub const CANDIDATE_HEADER: [&str; 3] = ["form", "gloss", "group"];

const CLASS_COST: f64 = 0.5;
const EDIT_COST: f64 = 1.0;

static DEFAULT: LazyLock<PhoneticTable> =
    LazyLock::new(|| PhoneticTable::from_config(DEFAULT_TABLE).expect("bundled phonetic table is valid"));

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimilarityError {
    #[error("empty transcription")]
    EmptyForm,
    #[error("no candidates to rank")]
    NoCandidates,
    #[error("phonetic table line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("candidates line {line}: {message}")]
    Candidates { line: usize, message: String },
}

/// Token inventory and class assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneticTable {
    /// Longest first.
    multigraphs: Vec<Vec<char>>,
    classes: HashMap<String, String>,
}

impl Default for PhoneticTable {
    fn default() -> Self {
        DEFAULT.clone()
    }
}

impl PhoneticTable {
    pub fn from_config(source: &str) -> Result<Self, SimilarityError> {
        let mut multigraphs = Vec::new();
        let mut classes = HashMap::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let err = |message: String| SimilarityError::Config { line: idx + 1, message };
            match fields.as_slice() {
                ["multigraph", seq] => {
                    let seq = normalise(seq);
                    if seq.chars().count() < 2 {
                        return Err(err(format!("multigraph `{seq}` needs at least two characters")));
                    }
                    multigraphs.push(seq.chars().collect());
                }
                [token, class] if !token.is_empty() && !class.is_empty() => {
                    classes.insert(normalise(token), class.to_string());
                }
                _ => {
                    return Err(err(format!(
                        "expected `token<TAB>class` or `multigraph<TAB>seq`, got `{line}`"
                    )))
                }
            }
        }
        multigraphs.sort_by(|a: &Vec<char>, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        multigraphs.dedup();
        Ok(PhoneticTable { multigraphs, classes })
    }

    /// Class of a token, falling back to its base once modifiers are removed.
    pub fn class_of(&self, token: &str) -> Option<&str> {
        if let Some(c) = self.classes.get(token) {
            return Some(c);
        }
        let base: String = token.chars().filter(|&c| !is_modifier(c)).collect();
        self.classes.get(&base).map(String::as_str)
    }

    pub fn tokenize(&self, form: &str) -> Result<PhonemeString, SimilarityError> {
        let cleaned: Vec<char> = strip_markers(&normalise(form)).chars().collect();
        if cleaned.is_empty() {
            return Err(SimilarityError::EmptyForm);
        }
        let mut tokens: Vec<String> = Vec::new();
        let mut i = 0;
        while i < cleaned.len() {
            let rest = &cleaned[i..];
            if is_modifier(rest[0]) {
                match tokens.last_mut() {
                    Some(last) => last.push(rest[0]),
                    None => tokens.push(rest[0].to_string()),
                }
                i += 1;
                continue;
            }
            let len = self
                .multigraphs
                .iter()
                .find(|m| rest.starts_with(m))
                .map_or(1, Vec::len);
            tokens.push(rest[..len].iter().collect());
            i += len;
        }
        Ok(PhonemeString {
            original: form.to_string(),
            tokens,
        })
    }

    pub fn substitution_cost(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 0.0;
        }
        match (self.class_of(a), self.class_of(b)) {
            (Some(x), Some(y)) if x == y => CLASS_COST,
            _ => EDIT_COST,
        }
    }

    /// Weighted Levenshtein distance over tokens.
    pub fn distance(&self, a: &PhonemeString, b: &PhonemeString) -> f64 {
        let (a, b) = (&a.tokens, &b.tokens);
        let mut prev: Vec<f64> = (0..=b.len()).map(|j| j as f64 * EDIT_COST).collect();
        let mut cur = vec![0.0; b.len() + 1];
        for (i, ta) in a.iter().enumerate() {
            cur[0] = (i + 1) as f64 * EDIT_COST;
            for (j, tb) in b.iter().enumerate() {
                cur[j + 1] = (prev[j] + self.substitution_cost(ta, tb))
                    .min(prev[j + 1] + EDIT_COST)
                    .min(cur[j] + EDIT_COST);
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        prev[b.len()]
    }

    /// Ranks candidates by distance to `query`, ties broken by group id and
    /// then by form.
    pub fn rank_candidates(
        &self,
        query: &str,
        candidates: &[Candidate],
    ) -> Result<Vec<RankedCandidate>, SimilarityError> {
        if candidates.is_empty() {
            return Err(SimilarityError::NoCandidates);
        }
        let query = self.tokenize(query)?;
        let mut ranked = candidates
            .iter()
            .map(|c| {
                let form = self.tokenize(&c.form)?;
                Ok(RankedCandidate {
                    distance: self.distance(&query, &form),
                    form,
                    gloss: c.gloss.clone(),
                    group: c.group.clone(),
                    rank: 0,
                })
            })
            .collect::<Result<Vec<_>, SimilarityError>>()?;
        ranked.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then_with(|| a.group.cmp(&b.group))
                .then_with(|| a.form.original.cmp(&b.form.original))
        });
        for (i, r) in ranked.iter_mut().enumerate() {
            r.rank = i + 1;
        }
        Ok(ranked)
    }
}

/// A transcription and its phoneme tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhonemeString {
    pub original: String,
    pub tokens: Vec<String>,
}

impl PhonemeString {
    /// Builds a string directly from tokens, bypassing normalisation.
    pub fn from_tokens<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        PhonemeString {
            original: tokens.concat(),
            tokens,
        }
    }

    /// Canonical spelling: the tokens joined back together.
    pub fn render(&self) -> String {
        self.tokens.concat()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub form: String,
    pub gloss: String,
    pub group: String,
}

impl Candidate {
    pub fn new(form: &str, gloss: &str, group: &str) -> Self {
        Candidate {
            form: form.into(),
            gloss: gloss.into(),
            group: group.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedCandidate {
    pub form: PhonemeString,
    pub gloss: String,
    pub group: String,
    pub distance: f64,
    pub rank: usize,
}

/// Parses a `form<TAB>gloss<TAB>group` candidate file.
pub fn parse_candidates(source: &str) -> Result<Vec<Candidate>, SimilarityError> {
    let (header, rows) = tsv::rows(source);
    let Some(header) = header else {
        return Ok(Vec::new());
    };
    if !tsv::header_matches(&header, &CANDIDATE_HEADER) {
        return Err(SimilarityError::Candidates {
            line: header.line,
            message: format!("expected header `{}`", CANDIDATE_HEADER.join("\\t")),
        });
    }
    rows.into_iter()
        .map(|row| match row.fields.as_slice() {
            [form, gloss, group] => Ok(Candidate::new(form.trim(), gloss.trim(), group.trim())),
            other => Err(SimilarityError::Candidates {
                line: row.line,
                message: format!("expected 3 fields, found {}", other.len()),
            }),
        })
        .collect()
}

pub fn tokenize(form: &str) -> Result<PhonemeString, SimilarityError> {
    DEFAULT.tokenize(form)
}

pub fn distance(a: &PhonemeString, b: &PhonemeString) -> f64 {
    DEFAULT.distance(a, b)
}

pub fn rank_candidates(query: &str, candidates: &[Candidate]) -> Result<Vec<RankedCandidate>, SimilarityError> {
    DEFAULT.rank_candidates(query, candidates)
}

fn normalise(s: &str) -> String {
    s.nfd()
        .map(|c| match c {
            '\u{2019}' | '\u{02BC}' | '\u{2018}' => '\'',
            c => c,
        })
        .collect::<String>()
        .to_lowercase()
}

/// Removes reconstruction asterisks, hyphens, whitespace and parenthesised
/// alternates.
fn strip_markers(s: &str) -> String {
    let mut depth = 0usize;
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth > 0 => {}
            '*' | '-' => {}
            c if c.is_whitespace() => {}
            c => out.push(c),
        }
    }
    out
}

/// Characters that attach to the preceding token.
fn is_modifier(c: char) -> bool {
    is_combining_mark(c) || matches!(c, '\'' | 'ː' | 'ʰ' | 'ʷ' | 'ʲ')
}
