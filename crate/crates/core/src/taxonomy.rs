//! Language-group hierarchy with per-node language counts.
//!
//! Counts are stored data. A parent's count is never derived from its children,
//! so mismatches are reported by [`Taxonomy::count_warnings`] but never rejected.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::tsv;

pub const HEADER: [&str; 4] = ["id", "parent", "display_name", "language_count"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("no header line (expected `id\\tparent\\tdisplay_name\\tlanguage_count`)")]
    MissingHeader,
    #[error("line {line}: unexpected header `{found}`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: expected 4 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: empty node id")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate node id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: node `{id}` names unknown parent `{parent}`")]
    MissingParent { line: usize, id: String, parent: String },
    #[error("line {line}: node `{id}` is part of a parent cycle")]
    Cycle { line: usize, id: String },
    #[error("line {line}: node `{id}` has negative language count {value}")]
    NegativeCount { line: usize, id: String, value: i64 },
    #[error("line {line}: node `{id}` has invalid language count `{value}`")]
    InvalidCount { line: usize, id: String, value: String },
    #[error("no root node (a node with an empty parent field)")]
    NoRoot,
    #[error("line {line}: second root `{id}` (root is `{root}`)")]
    MultipleRoots { line: usize, id: String, root: String },
    #[error("unknown node id `{0}`")]
    UnknownId(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageGroupNode {
    pub id: String,
    pub display_name: String,
    pub parent: Option<String>,
    /// Number of languages sampled from this group (`n_X`).
    pub language_count: Option<u64>,
}

/// An immutable rooted tree of language groups, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    nodes: Vec<LanguageGroupNode>,
    index: HashMap<String, usize>,
    children: Vec<Vec<usize>>,
    root: usize,
}

/// A count mismatch between a node and the counted groups beneath it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountWarning {
    pub id: String,
    pub count: u64,
    pub descendant_sum: u64,
    pub counted: Vec<String>,
}

impl std::fmt::Display for CountWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "node `{}` has language_count {} but its counted subgroups ({}) sum to {}",
            self.id,
            self.count,
            self.counted.join(", "),
            self.descendant_sum
        )
    }
}

impl Taxonomy {
    /// Parses and validates a taxonomy TSV.
    pub fn from_tsv(source: &str) -> Result<Self, TaxonomyError> {
        let (header, rows) = tsv::rows(source);
        let header = header.ok_or(TaxonomyError::MissingHeader)?;
        if !tsv::header_matches(&header, &HEADER) {
            return Err(TaxonomyError::BadHeader {
                line: header.line,
                found: header.fields.join("\t"),
            });
        }

        let mut nodes: Vec<LanguageGroupNode> = Vec::with_capacity(rows.len());
        let mut lines = Vec::with_capacity(rows.len());
        let mut index = HashMap::new();
        let mut root: Option<usize> = None;

        for row in &rows {
            let line = row.line;
            if row.fields.len() != 4 {
                return Err(TaxonomyError::FieldCount {
                    line,
                    found: row.fields.len(),
                });
            }
            let id = row.fields[0].trim();
            if id.is_empty() {
                return Err(TaxonomyError::EmptyId { line });
            }
            if index.contains_key(id) {
                return Err(TaxonomyError::DuplicateId {
                    line,
                    id: id.to_string(),
                });
            }
            let parent = Some(row.fields[1].trim()).filter(|p| !p.is_empty()).map(str::to_string);
            let language_count = parse_count(line, id, row.fields[3].trim())?;
            let pos = nodes.len();
            if parent.is_none() {
                if let Some(r) = root {
                    return Err(TaxonomyError::MultipleRoots {
                        line,
                        id: id.to_string(),
                        root: nodes[r].id.clone(),
                    });
                }
                root = Some(pos);
            }
            index.insert(id.to_string(), pos);
            lines.push(line);
            nodes.push(LanguageGroupNode {
                id: id.to_string(),
                display_name: row.fields[2].trim().to_string(),
                parent,
                language_count,
            });
        }

        let mut children = vec![Vec::new(); nodes.len()];
        for (pos, node) in nodes.iter().enumerate() {
            if let Some(parent) = &node.parent {
                if parent == &node.id {
                    return Err(TaxonomyError::Cycle {
                        line: lines[pos],
                        id: node.id.clone(),
                    });
                }
                let &p = index.get(parent).ok_or_else(|| TaxonomyError::MissingParent {
                    line: lines[pos],
                    id: node.id.clone(),
                    parent: parent.clone(),
                })?;
                children[p].push(pos);
            }
        }

        // Every parent exists, so any node the root cannot reach sits on or
        // below a cycle.
        let root = match root {
            Some(r) => r,
            None if nodes.is_empty() => return Err(TaxonomyError::NoRoot),
            None => {
                return Err(TaxonomyError::Cycle {
                    line: lines[0],
                    id: nodes[0].id.clone(),
                })
            }
        };
        let mut reached = vec![false; nodes.len()];
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            reached[n] = true;
            stack.extend(children[n].iter().copied());
        }
        if let Some(pos) = reached.iter().position(|r| !r) {
            return Err(TaxonomyError::Cycle {
                line: lines[pos],
                id: nodes[pos].id.clone(),
            });
        }

        Ok(Taxonomy {
            nodes,
            index,
            children,
            root,
        })
    }

    /// Builds a taxonomy from nodes already in memory, running the same checks
    /// as [`Taxonomy::from_tsv`].
    pub fn from_nodes(nodes: impl IntoIterator<Item = LanguageGroupNode>) -> Result<Self, TaxonomyError> {
        let tsv: String = nodes
            .into_iter()
            .fold(format!("{}\n", HEADER.join("\t")), |mut acc, n| {
                write_node(&mut acc, &n);
                acc
            });
        Self::from_tsv(&tsv)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{}\n", HEADER.join("\t"));
        for node in &self.nodes {
            write_node(&mut out, node);
        }
        out
    }

    pub fn root(&self) -> &LanguageGroupNode {
        &self.nodes[self.root]
    }

    pub fn nodes(&self) -> &[LanguageGroupNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn node(&self, id: &str) -> Result<&LanguageGroupNode, TaxonomyError> {
        self.position(id).map(|p| &self.nodes[p])
    }

    pub fn children(&self, id: &str) -> Result<impl Iterator<Item = &LanguageGroupNode>, TaxonomyError> {
        let p = self.position(id)?;
        Ok(self.children[p].iter().map(|&c| &self.nodes[c]))
    }

    /// `id` together with all of its transitive children.
    pub fn descendants(&self, id: &str) -> Result<BTreeSet<&str>, TaxonomyError> {
        let start = self.position(id)?;
        let mut out = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            out.insert(self.nodes[n].id.as_str());
            stack.extend(self.children[n].iter().copied());
        }
        Ok(out)
    }

    /// True when `ancestor` lies on the path from `id` to the root, `id` included.
    pub fn is_within(&self, id: &str, ancestor: &str) -> Result<bool, TaxonomyError> {
        self.position(ancestor)?;
        let mut cur = Some(self.node(id)?);
        while let Some(n) = cur {
            if n.id == ancestor {
                return Ok(true);
            }
            cur = n.parent.as_deref().map(|p| &self.nodes[self.index[p]]);
        }
        Ok(false)
    }

    /// The highest counted nodes strictly below `id`: counted descendants with
    /// no counted node between them and `id`. Returned in file order.
    pub fn counted_cells(&self, id: &str) -> Result<Vec<&LanguageGroupNode>, TaxonomyError> {
        let start = self.position(id)?;
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.children[start].iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            if self.nodes[n].language_count.is_some() {
                out.push(n);
            } else {
                stack.extend(self.children[n].iter().rev().copied());
            }
        }
        out.sort_unstable();
        Ok(out.into_iter().map(|n| &self.nodes[n]).collect())
    }

    /// Counted nodes whose count differs from the sum over their counted cells.
    pub fn count_warnings(&self) -> Vec<CountWarning> {
        self.nodes
            .iter()
            .filter_map(|node| {
                let count = node.language_count?;
                let cells = self.counted_cells(&node.id).ok()?;
                if cells.is_empty() {
                    return None;
                }
                let sum: u64 = cells.iter().filter_map(|c| c.language_count).sum();
                (sum != count).then(|| CountWarning {
                    id: node.id.clone(),
                    count,
                    descendant_sum: sum,
                    counted: cells.iter().map(|c| c.id.clone()).collect(),
                })
            })
            .collect()
    }

    fn position(&self, id: &str) -> Result<usize, TaxonomyError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| TaxonomyError::UnknownId(id.to_string()))
    }
}

fn parse_count(line: usize, id: &str, raw: &str) -> Result<Option<u64>, TaxonomyError> {
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<i64>() {
        Ok(v) if v < 0 => Err(TaxonomyError::NegativeCount {
            line,
            id: id.to_string(),
            value: v,
        }),
        Ok(v) => Ok(Some(v as u64)),
        Err(_) => Err(TaxonomyError::InvalidCount {
            line,
            id: id.to_string(),
            value: raw.to_string(),
        }),
    }
}

fn write_node(out: &mut String, node: &LanguageGroupNode) {
    let _ = writeln!(
        out,
        "{}\t{}\t{}\t{}",
        node.id,
        node.parent.as_deref().unwrap_or(""),
        node.display_name,
        node.language_count.map(|c| c.to_string()).unwrap_or_default()
    );
}
