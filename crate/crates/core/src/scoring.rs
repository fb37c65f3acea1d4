//! Closest similarity scores (CSS) with exact tie weights.
//!
//! Each cognate item carries weight 1. When `m` groups are equally most
//! similar, every one of them receives exactly `1/m`. Leaf scores attach to
//! the node an item names; rolled scores add the whole subtree. All arithmetic
//! is rational.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lexicon::{Dataset, MAX_TIE};
use crate::taxonomy::Taxonomy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoringError {
    #[error("tie size {0} outside 1..={MAX_TIE}")]
    TieSize(usize),
}

/// An exact non-floating score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(Rational64);

impl Weight {
    pub const ZERO: Weight = Weight(Rational64::new_raw(0, 1));
    pub const ONE: Weight = Weight(Rational64::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Weight {
        Weight(Rational64::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Weight {
        Weight(Rational64::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(self.numer().into(), self.denom().into())
    }

    /// Decimal rendering rounded half away from zero.
    pub fn to_decimal(&self, decimals: u32) -> String {
        round_half_up(&self.to_big(), decimals)
    }
}

impl fmt::Display for Weight {
    /// Exact fraction, `31/3`, or a bare integer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        Weight(self.0 - rhs.0)
    }
}

impl Mul for Weight {
    type Output = Weight;
    fn mul(self, rhs: Weight) -> Weight {
        Weight(self.0 * rhs.0)
    }
}

impl Div for Weight {
    type Output = Weight;
    fn div(self, rhs: Weight) -> Weight {
        Weight(self.0 / rhs.0)
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        iter.copied().sum()
    }
}

/// Rounds a rational to `decimals` places, halves away from zero.
pub fn round_half_up(value: &BigRational, decimals: u32) -> String {
    let scale = BigInt::from(10u32).pow(decimals);
    let scaled = value.abs() * BigRational::from_integer(scale.clone());
    let two = BigInt::from(2);
    // floor(x + 1/2) = floor((2n + d) / 2d)
    let rounded = (scaled.numer() * &two + scaled.denom()).div_floor(&(scaled.denom() * &two));
    let negative = value.is_negative() && !rounded.is_zero();
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = decimals as usize)
    }
}

/// `m` copies of `1/m`.
pub fn weights_for_tie(m: usize) -> Result<Vec<Weight>, ScoringError> {
    if !(1..=MAX_TIE).contains(&m) {
        return Err(ScoringError::TieSize(m));
    }
    Ok(vec![Weight::new(1, m as i64); m])
}

/// Per-node scores for one dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CssTable {
    /// Direct MSC assignments, keyed by node id. Every taxonomy node is present.
    pub leaf_scores: BTreeMap<String, Weight>,
    /// Own score plus all descendants.
    pub rolled_scores: BTreeMap<String, Weight>,
    pub total: Weight,
}

impl CssTable {
    pub fn leaf(&self, id: &str) -> Option<Weight> {
        self.leaf_scores.get(id).copied()
    }

    pub fn rolled(&self, id: &str) -> Option<Weight> {
        self.rolled_scores.get(id).copied()
    }

    /// Score outside `id`: the grand total minus the rolled score of `id`.
    pub fn complement(&self, id: &str) -> Option<Weight> {
        self.rolled(id).map(|r| self.total - r)
    }

    /// `rolled(part) / rolled(whole)`, `None` for unknown ids or a zero whole.
    pub fn share(&self, part: &str, whole: &str) -> Option<Weight> {
        let whole = self.rolled(whole).filter(|w| !w.is_zero())?;
        Some(self.rolled(part)? / whole)
    }
}

/// Scores every taxonomy node. Item order does not affect the result.
pub fn compute_css(dataset: &Dataset) -> CssTable {
    let taxonomy = dataset.taxonomy();
    let mut leaf: BTreeMap<String, Weight> = taxonomy.nodes().iter().map(|n| (n.id.clone(), Weight::ZERO)).collect();
    for item in dataset.items() {
        let weights = weights_for_tie(item.tie_size()).expect("dataset enforces tie size");
        for (group, w) in item.msc_groups.iter().zip(weights) {
            *leaf.get_mut(group).expect("dataset enforces known groups") += w;
        }
    }

    let mut rolled = leaf.clone();
    for node in taxonomy.nodes() {
        let own = leaf[&node.id];
        if own.is_zero() {
            continue;
        }
        let mut parent = node.parent.as_deref();
        while let Some(p) = parent {
            *rolled.get_mut(p).expect("taxonomy parents exist") += own;
            parent = taxonomy.node(p).ok().and_then(|n| n.parent.as_deref());
        }
    }

    let total = leaf.values().sum();
    CssTable {
        leaf_scores: leaf,
        rolled_scores: rolled,
        total,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CssRow {
    pub id: String,
    pub display_name: String,
    pub leaf: Weight,
    pub rolled: Weight,
    /// `10.33 (31/3)`
    pub display: String,
}

/// Rows sorted by rolled score descending, then id ascending.
pub fn render_css(table: &CssTable, taxonomy: &Taxonomy, decimals: u32) -> Vec<CssRow> {
    let mut rows: Vec<CssRow> = taxonomy
        .nodes()
        .iter()
        .map(|n| {
            let rolled = table.rolled(&n.id).unwrap_or_default();
            CssRow {
                id: n.id.clone(),
                display_name: n.display_name.clone(),
                leaf: table.leaf(&n.id).unwrap_or_default(),
                rolled,
                display: format_score(rolled, decimals),
            }
        })
        .collect();
    rows.sort_by(|a, b| b.rolled.cmp(&a.rolled).then_with(|| a.id.cmp(&b.id)));
    rows
}

pub fn format_score(w: Weight, decimals: u32) -> String {
    format!("{} ({w})", w.to_decimal(decimals))
}

/// Percentage `100 * share`, rounded half up.
pub fn format_percent(share: Weight, decimals: u32) -> String {
    format!("{}%", (share * Weight::from_integer(100)).to_decimal(decimals))
}

/// Percentage computed from the two scores as displayed, each already rounded
/// to `decimals`. This is how hand-computed tables derive a share from the
/// printed values, and differs from [`format_percent`] on the exact ratio.
pub fn format_displayed_percent(part: Weight, whole: Weight, decimals: u32) -> Option<String> {
    let parse = |w: Weight| -> BigRational {
        let s = w.to_decimal(decimals);
        let digits: String = s.chars().filter(|c| *c != '.').collect();
        BigRational::new(
            digits.parse().expect("decimal digits"),
            BigInt::from(10u32).pow(decimals),
        )
    };
    let whole = parse(whole);
    if whole.is_zero() {
        return None;
    }
    let pct = parse(part) / whole * BigRational::from_integer(100.into());
    Some(format!("{}%", round_half_up(&pct, decimals)))
}

/// One section's contribution to a node's rolled score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionShare {
    pub section: String,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeBreakdown {
    pub id: String,
    pub parts: Vec<SectionShare>,
    pub total: Weight,
}

impl NodeBreakdown {
    /// `Esk = 2 (§1.1) + 1/4 (§1.2) + 1/2 (§1.3) = 11/4 [2.75]`
    pub fn render(&self, decimals: u32) -> String {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("{} ({})", p.weight, p.section))
            .collect();
        format!(
            "{} = {} = {} [{}]",
            self.id,
            parts.join(" + "),
            self.total,
            self.total.to_decimal(decimals)
        )
    }
}

/// Rolled scores split by the items' section annotation, for every node with a
/// nonzero rolled score. Sections keep first-appearance order; items with no
/// section fall under `-`.
pub fn section_breakdown(dataset: &Dataset) -> Vec<NodeBreakdown> {
    let taxonomy = dataset.taxonomy();
    let mut per_node: BTreeMap<&str, Vec<SectionShare>> = BTreeMap::new();
    for item in dataset.items() {
        let section = item.table1_section.as_deref().unwrap_or("-");
        let w = Weight::new(1, item.tie_size() as i64);
        for group in &item.msc_groups {
            let mut cur = taxonomy.node(group).ok();
            while let Some(node) = cur {
                let parts = per_node.entry(&node.id).or_default();
                match parts.iter_mut().find(|p| p.section == section) {
                    Some(p) => p.weight += w,
                    None => parts.push(SectionShare {
                        section: section.to_string(),
                        weight: w,
                    }),
                }
                cur = node.parent.as_deref().and_then(|p| taxonomy.node(p).ok());
            }
        }
    }
    taxonomy
        .nodes()
        .iter()
        .filter_map(|n| {
            let parts = per_node.remove(n.id.as_str())?;
            Some(NodeBreakdown {
                id: n.id.clone(),
                total: parts.iter().map(|p| p.weight).sum(),
                parts,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    #[test]
    fn tie_weights() {
        assert_eq!(weights_for_tie(1).unwrap(), [Weight::ONE]);
        assert_eq!(weights_for_tie(3).unwrap(), [Weight::new(1, 3); 3]);
        assert_eq!(weights_for_tie(4).unwrap(), [Weight::new(1, 4); 4]);
        assert_eq!(weights_for_tie(0), Err(ScoringError::TieSize(0)));
        assert_eq!(weights_for_tie(5), Err(ScoringError::TieSize(5)));
    }

    #[test]
    fn rounding_half_up() {
        let r = |n, d, places| Weight::new(n, d).to_decimal(places);
        assert_eq!(r(31, 3, 2), "10.33");
        assert_eq!(r(11, 6, 2), "1.83");
        assert_eq!(r(43, 6, 2), "7.17");
        assert_eq!(r(1, 8, 2), "0.13");
        assert_eq!(r(-1, 8, 2), "-0.13");
        assert_eq!(r(0, 1, 2), "0.00");
        assert_eq!(r(35, 2, 0), "18");
        assert_eq!(r(-1, 1000, 2), "0.00");
    }

    #[test]
    fn fixture_rolled_scores() {
        let css = compute_css(&fixture::dataset());
        let r = |id| css.rolled(id).unwrap();
        assert_eq!(r("FORM"), Weight::new(31, 3));
        assert_eq!(r("AN"), Weight::new(35, 2));
        assert_eq!(r("MP"), Weight::new(43, 6));
        assert_eq!(r("Esk"), Weight::new(11, 4));
        assert_eq!(css.complement("AN"), Some(Weight::new(11, 2)));
        assert_eq!(css.total, Weight::from_integer(23));
        assert_eq!(r("WORLD"), css.total);
    }

    #[test]
    fn empty_and_two_way_tie() {
        let t = fixture::taxonomy();
        let d = Dataset::from_tsv(t.clone(), "").unwrap();
        let css = compute_css(&d);
        assert!(css.rolled_scores.values().all(Weight::is_zero));
        assert_eq!(css.total, Weight::ZERO);

        let d = Dataset::from_tsv(
            t,
            "id\tmeaning\tmsc_groups\ttable1_section\tevidence\nx\tear\tEsk;Turkic\t\t\n",
        )
        .unwrap();
        let css = compute_css(&d);
        assert_eq!(css.leaf("Esk"), Some(Weight::new(1, 2)));
        assert_eq!(css.leaf("Turkic"), Some(Weight::new(1, 2)));
    }

    #[test]
    fn render_rows() {
        let d = fixture::dataset();
        let rows = render_css(&compute_css(&d), d.taxonomy(), 2);
        let find = |id: &str| rows.iter().find(|r| r.id == id).unwrap().display.clone();
        assert_eq!(find("FORM"), "10.33 (31/3)");
        assert_eq!(find("W.MP"), "1.83 (11/6)");
        assert_eq!(find("SHWNG"), "0.00 (0)");
        assert_eq!(rows[0].id, "WORLD");
        assert_eq!(rows[1].id, "AN");
        // Equal rolled scores fall back to id order.
        let quarter: Vec<_> = rows
            .iter()
            .filter(|r| r.rolled == Weight::new(1, 4))
            .map(|r| r.id.as_str())
            .collect();
        assert_eq!(quarter, ["MNG", "Macro-Ge", "Macro-Panoan", "Nahali", "TbB"]);
    }

    #[test]
    fn percent_exact_and_displayed() {
        let css = compute_css(&fixture::dataset());
        let share = css.share("FORM", "AN").unwrap();
        assert_eq!(share, Weight::new(62, 105));
        assert_eq!(format_percent(share, 2), "59.05%");
        let displayed = format_displayed_percent(css.rolled("FORM").unwrap(), css.rolled("AN").unwrap(), 2);
        assert_eq!(displayed.as_deref(), Some("59.03%"));
    }

    #[test]
    fn sections_reproduce_headers() {
        let b = section_breakdown(&fixture::dataset());
        let get = |id: &str| b.iter().find(|n| n.id == id).unwrap();
        assert_eq!(
            get("Esk").render(2),
            "Esk = 2 (§1.1) + 1/4 (§1.2) + 1/2 (§1.3) = 11/4 [2.75]"
        );
        assert_eq!(
            get("FORM").render(2),
            "FORM = 1/4 (§1.2) + 9 (§2.1) + 1/2 (§2.2) + 1/3 (§2.3) + 1/4 (§2.4) = 31/3 [10.33]"
        );
        assert_eq!(
            get("W.MP").render(2),
            "W.MP = 1/2 (§2.2) + 1/3 (§2.3) + 1 (§3) = 11/6 [1.83]"
        );
        assert_eq!(get("OC").render(2), "OC = 4 (§4.1) + 1 (§4.2) = 5 [5.00]");
        assert!(b.iter().all(|n| n.id != "SHWNG"));
    }
}
