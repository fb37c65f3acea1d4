use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::{chi_square_sf, StatsError};
use crate::scoring::{CssTable, Weight};
use crate::taxonomy::Taxonomy;

/// Upper critical values of χ² with one degree of freedom.
pub const CRITICAL_VALUES_DF1: [(f64, f64); 3] = [(0.05, 3.841), (0.01, 6.635), (0.001, 10.828)];

/// A focus subgroup against the rest of its universe, one degree of freedom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub focus: String,
    pub universe: String,
    pub focus_count: u64,
    pub universe_count: u64,
    pub observed_focus: Weight,
    pub observed_rest: Weight,
    #[serde(serialize_with = "fraction")]
    pub expected_focus: BigRational,
    #[serde(serialize_with = "fraction")]
    pub expected_rest: BigRational,
    #[serde(serialize_with = "fraction")]
    pub statistic_exact: BigRational,
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// Compares the focus's rolled score with its count-proportional share of the
/// universe score:
///
/// `E_X = O_Y n_X / N_Y`, `E_rest = O_Y (N_Y - n_X) / N_Y`,
/// `χ² = (O_X - E_X)² / E_X + (O_rest - E_rest)² / E_rest`.
///
/// The statistic is evaluated exactly and converted to `f64` once.
pub fn chi_square_split(
    css: &CssTable,
    taxonomy: &Taxonomy,
    focus: &str,
    universe: &str,
) -> Result<ChiSquareResult, StatsError> {
    let focus_node = taxonomy.node(focus)?;
    let universe_node = taxonomy.node(universe)?;
    if focus == universe || !taxonomy.is_within(focus, universe)? {
        return Err(StatsError::NotStrictDescendant {
            focus: focus.into(),
            universe: universe.into(),
        });
    }
    let n = focus_node
        .language_count
        .ok_or_else(|| StatsError::MissingLanguageCount(focus.into()))?;
    let total_n = universe_node
        .language_count
        .ok_or_else(|| StatsError::MissingLanguageCount(universe.into()))?;
    if total_n < n {
        return Err(StatsError::CountOrder {
            universe: universe.into(),
            universe_count: total_n,
            part: focus.into(),
            part_count: n,
        });
    }
    let observed_total = css.rolled(universe).unwrap_or_default();
    if observed_total.is_zero() {
        return Err(StatsError::ZeroUniverseScore(universe.into()));
    }
    let observed_focus = css.rolled(focus).unwrap_or_default();
    let observed_rest = observed_total - observed_focus;

    let o_total = observed_total.to_big();
    let expected_focus = &o_total * ratio(n, total_n);
    let expected_rest = &o_total * ratio(total_n - n, total_n);
    if expected_focus.is_zero() {
        return Err(StatsError::DegenerateExpectation { cell: focus.into() });
    }
    if expected_rest.is_zero() {
        return Err(StatsError::DegenerateExpectation {
            cell: format!("{universe} - {focus}"),
        });
    }
    let statistic_exact =
        cell_term(&observed_focus.to_big(), &expected_focus) + cell_term(&observed_rest.to_big(), &expected_rest);
    let statistic = to_f64(&statistic_exact);
    let df = 1;
    Ok(ChiSquareResult {
        focus: focus.into(),
        universe: universe.into(),
        focus_count: n,
        universe_count: total_n,
        observed_focus,
        observed_rest,
        expected_focus,
        expected_rest,
        statistic,
        p_value: chi_square_sf(statistic, df)?,
        statistic_exact,
        df,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellContribution {
    pub id: String,
    pub language_count: u64,
    pub observed: Weight,
    #[serde(serialize_with = "fraction")]
    pub expected: BigRational,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiCellResult {
    pub universe: String,
    /// Language count used as the denominator of every expectation.
    pub universe_count: u64,
    pub cells: Vec<CellContribution>,
    #[serde(serialize_with = "fraction")]
    pub statistic_exact: BigRational,
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// The same construction summed over several disjoint subgroups of `universe`,
/// with `df = cells - 1`.
///
/// Expectations use the universe's own language count when it has one and the
/// sum of cell counts otherwise. Cells must cover the universe's whole score.
pub fn chi_square_cells(
    css: &CssTable,
    taxonomy: &Taxonomy,
    cells: &[&str],
    universe: &str,
) -> Result<MultiCellResult, StatsError> {
    let universe_node = taxonomy.node(universe)?;
    if cells.len() < 2 {
        return Err(StatsError::TooFewCells(cells.len()));
    }
    let mut counts = Vec::with_capacity(cells.len());
    for (i, &cell) in cells.iter().enumerate() {
        let node = taxonomy.node(cell)?;
        if cell == universe || !taxonomy.is_within(cell, universe)? {
            return Err(StatsError::NotStrictDescendant {
                focus: cell.into(),
                universe: universe.into(),
            });
        }
        for &other in &cells[..i] {
            if taxonomy.is_within(cell, other)? || taxonomy.is_within(other, cell)? {
                return Err(StatsError::OverlappingCells(other.into(), cell.into()));
            }
        }
        counts.push(
            node.language_count
                .ok_or_else(|| StatsError::MissingLanguageCount(cell.into()))?,
        );
    }
    let cell_sum: u64 = counts.iter().sum();
    let total_n = universe_node.language_count.unwrap_or(cell_sum);
    if total_n < cell_sum {
        return Err(StatsError::CountOrder {
            universe: universe.into(),
            universe_count: total_n,
            part: cells.join("+"),
            part_count: cell_sum,
        });
    }

    let observed_total = css.rolled(universe).unwrap_or_default();
    if observed_total.is_zero() {
        return Err(StatsError::ZeroUniverseScore(universe.into()));
    }
    let observed: Vec<Weight> = cells.iter().map(|c| css.rolled(c).unwrap_or_default()).collect();
    let covered: Weight = observed.iter().sum();
    if covered != observed_total {
        return Err(StatsError::CellsDoNotCover {
            universe: universe.into(),
            uncovered: observed_total - covered,
        });
    }

    let o_total = observed_total.to_big();
    let mut statistic_exact = BigRational::zero();
    let mut out = Vec::with_capacity(cells.len());
    for ((&cell, &n), &o) in cells.iter().zip(&counts).zip(&observed) {
        let expected = &o_total * ratio(n, total_n);
        if expected.is_zero() {
            return Err(StatsError::DegenerateExpectation { cell: cell.into() });
        }
        let term = cell_term(&o.to_big(), &expected);
        out.push(CellContribution {
            id: cell.into(),
            language_count: n,
            observed: o,
            expected,
            contribution: to_f64(&term),
        });
        statistic_exact += term;
    }
    let statistic = to_f64(&statistic_exact);
    let df = cells.len() as u32 - 1;
    Ok(MultiCellResult {
        universe: universe.into(),
        universe_count: total_n,
        cells: out,
        statistic,
        p_value: chi_square_sf(statistic, df)?,
        statistic_exact,
        df,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    /// Smallest tabulated significance level the statistic clears, if any.
    pub level: Option<f64>,
    pub critical_value: Option<f64>,
}

impl Verdict {
    pub fn describe(&self) -> String {
        match self.level {
            Some(level) => format!("reject the null at P < {level}"),
            None => "fail to reject the null at P < 0.05".to_string(),
        }
    }
}

/// Compares a one-degree-of-freedom statistic against [`CRITICAL_VALUES_DF1`].
pub fn verdict(statistic: f64) -> Verdict {
    CRITICAL_VALUES_DF1
        .iter()
        .rev()
        .find(|(_, crit)| statistic > *crit)
        .map(|&(level, crit)| Verdict {
            level: Some(level),
            critical_value: Some(crit),
        })
        .unwrap_or(Verdict {
            level: None,
            critical_value: None,
        })
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn cell_term(observed: &BigRational, expected: &BigRational) -> BigRational {
    let diff = observed - expected;
    &diff * &diff / expected
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

fn fraction<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Dataset;
    use crate::scoring::compute_css;
    use crate::taxonomy::Taxonomy;
    use crate::{fixture, taxonomy};

    fn toy(counts: [u64; 3], items: &str) -> (CssTable, Taxonomy) {
        let t = Taxonomy::from_tsv(&format!(
            "{}\nY\t\tuniverse\t{}\nA\tY\ta\t{}\nB\tY\tb\t{}\n",
            taxonomy::HEADER.join("\t"),
            counts[0],
            counts[1],
            counts[2]
        ))
        .unwrap();
        let d = Dataset::from_tsv(
            t.clone(),
            &format!("id\tmeaning\tmsc_groups\ttable1_section\tevidence\n{items}"),
        )
        .unwrap();
        (compute_css(&d), t)
    }

    #[test]
    fn fixture_form_split() {
        let d = fixture::dataset();
        let r = chi_square_split(&compute_css(&d), d.taxonomy(), "FORM", "AN").unwrap();
        assert_eq!(r.observed_focus, Weight::new(31, 3));
        assert_eq!(r.observed_rest, Weight::new(43, 6));
        assert_eq!(r.expected_focus, BigRational::new(175.into(), 164.into()));
        assert_eq!(r.df, 1);
        assert!(r.statistic > 85.6 && r.statistic < 85.7, "{}", r.statistic);
        assert!(r.p_value < 1e-19);
    }

    #[test]
    fn proportional_is_exactly_zero() {
        let (css, t) = toy([82, 41, 41], "a\tear\tA\t\t\nb\tnose\tB\t\t\n");
        let r = chi_square_split(&css, &t, "A", "Y").unwrap();
        assert!(r.statistic_exact.is_zero());
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(verdict(r.statistic).level, None);
    }

    #[test]
    fn empty_focus_cell_still_tests() {
        let d = fixture::dataset();
        let r = chi_square_split(&compute_css(&d), d.taxonomy(), "SHWNG", "AN").unwrap();
        assert_eq!(r.observed_focus, Weight::ZERO);
        // O_X = 0, so χ² = E_X + E_X² / E_rest.
        let e = BigRational::new(35.into(), 82.into());
        let e_rest = BigRational::new(700.into(), 41.into());
        assert_eq!(r.expected_focus, e);
        assert_eq!(r.expected_rest, e_rest);
        assert_eq!(r.statistic_exact, &e + &e * &e / &e_rest);
        assert!(r.statistic > 0.0);
    }

    #[test]
    fn split_preconditions() {
        let d = fixture::dataset();
        let css = compute_css(&d);
        let t = d.taxonomy();
        assert!(matches!(
            chi_square_split(&css, t, "Esk", "AN"),
            Err(StatsError::NotStrictDescendant { .. })
        ));
        assert!(matches!(
            chi_square_split(&css, t, "AN", "AN"),
            Err(StatsError::NotStrictDescendant { .. })
        ));
        assert_eq!(
            chi_square_split(&css, t, "PHIL", "AN"),
            Err(StatsError::MissingLanguageCount("PHIL".into()))
        );
        let (css, t) = toy([10, 0, 10], "a\tear\tA\t\t\n");
        assert_eq!(
            chi_square_split(&css, &t, "A", "Y"),
            Err(StatsError::DegenerateExpectation { cell: "A".into() })
        );
        assert!(matches!(
            chi_square_split(&css, &t, "B", "Y"),
            Err(StatsError::DegenerateExpectation { .. })
        ));
        let (css, t) = toy([10, 5, 5], "");
        assert_eq!(
            chi_square_split(&css, &t, "A", "Y"),
            Err(StatsError::ZeroUniverseScore("Y".into()))
        );
    }

    #[test]
    fn five_cells_on_fixture() {
        let d = fixture::dataset();
        let css = compute_css(&d);
        let cells = ["FORM", "W.MP", "C.MP", "SHWNG", "OC"];
        let r = chi_square_cells(&css, d.taxonomy(), &cells, "AN").unwrap();
        assert_eq!(r.df, 4);
        assert_eq!(r.universe_count, 82);
        let form = &r.cells[0];
        assert!((form.contribution - 80.466_438_250_096_79).abs() < 1e-9);
        assert!((r.statistic - 85.688_856_527_393_11).abs() < 1e-9);
        let biggest = r
            .cells
            .iter()
            .max_by(|a, b| a.contribution.total_cmp(&b.contribution))
            .unwrap();
        assert_eq!(biggest.id, "FORM");

        assert!(matches!(
            chi_square_cells(&css, d.taxonomy(), &cells[..4], "AN"),
            Err(StatsError::CellsDoNotCover { .. })
        ));
        assert_eq!(
            chi_square_cells(&css, d.taxonomy(), &["FORM", "MP"], "AN"),
            Err(StatsError::MissingLanguageCount("MP".into()))
        );
        assert_eq!(
            chi_square_cells(&css, d.taxonomy(), &["FORM"], "AN"),
            Err(StatsError::TooFewCells(1))
        );
    }

    #[test]
    fn nested_cells_overlap() {
        let t = Taxonomy::from_tsv(&format!(
            "{}\nY\t\tuniverse\t10\nA\tY\ta\t5\nA1\tA\ta1\t3\nB\tY\tb\t5\n",
            taxonomy::HEADER.join("\t")
        ))
        .unwrap();
        let d = Dataset::from_tsv(
            t.clone(),
            "id\tmeaning\tmsc_groups\ttable1_section\tevidence\nx\tear\tA1\t\t\n",
        )
        .unwrap();
        assert_eq!(
            chi_square_cells(&compute_css(&d), &t, &["A", "A1"], "Y"),
            Err(StatsError::OverlappingCells("A".into(), "A1".into()))
        );
    }

    #[test]
    fn zero_count_cell_is_degenerate() {
        let (css, t) = toy([10, 0, 10], "a\tear\tB\t\t\n");
        assert_eq!(
            chi_square_cells(&css, &t, &["A", "B"], "Y"),
            Err(StatsError::DegenerateExpectation { cell: "A".into() })
        );
    }

    #[test]
    fn verdict_levels() {
        assert_eq!(verdict(85.6).level, Some(0.001));
        assert_eq!(verdict(7.0).level, Some(0.01));
        assert_eq!(verdict(4.0).level, Some(0.05));
        assert_eq!(verdict(3.0).level, None);
    }
}
