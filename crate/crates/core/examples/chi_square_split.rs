//! Chi-square of FORM against the rest of Austronesian, then the same
//! construction over all five counted subgroups.

use num_traits::ToPrimitive;

use csa::stats::verdict;
use csa::{chi_square_cells, chi_square_split, compute_css, fixture};

fn main() -> csa::Result<()> {
    let dataset = fixture::dataset();
    let taxonomy = dataset.taxonomy();
    let css = compute_css(&dataset);

    let r = chi_square_split(&css, taxonomy, "FORM", "AN")?;
    println!("O_FORM = {}  O_rest = {}", r.observed_focus, r.observed_rest);
    println!("E_FORM = {}  E_rest = {}", r.expected_focus, r.expected_rest);
    println!(
        "chi2 = {} = {:.4}  (df {}, p = {:.3e})",
        r.statistic_exact, r.statistic, r.df, r.p_value
    );
    println!("{}", verdict(r.statistic).describe());

    let cells = taxonomy.counted_cells("AN")?;
    let ids: Vec<&str> = cells.iter().map(|n| n.id.as_str()).collect();
    let m = chi_square_cells(&css, taxonomy, &ids, "AN")?;
    println!();
    println!("{:<8} {:>4} {:>8} {:>10} {:>12}", "cell", "n", "O", "E", "contrib");
    for c in &m.cells {
        let e = c.expected.to_f64().unwrap_or(f64::NAN);
        println!(
            "{:<8} {:>4} {:>8} {:>10.4} {:>12.4}",
            c.id,
            c.language_count,
            c.observed.to_string(),
            e,
            c.contribution
        );
    }
    println!("total {:.4} on {} df, p = {:.3e}", m.statistic, m.df, m.p_value);
    Ok(())
}
