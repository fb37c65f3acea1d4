//! Builds a small taxonomy and dataset in memory and runs every test on it.

use csa::stats::verdict;
use csa::{chi_square_split, compute_css, permutation_test, Dataset, PermutationConfig, Taxonomy};

const TAXONOMY: &str = "\
id\tparent\tdisplay_name\tlanguage_count
FAM\t\tFamily\t40
NORTH\tFAM\tNorthern\t10
SOUTH\tFAM\tSouthern\t30
S1\tSOUTH\tCoastal\t
S2\tSOUTH\tHighland\t
OUT\t\tOutgroup\t
";

const ITEMS: &str = "\
id\tmeaning\tmsc_groups\ttable1_section\tevidence
i1\tblood\tNORTH\tA\t
i2\tbone\tNORTH\tA\t
i3\tear\tNORTH;S1\tA\t
i4\teye\tNORTH\tA\t
i5\thand\tS2\tB\t
i6\tnose\tNORTH;S1;S2\tB\t
i7\ttooth\tNORTH\tB\t
i8\theart\tOUT\tC\t
";

fn main() -> csa::Result<()> {
    // Two roots are rejected; wrap them under one.
    let taxonomy = match Taxonomy::from_tsv(TAXONOMY) {
        Ok(t) => t,
        Err(e) => {
            println!("rejected: {e}");
            let fixed = TAXONOMY
                .replace("FAM\t\tFamily", "FAM\tROOT\tFamily")
                .replace("OUT\t\t", "OUT\tROOT\t");
            Taxonomy::from_tsv(&format!("{fixed}ROOT\t\tAll\t\n"))?
        }
    };
    let dataset = Dataset::from_tsv(taxonomy, ITEMS)?;
    let report = dataset.validate();
    println!("{} items, {} meanings uncovered", report.items, report.uncovered.len());

    let css = compute_css(&dataset);
    for id in ["NORTH", "SOUTH", "S1", "S2", "FAM", "OUT", "ROOT"] {
        println!("{id:<6} {}", css.rolled(id).unwrap_or_default());
    }

    let r = chi_square_split(&css, dataset.taxonomy(), "NORTH", "FAM")?;
    println!(
        "chi2 {:.4}, p {:.4}: {}",
        r.statistic,
        r.p_value,
        verdict(r.statistic).describe()
    );

    let p = permutation_test(&dataset, "NORTH", "FAM", PermutationConfig::new(20_000, 1))?;
    println!("permutation p_hat {:.4} [{:.4}, {:.4}]", p.p_hat, p.ci95.0, p.ci95.1);
    Ok(())
}
