//! Upper-tail chi-square probabilities at the usual critical values.

use csa::chi_square_sf;
use csa::stats::CRITICAL_VALUES_DF1;

fn main() -> csa::Result<()> {
    for (alpha, crit) in CRITICAL_VALUES_DF1 {
        println!(
            "P(chi2_1 > {crit:>6}) = {:.6}  (table: {alpha})",
            chi_square_sf(crit, 1)?
        );
    }
    println!();
    for df in [1, 2, 4, 10] {
        let row: Vec<String> = [1.0, 5.0, 20.0, 85.69]
            .iter()
            .map(|&x| format!("{:.3e}", chi_square_sf(x, df).unwrap()))
            .collect();
        println!("df {df:>2}: {}", row.join("  "));
    }
    Ok(())
}
