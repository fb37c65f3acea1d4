//! Monte Carlo null for FORM within Austronesian. Pass an iteration count as
//! the first argument (default 100000).

use std::time::Instant;

use csa::{fixture, permutation_test, PermutationConfig};

fn main() -> csa::Result<()> {
    let iterations = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let dataset = fixture::dataset();

    let start = Instant::now();
    let r = permutation_test(&dataset, "FORM", "AN", PermutationConfig::new(iterations, 42))?;
    let elapsed = start.elapsed();

    let cells: Vec<String> = r.cells.iter().map(|(id, n)| format!("{id}:{n}")).collect();
    println!("cells {} (draw total {})", cells.join(" "), r.draw_total);
    println!(
        "{} participating items holding {}",
        r.participating_items, r.universe_score
    );
    println!("observed FORM score {}", r.observed);
    println!(
        "null mean {:.4} +/- {:.4} (expected {} = {:.4})",
        r.null_mean,
        r.null_mean_std_error(),
        r.null_mean_expected,
        r.null_mean_expected.to_f64()
    );
    println!("exceedances {} of {}", r.exceed_count, r.iterations);
    println!(
        "p_hat {:.2e}, 95% CI [{:.2e}, {:.2e}], add-one {:.2e}",
        r.p_hat, r.ci95.0, r.ci95.1, r.p_add_one
    );
    println!("{elapsed:.2?}");

    let single = permutation_test(
        &dataset,
        "FORM",
        "AN",
        PermutationConfig::new(2_000, 42).with_workers(1),
    )?;
    let many = permutation_test(
        &dataset,
        "FORM",
        "AN",
        PermutationConfig::new(2_000, 42).with_workers(4),
    )?;
    println!("1 vs 4 workers identical: {}", single == many);
    Ok(())
}
