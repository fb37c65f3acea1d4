//! Scores the bundled Mayan dataset and prints the rolled table with the
//! per-section arithmetic behind each total.

use csa::scoring::{format_displayed_percent, format_percent, render_css, section_breakdown};
use csa::{compute_css, fixture};

fn main() {
    let dataset = fixture::dataset();
    let css = compute_css(&dataset);

    println!("{:<14} {:>16}", "group", "rolled");
    for row in render_css(&css, dataset.taxonomy(), 2) {
        if !row.rolled.is_zero() {
            println!("{:<14} {:>16}", row.id, row.display);
        }
    }

    println!();
    for b in section_breakdown(&dataset) {
        println!("{}", b.render(2));
    }

    let form = css.rolled("FORM").unwrap();
    let an = css.rolled("AN").unwrap();
    println!();
    println!("FORM share of AN, exact:     {}", format_percent(form / an, 2));
    println!(
        "FORM share of AN, displayed: {}",
        format_displayed_percent(form, an, 2).unwrap()
    );
}
