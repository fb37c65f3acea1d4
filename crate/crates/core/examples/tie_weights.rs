//! How a single item's weight is split across tied closest groups.

use csa::{weights_for_tie, Weight};

fn main() {
    for m in 1..=4 {
        let w = weights_for_tie(m).unwrap();
        let sum: Weight = w.iter().copied().sum();
        let shown: Vec<String> = w.iter().map(ToString::to_string).collect();
        println!("m = {m}: [{}] sums to {sum}", shown.join(", "));
    }
    match weights_for_tie(5) {
        Ok(_) => unreachable!(),
        Err(e) => println!("m = 5: {e}"),
    }

    // Exact arithmetic: three thirds are one, not 0.999...
    let third = Weight::new(1, 3);
    assert_eq!(third + third + third, Weight::ONE);
    println!("1/3 + 1/3 + 1/3 = {}", third + third + third);
}
