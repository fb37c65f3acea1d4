//! Ranks candidate forms for BELLY against the Eskimo-Aleut form.

use csa::similarity::{parse_candidates, PhoneticTable};

const CANDIDATES: &str = include_str!("../fixtures/candidates_belly.tsv");

fn main() -> csa::Result<()> {
    let table = PhoneticTable::default();
    let query = "naq";
    println!("query {query} -> {:?}", table.tokenize(query)?.tokens);

    let candidates = parse_candidates(CANDIDATES)?;
    for r in table.rank_candidates(query, &candidates)? {
        println!(
            "{:>2}. {:<8} {:<6} {:<6} {:.1}",
            r.rank, r.form.original, r.gloss, r.group, r.distance
        );
    }

    for (a, b) in [("k'ik'", "qiq"), ("tʃi", "si"), ("maː", "ma")] {
        let d = table.distance(&table.tokenize(a)?, &table.tokenize(b)?);
        println!("d({a}, {b}) = {d}");
    }
    Ok(())
}
