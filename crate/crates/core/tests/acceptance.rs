//! Acceptance suite for the bundled fixture and the statistical routines.
//!
//! Prints one PASS/FAIL line per criterion and exits nonzero if any fails.
//! Reference values come from oracles in this file, never from the library.

use std::collections::{BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use csa::scoring::format_displayed_percent;
use csa::similarity::PhoneticTable;
use csa::{
    chi_square_cells, chi_square_sf, chi_square_split, compute_css, fixture, permutation_test, weights_for_tie,
    Dataset, PermutationConfig, PhonemeString, Taxonomy, Weight,
};

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            name: "fixture scores",
            budget: Duration::from_secs(1),
            run: fixture_scores,
        },
        Criterion {
            name: "FORM share of AN",
            budget: Duration::from_secs(1),
            run: form_share,
        },
        Criterion {
            name: "chi-square split",
            budget: Duration::from_secs(1),
            run: chi_square_fidelity,
        },
        Criterion {
            name: "chi-square tail",
            budget: Duration::from_secs(1),
            run: tail_accuracy,
        },
        Criterion {
            name: "permutation test",
            budget: Duration::from_secs(10),
            run: permutation,
        },
        Criterion {
            name: "property suites",
            budget: Duration::from_secs(30),
            run: properties,
        },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(panic_message(&p)))
            .and_then(|detail| {
                let elapsed = start.elapsed();
                if elapsed > c.budget {
                    Err(format!("{detail}; took {elapsed:.2?}, budget {:?}", c.budget))
                } else {
                    Ok(detail)
                }
            });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {:<18} {detail} [{elapsed:.2?}]", i + 1, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {:<18} {why} [{elapsed:.2?}]", i + 1, c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panicked".into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture_scores() -> Outcome {
    let dataset = fixture::dataset();
    let css = compute_css(&dataset);
    let expected = [
        ("FORM", 31, 3),
        ("W.MP", 11, 6),
        ("C.MP", 1, 3),
        ("SHWNG", 0, 1),
        ("OC", 5, 1),
        ("AN", 35, 2),
        ("Esk", 11, 4),
        ("N.W.Cauc", 1, 1),
        ("Turkic", 1, 2),
        ("MNG", 1, 4),
        ("Nahali", 1, 4),
        ("TbB", 1, 4),
        ("Macro-Panoan", 1, 4),
        ("Macro-Ge", 1, 4),
    ];
    for (id, n, d) in expected {
        let got = css.rolled(id).ok_or_else(|| format!("{id} missing"))?;
        ensure(got == Weight::new(n, d), || {
            format!("{id} = {got}, expected {}", Weight::new(n, d))
        })?;
    }
    ensure(css.total == Weight::from_integer(23), || format!("total {}", css.total))?;
    Ok(format!("{} groups exact, total {}", expected.len(), css.total))
}

fn form_share() -> Outcome {
    let css = compute_css(&fixture::dataset());
    let (form, an) = (css.rolled("FORM").unwrap(), css.rolled("AN").unwrap());
    let shown = format_displayed_percent(form, an, 2).ok_or("AN is zero")?;
    ensure(shown == "59.03%", || format!("rendered {shown}, expected 59.03%"))?;
    Ok(format!("{} / {} = {shown}", form.to_decimal(2), an.to_decimal(2)))
}

/// Re-reads the fixture files and evaluates the split statistic in plain
/// floating point, sharing no code with the library.
fn brute_force_chi_square(focus: &str, universe: &str) -> f64 {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
    let lines = |name: &str| -> Vec<Vec<String>> {
        std::fs::read_to_string(format!("{dir}{name}"))
            .unwrap()
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split('\t').map(|f| f.trim().to_string()).collect())
            .collect()
    };
    let mut parent: HashMap<String, String> = HashMap::new();
    let mut count: HashMap<String, f64> = HashMap::new();
    for row in lines("taxonomy.tsv") {
        parent.insert(row[0].clone(), row[1].clone());
        if let Ok(n) = row[3].parse::<f64>() {
            count.insert(row[0].clone(), n);
        }
    }
    let under = |g: &str, top: &str| {
        let mut g = g.to_string();
        loop {
            if g == top {
                return true;
            }
            match parent.get(&g) {
                Some(p) if !p.is_empty() => g = p.clone(),
                _ => return false,
            }
        }
    };
    let (mut o_x, mut o_y) = (0.0, 0.0);
    for row in lines("items.tsv") {
        let groups: Vec<&str> = row[2].split(';').map(str::trim).collect();
        let w = 1.0 / groups.len() as f64;
        for g in groups {
            if under(g, focus) {
                o_x += w;
            }
            if under(g, universe) {
                o_y += w;
            }
        }
    }
    let (n_x, n_y) = (count[focus], count[universe]);
    let e_x = o_y * n_x / n_y;
    let e_rest = o_y * (n_y - n_x) / n_y;
    let o_rest = o_y - o_x;
    (o_x - e_x).powi(2) / e_x + (o_rest - e_rest).powi(2) / e_rest
}

fn chi_square_fidelity() -> Outcome {
    let dataset = fixture::dataset();
    let r = chi_square_split(&compute_css(&dataset), dataset.taxonomy(), "FORM", "AN").map_err(|e| e.to_string())?;
    let oracle = brute_force_chi_square("FORM", "AN");
    let rel = (r.statistic - oracle).abs() / oracle;
    ensure((r.focus_count, r.universe_count) == (5, 82), || {
        format!("counts {} / {}", r.focus_count, r.universe_count)
    })?;
    ensure(rel < 1e-9, || {
        format!("{} vs oracle {oracle}, rel {rel:e}", r.statistic)
    })?;
    ensure(r.statistic > 10.828, || {
        format!("{} does not exceed 10.828", r.statistic)
    })?;
    // The rounded reference value 85.63 comes from using 10.33 for 31/3.
    ensure((r.statistic - 85.63).abs() < 0.1, || {
        format!("{} far from 85.63", r.statistic)
    })?;
    Ok(format!(
        "{:.4} (oracle {oracle:.4}, rel {rel:.1e}) > 10.828, p = {:.2e}",
        r.statistic, r.p_value
    ))
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Upper tail of the chi-square density, integrated numerically.
fn tail_oracle(x: f64, df: u32) -> f64 {
    let k = df as f64 / 2.0;
    let gamma_k = match df {
        1 => std::f64::consts::PI.sqrt(),
        2 | 4 => 1.0,
        _ => unreachable!(),
    };
    let norm = 2f64.powf(k) * gamma_k;
    let pdf = move |t: f64| t.powf(k - 1.0) * (-t / 2.0).exp() / norm;
    // The density is below 1e-40 beyond x + 200 for these df.
    (0..20)
        .map(|i| x + 10.0 * i as f64)
        .map(|a| simpson(&pdf, a, a + 10.0, 1e-14))
        .sum()
}

fn tail_accuracy() -> Outcome {
    let mut worst: f64 = 0.0;
    for x in [0.5, 1.0, 3.841, 6.635, 10.828, 50.0, 100.0] {
        for df in [1, 2, 4] {
            let got = chi_square_sf(x, df).map_err(|e| e.to_string())?;
            let want = tail_oracle(x, df);
            let err = (got - want).abs();
            ensure(err < 1e-6, || format!("sf({x}, {df}) = {got}, oracle {want}"))?;
            worst = worst.max(err);
        }
    }
    let p = chi_square_sf(10.828, 1).map_err(|e| e.to_string())?;
    ensure((p - 0.001).abs() <= 1e-4, || format!("sf(10.828, 1) = {p}"))?;
    Ok(format!(
        "21 grid points, max abs error {worst:.1e}; sf(10.828, 1) = {p:.6}"
    ))
}

fn permutation() -> Outcome {
    let dataset = fixture::dataset();
    let config = PermutationConfig::new(100_000, 42);
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get()).max(2);
    let one = permutation_test(&dataset, "FORM", "AN", config.with_workers(1)).map_err(|e| e.to_string())?;
    let many = permutation_test(&dataset, "FORM", "AN", config.with_workers(workers)).map_err(|e| e.to_string())?;
    ensure(one == many, || format!("1 and {workers} workers disagree"))?;
    ensure(one.null_mean.to_bits() == many.null_mean.to_bits(), || {
        "null mean bits differ".into()
    })?;

    ensure(one.p_hat < 0.001, || format!("p_hat {}", one.p_hat))?;
    let expected = 17.5 * 5.0 / 82.0;
    let se = one.null_mean_std_error();
    let z = (one.null_mean - expected) / se;
    ensure(z.abs() < 4.0, || {
        format!("null mean {} is {z:.1} SE from {expected}", one.null_mean)
    })?;
    Ok(format!(
        "p_hat {} (CI {:.1e}..{:.1e}), null mean {:.4} vs {expected:.4} ({z:+.2} SE), 1 = {workers} workers",
        one.p_hat, one.ci95.0, one.ci95.1, one.null_mean
    ))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn run_property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

const ITEM_HEADER: &str = "id\tmeaning\tmsc_groups\ttable1_section\tevidence\n";

/// Universe `Y` holding counted cells `C0..` with the given counts.
fn flat_taxonomy(counts: &[u64]) -> Taxonomy {
    let mut tsv = format!(
        "id\tparent\tdisplay_name\tlanguage_count\nY\t\tuniverse\t{}\n",
        counts.iter().sum::<u64>()
    );
    for (i, n) in counts.iter().enumerate() {
        tsv.push_str(&format!("C{i}\tY\tcell {i}\t{n}\n"));
    }
    Taxonomy::from_tsv(&tsv).unwrap()
}

fn items_tsv(groups: &[Vec<usize>]) -> String {
    let mut tsv = ITEM_HEADER.to_string();
    for (i, g) in groups.iter().enumerate() {
        let ids: Vec<String> = g.iter().map(|c| format!("C{c}")).collect();
        tsv.push_str(&format!("i{i}\tblood\t{}\t\t\n", ids.join(";")));
    }
    tsv
}

fn random_taxonomy() -> impl Strategy<Value = Taxonomy> {
    prop::collection::vec((any::<prop::sample::Index>(), prop::option::of(0u64..200)), 0..30).prop_map(|shape| {
        let mut tsv = "id\tparent\tdisplay_name\tlanguage_count\nn0\t\troot\t\n".to_string();
        for (i, (parent, count)) in shape.iter().enumerate() {
            let count = count.map(|c| c.to_string()).unwrap_or_default();
            tsv.push_str(&format!(
                "n{}\tn{}\tgroup {}\t{count}\n",
                i + 1,
                parent.index(i + 1),
                i + 1
            ));
        }
        Taxonomy::from_tsv(&tsv).unwrap()
    })
}

fn properties() -> Outcome {
    for m in 1..=4 {
        let sum: Weight = weights_for_tie(m).unwrap().into_iter().sum();
        ensure(sum == Weight::ONE, || format!("tie {m} sums to {sum}"))?;
    }

    let base = fixture::dataset();
    let base_css = compute_css(&base);
    run_property(
        "permutation invariance",
        200,
        Just(base.items().to_vec()).prop_shuffle(),
        |items| {
            let shuffled = Dataset::new(base.taxonomy().clone(), items).unwrap();
            prop_assert_eq!(compute_css(&shuffled), base_css.clone());
            Ok(())
        },
    )?;

    run_property(
        "zero on proportional data",
        200,
        (prop::collection::vec(1u64..20, 2..6), 1usize..4),
        |(counts, k)| {
            let groups: Vec<Vec<usize>> = counts
                .iter()
                .enumerate()
                .flat_map(|(c, &n)| vec![vec![c]; k * n as usize])
                .collect();
            let d = Dataset::from_tsv(flat_taxonomy(&counts), &items_tsv(&groups)).unwrap();
            let css = compute_css(&d);
            let split = chi_square_split(&css, d.taxonomy(), "C0", "Y").unwrap();
            prop_assert_eq!(split.statistic, 0.0);
            let ids: Vec<String> = (0..counts.len()).map(|c| format!("C{c}")).collect();
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            let cells = chi_square_cells(&css, d.taxonomy(), &ids, "Y").unwrap();
            prop_assert_eq!(cells.statistic, 0.0);
            Ok(())
        },
    )?;

    let pair = prop::sample::select(vec![vec![0], vec![1], vec![0, 1], vec![1, 0]]);
    run_property(
        "two cells equal the split",
        300,
        (1u64..100, 1u64..100, prop::collection::vec(pair, 1..40)),
        |(a, b, groups)| {
            let d = Dataset::from_tsv(flat_taxonomy(&[a, b]), &items_tsv(&groups)).unwrap();
            let css = compute_css(&d);
            let split = chi_square_split(&css, d.taxonomy(), "C0", "Y").unwrap();
            let cells = chi_square_cells(&css, d.taxonomy(), &["C0", "C1"], "Y").unwrap();
            let scale = split.statistic.abs().max(f64::MIN_POSITIVE);
            prop_assert!((split.statistic - cells.statistic).abs() / scale <= 1e-12);
            prop_assert_eq!(split.statistic_exact, cells.statistic_exact);
            Ok(())
        },
    )?;

    let table = PhoneticTable::default();
    let token = prop::sample::select(vec![
        "p", "b", "t", "d", "k", "q", "ʔ", "m", "n", "ŋ", "s", "ʃ", "tʃ", "ts", "l", "r", "w", "j", "a", "e", "i", "o",
        "u", "ə", "aː", "k'", "tʰ", "x",
    ]);
    let word = prop::collection::vec(token, 0..6).prop_map(PhonemeString::from_tokens);
    run_property(
        "metric axioms",
        1000,
        (word.clone(), word.clone(), word),
        |(a, b, c)| {
            let (ab, ba, bc, ac) = (
                table.distance(&a, &b),
                table.distance(&b, &a),
                table.distance(&b, &c),
                table.distance(&a, &c),
            );
            prop_assert_eq!(table.distance(&a, &a), 0.0);
            prop_assert_eq!(ab == 0.0, a.tokens == b.tokens);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, ba);
            prop_assert!(ac <= ab + bc + 1e-12);
            Ok(())
        },
    )?;

    let fixture_roundtrip = Dataset::from_tsv(Taxonomy::from_tsv(&base.taxonomy().to_tsv()).unwrap(), &base.to_tsv());
    ensure(fixture_roundtrip.as_ref() == Ok(&base), || {
        "fixture does not round-trip".into()
    })?;
    let with_items = random_taxonomy().prop_flat_map(|t| {
        let ids: Vec<String> = t.nodes().iter().map(|n| n.id.clone()).collect();
        let item = prop::sample::subsequence(ids.clone(), 1..=ids.len().min(4)).prop_shuffle();
        (Just(t), prop::collection::vec(item, 0..20))
    });
    run_property("round trip", 300, with_items, |(t, groups)| {
        prop_assert_eq!(Taxonomy::from_tsv(&t.to_tsv()).unwrap(), t.clone());
        let mut tsv = ITEM_HEADER.to_string();
        for (i, g) in groups.iter().enumerate() {
            tsv.push_str(&format!("i{i}\tear\t{}\t§{}\tev {i}\n", g.join(";"), i % 3));
        }
        let d = Dataset::from_tsv(t, &tsv).unwrap();
        let again = Dataset::from_tsv(Taxonomy::from_tsv(&d.taxonomy().to_tsv()).unwrap(), &d.to_tsv()).unwrap();
        prop_assert_eq!(&again, &d);
        prop_assert_eq!(again.to_tsv(), d.to_tsv());
        Ok(())
    })?;

    let unique: BTreeSet<_> = base.items().iter().map(|i| i.id.as_str()).collect();
    ensure(unique.len() == base.items().len(), || "fixture ids not unique".into())?;
    Ok("tie sums, item order, proportional zero, two-cell split, 1000 metric triples, round trips".into())
}
