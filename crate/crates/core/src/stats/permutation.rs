use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::StatsError;
use crate::lexicon::Dataset;
use crate::scoring::{compute_css, Weight};

/// Every item share is a sum of `1/m` with `m <= 4`, so it is a whole number
/// of twelfths. Simulation runs on integer twelfths.
const UNIT: u64 = 12;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PermutationConfig {
    pub iterations: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool. Results do not
    /// depend on this value.
    pub workers: Option<usize>,
}

impl PermutationConfig {
    pub fn new(iterations: u64, seed: u64) -> Self {
        PermutationConfig {
            iterations,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationResult {
    pub focus: String,
    pub universe: String,
    pub iterations: u64,
    pub seed: u64,
    /// Subgroups items are reassigned to, with their language counts.
    pub cells: Vec<(String, u64)>,
    /// Denominator of the draw: the universe's language count, or the cell sum
    /// when the universe has none. Any excess over the cell sum is an
    /// unclassified remainder that absorbs draws without scoring.
    pub draw_total: u64,
    pub participating_items: usize,
    /// Total score the participating items hold inside the universe.
    pub universe_score: Weight,
    pub observed: Weight,
    pub exceed_count: u64,
    pub p_hat: f64,
    /// `(exceed + 1) / (iterations + 1)`.
    pub p_add_one: f64,
    /// Wilson score interval for `p_hat`.
    pub ci95: (f64, f64),
    /// `universe_score * n_focus / draw_total`.
    pub null_mean_expected: Weight,
    pub null_mean: f64,
    pub null_sd: f64,
}

impl PermutationResult {
    pub fn null_mean_std_error(&self) -> f64 {
        self.null_sd / (self.iterations as f64).sqrt()
    }
}

/// Monte Carlo test of the focus subgroup's score under count-proportional
/// placement.
///
/// Each item with a most similar cognate inside `universe` is a participant.
/// Its in-universe share moves as one block to a single counted subgroup,
/// drawn with probability `n_cell / draw_total`. The simulated focus score is
/// compared with the observed one using `>=`. Iteration `i` draws from a
/// ChaCha8 stream keyed by `(seed, i)`, so the result is the same for any
/// number of workers.
pub fn permutation_test(
    dataset: &Dataset,
    focus: &str,
    universe: &str,
    config: PermutationConfig,
) -> Result<PermutationResult, StatsError> {
    let taxonomy = dataset.taxonomy();
    let universe_node = taxonomy.node(universe)?;
    taxonomy.node(focus)?;
    if config.iterations == 0 {
        return Err(StatsError::ZeroIterations);
    }
    if focus == universe || !taxonomy.is_within(focus, universe)? {
        return Err(StatsError::NotStrictDescendant {
            focus: focus.into(),
            universe: universe.into(),
        });
    }
    let cells: Vec<(String, u64)> = taxonomy
        .counted_cells(universe)?
        .into_iter()
        .map(|n| (n.id.clone(), n.language_count.unwrap_or(0)))
        .collect();
    if cells.is_empty() {
        return Err(StatsError::NoCountedCells(universe.into()));
    }
    let Some(focus_pos) = cells.iter().position(|(id, _)| id == focus) else {
        return Err(StatsError::FocusNotACell {
            focus: focus.into(),
            universe: universe.into(),
            cells: cells.iter().map(|(id, _)| id.as_str()).collect::<Vec<_>>().join(", "),
        });
    };
    let cell_sum: u64 = cells.iter().map(|(_, n)| n).sum();
    let draw_total = universe_node.language_count.unwrap_or(cell_sum);
    if draw_total < cell_sum {
        return Err(StatsError::CountOrder {
            universe: universe.into(),
            universe_count: draw_total,
            part: "counted subgroups".into(),
            part_count: cell_sum,
        });
    }
    if draw_total == 0 {
        return Err(StatsError::NoCountedCells(universe.into()));
    }

    let inside = taxonomy.descendants(universe)?;
    let shares: Vec<u64> = dataset
        .items()
        .iter()
        .map(|item| {
            let hits = item.msc_groups.iter().filter(|g| inside.contains(g.as_str())).count() as u64;
            hits * (UNIT / item.tie_size() as u64)
        })
        .filter(|&s| s > 0)
        .collect();
    if shares.is_empty() {
        return Err(StatsError::NoParticipatingItems(universe.into()));
    }

    let observed = compute_css(dataset).rolled(focus).unwrap_or_default();
    let observed_units = weight_to_units(observed);
    let focus_start: u64 = cells[..focus_pos].iter().map(|(_, n)| n).sum();
    let focus_end = focus_start + cells[focus_pos].1;

    let simulate = |iteration: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(iteration);
        shares
            .iter()
            .filter(|_| (focus_start..focus_end).contains(&rng.random_range(0..draw_total)))
            .sum()
    };
    let fold = |acc: Tally, sim: u64| acc.add(sim, sim >= observed_units);

    let tally = match config.workers {
        Some(1) => (0..config.iterations).map(simulate).fold(Tally::default(), fold),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| StatsError::WorkerPool(e.to_string()))?
            .install(|| parallel_tally(config.iterations, &simulate, &fold)),
        None => parallel_tally(config.iterations, &simulate, &fold),
    };

    let iterations = config.iterations;
    let n = iterations as f64;
    let unit = UNIT as f64;
    let null_mean = tally.sum as f64 / n / unit;
    // Exact integer moments keep the reduction order-independent.
    let var_num = (tally.sum_sq as f64) * n - (tally.sum as f64).powi(2);
    let null_sd = if iterations > 1 {
        (var_num.max(0.0) / (n * (n - 1.0))).sqrt() / unit
    } else {
        0.0
    };
    let universe_score = Weight::new(shares.iter().sum::<u64>() as i64, UNIT as i64);
    let p_hat = tally.exceed as f64 / n;

    Ok(PermutationResult {
        focus: focus.into(),
        universe: universe.into(),
        iterations,
        seed: config.seed,
        null_mean_expected: universe_score * Weight::new(cells[focus_pos].1 as i64, draw_total as i64),
        cells,
        draw_total,
        participating_items: shares.len(),
        universe_score,
        observed,
        exceed_count: tally.exceed,
        p_hat,
        p_add_one: (tally.exceed + 1) as f64 / (n + 1.0),
        ci95: wilson_interval(tally.exceed, iterations),
        null_mean,
        null_sd,
    })
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    exceed: u64,
    sum: u128,
    sum_sq: u128,
}

impl Tally {
    fn add(self, sim: u64, exceeds: bool) -> Tally {
        Tally {
            exceed: self.exceed + u64::from(exceeds),
            sum: self.sum + u128::from(sim),
            sum_sq: self.sum_sq + u128::from(sim) * u128::from(sim),
        }
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            exceed: self.exceed + other.exceed,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }
}

fn parallel_tally<S, F>(iterations: u64, simulate: &S, fold: &F) -> Tally
where
    S: Fn(u64) -> u64 + Sync,
    F: Fn(Tally, u64) -> Tally + Sync,
{
    (0..iterations)
        .into_par_iter()
        .map(simulate)
        .fold(Tally::default, fold)
        .reduce(Tally::default, Tally::merge)
}

fn weight_to_units(w: Weight) -> u64 {
    // Scores are nonnegative with denominators dividing 12.
    let scaled = w * Weight::from_integer(UNIT as i64);
    debug_assert_eq!(scaled.denom(), 1);
    scaled.numer().max(0) as u64
}
