//! Synthetic application studies: cooperative matching of clustered key
//! points and sensor placement under volume-discounted costs.

mod correspondence;
mod kmeans;
mod sensor;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use correspondence::{
    build_correspondence, gen_correspondence, run_matching_experiment, CorrespondenceInstance, CorrespondenceParams,
    MatchingComparison, MatchingOutcome, PointPairs,
};
pub use sensor::{gen_sensor, run_sensor_experiment, SensorComparison, SensorInstance, SensorOutcome, SensorParams};

use crate::error::Result;

/// One `(seed, algorithm)` row of a comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub experiment: String,
    pub seed: u64,
    pub algorithm: String,
    /// `f` for matching (lower is better), `g` for sensors (higher is better).
    pub objective: f64,
    pub cost: f64,
    pub surrogate_cost: Option<f64>,
    pub accuracy: Option<f64>,
    pub set_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub mean_objective: f64,
    pub mean_cost: f64,
    pub mean_accuracy: Option<f64>,
}

/// Fraction of seeds on which `algorithm` is at least as good as `versus`
/// (within `1e-9` relative), and the mean objective difference
/// `versus - algorithm` signed so that positive favours `algorithm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinRate {
    pub algorithm: String,
    pub versus: String,
    pub rate: f64,
    pub mean_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub experiment: String,
    pub seeds: usize,
    pub maximize: bool,
    pub algorithms: Vec<AlgorithmSummary>,
    pub win_rates: Vec<WinRate>,
}

pub fn run_matching_seeds(
    base: &CorrespondenceParams,
    seeds: &[u64],
    epsilon: f64,
    workers: usize,
) -> Result<Vec<(u64, MatchingComparison)>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let params = CorrespondenceParams { seed, ..base.clone() };
            let inst = gen_correspondence(&params)?;
            Ok((seed, run_matching_experiment(&inst, epsilon, workers)?))
        })
        .collect()
}

pub fn run_sensor_seeds(
    base: &SensorParams,
    seeds: &[u64],
    epsilon: f64,
    workers: usize,
) -> Result<Vec<(u64, SensorComparison)>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let params = SensorParams { seed, ..base.clone() };
            let inst = gen_sensor(&params)?;
            Ok((seed, run_sensor_experiment(&inst, epsilon, workers)?))
        })
        .collect()
}

pub fn matching_rows(results: &[(u64, MatchingComparison)]) -> Vec<ComparisonRow> {
    let mut rows = Vec::with_capacity(3 * results.len());
    for (seed, cmp) in results {
        for (name, o) in [("pla", &cmp.pla), ("sga", &cmp.sga), ("modular", &cmp.modular)] {
            rows.push(ComparisonRow {
                experiment: "matching".into(),
                seed: *seed,
                algorithm: name.into(),
                objective: o.objective,
                cost: o.objective,
                surrogate_cost: None,
                accuracy: Some(o.accuracy),
                set_size: o.set.len(),
            });
        }
    }
    rows
}

pub fn sensor_rows(results: &[(u64, SensorComparison)]) -> Vec<ComparisonRow> {
    let mut rows = Vec::with_capacity(3 * results.len());
    for (seed, cmp) in results {
        for (name, o) in [("pla", &cmp.pla), ("sga", &cmp.sga), ("agnostic", &cmp.agnostic)] {
            rows.push(ComparisonRow {
                experiment: "sensor".into(),
                seed: *seed,
                algorithm: name.into(),
                objective: o.objective,
                cost: o.cost,
                surrogate_cost: Some(o.surrogate_cost),
                accuracy: None,
                set_size: o.set.len(),
            });
        }
    }
    rows
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Means per algorithm and pairwise win rates, algorithms in order of first
/// appearance.
pub fn summarize(experiment: &str, maximize: bool, rows: &[ComparisonRow]) -> ComparisonSummary {
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        if !names.contains(&r.algorithm) {
            names.push(r.algorithm.clone());
        }
    }
    let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let algorithms = names
        .iter()
        .map(|name| {
            let mine: Vec<&ComparisonRow> = rows.iter().filter(|r| &r.algorithm == name).collect();
            let acc: Vec<f64> = mine.iter().filter_map(|r| r.accuracy).collect();
            AlgorithmSummary {
                algorithm: name.clone(),
                mean_objective: mean(mine.iter().map(|r| r.objective)),
                mean_cost: mean(mine.iter().map(|r| r.cost)),
                mean_accuracy: (!acc.is_empty()).then(|| mean(acc.into_iter())),
            }
        })
        .collect();
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut win_rates = Vec::new();
    for a in &names {
        for b in &names {
            if a == b {
                continue;
            }
            let mut wins = 0usize;
            let mut gaps = Vec::new();
            for &seed in &seeds {
                let find = |name: &str| rows.iter().find(|r| r.seed == seed && r.algorithm == name);
                let (Some(ra), Some(rb)) = (find(a), find(b)) else { continue };
                let gap = sign * (ra.objective - rb.objective);
                if gap >= -1e-9 * ra.objective.abs().max(rb.objective.abs()) {
                    wins += 1;
                }
                gaps.push(gap);
            }
            win_rates.push(WinRate {
                algorithm: a.clone(),
                versus: b.clone(),
                rate: if gaps.is_empty() { f64::NAN } else { wins as f64 / gaps.len() as f64 },
                mean_gap: mean(gaps.into_iter()),
            });
        }
    }
    ComparisonSummary {
        experiment: experiment.into(),
        seeds: seeds.len(),
        maximize,
        algorithms,
        win_rates,
    }
}

impl ComparisonSummary {
    pub fn algorithm(&self, name: &str) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|a| a.algorithm == name)
    }

    pub fn win_rate(&self, algorithm: &str, versus: &str) -> Option<&WinRate> {
        self.win_rates
            .iter()
            .find(|w| w.algorithm == algorithm && w.versus == versus)
    }
}
