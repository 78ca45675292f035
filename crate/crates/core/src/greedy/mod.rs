//! Greedy solvers for the modular-cost subproblems: submodular set cover,
//! submodular knapsack and ratio minimization, plus the exhaustive oracle
//! used to check them.
//!
//! All greedy rules pick the highest score with ties going to the lowest
//! element index. Scores only shrink as the set grows, so selection is lazy
//! by default (stale scores in a max-heap are upper bounds); the eager scan
//! is kept for cross-checking.

mod brute;
mod cover;
mod knapsack;
mod ratio;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

pub use brute::{brute_force, BruteProblem, BruteResult, BRUTE_FORCE_CAP};
pub use cover::{greedy_set_cover, CoverResult, COVER_TOLERANCE};
pub use knapsack::{agnostic_greedy, greedy_knapsack, KnapsackMode, KnapsackResult};
pub use ratio::{greedy_ratio, RatioResult};

pub(crate) use cover::set_cover_raw;
pub(crate) use knapsack::knapsack_raw;
pub(crate) use ratio::ratio_raw;

use crate::subset::compensated_sum;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreedyPick {
    pub element: usize,
    pub gain: f64,
    pub cost: f64,
    pub cumulative_value: f64,
    pub cumulative_cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    CoverReached,
    BudgetExhausted,
    GroundSetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub picks: Vec<GreedyPick>,
    pub stop: StopReason,
}

impl GreedyTrace {
    fn new() -> Self {
        GreedyTrace {
            picks: Vec::new(),
            stop: StopReason::GroundSetExhausted,
        }
    }

    fn push(&mut self, element: usize, gain: f64, cost: f64, value: f64, total_cost: f64) {
        self.picks.push(GreedyPick {
            element,
            gain,
            cost,
            cumulative_value: value,
            cumulative_cost: total_cost,
        });
    }

    pub fn elements(&self) -> Vec<usize> {
        self.picks.iter().map(|p| p.element).collect()
    }
}

/// How the argmax is found at each step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Evaluation {
    #[default]
    Lazy,
    Eager,
}

/// Score of `gain` per unit `cost`; free elements with positive gain come first.
pub(crate) fn density(gain: f64, cost: f64) -> f64 {
    if cost <= 0.0 {
        if gain > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        gain / cost
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    score: f64,
    element: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    // max-heap on score, then min on element
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.element.cmp(&self.element))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Repeated argmax over a shrinking candidate pool.
///
/// `score(j)` returns the current score of `j`, or `None` once `j` can never
/// be chosen again (already taken, or no longer fits).
pub(crate) struct Selector {
    mode: Evaluation,
    heap: BinaryHeap<Entry>,
    alive: Vec<bool>,
}

impl Selector {
    pub(crate) fn new(n: usize, mode: Evaluation) -> Self {
        let heap = match mode {
            Evaluation::Lazy => (0..n)
                .map(|element| Entry {
                    score: f64::INFINITY,
                    element,
                })
                .collect(),
            Evaluation::Eager => BinaryHeap::new(),
        };
        Selector {
            mode,
            heap,
            alive: vec![true; n],
        }
    }

    pub(crate) fn retire(&mut self, j: usize) {
        self.alive[j] = false;
    }

    /// Best `(element, score)` among live candidates; `None` when none remain.
    pub(crate) fn next(&mut self, mut score: impl FnMut(usize) -> Option<f64>) -> Option<(usize, f64)> {
        match self.mode {
            Evaluation::Eager => {
                let mut best: Option<Entry> = None;
                for j in 0..self.alive.len() {
                    if !self.alive[j] {
                        continue;
                    }
                    match score(j) {
                        None => self.alive[j] = false,
                        Some(s) => {
                            let e = Entry { score: s, element: j };
                            if best.is_none_or(|b| e > b) {
                                best = Some(e);
                            }
                        }
                    }
                }
                best.map(|e| (e.element, e.score))
            }
            Evaluation::Lazy => loop {
                let top = self.heap.pop()?;
                if !self.alive[top.element] {
                    continue;
                }
                let Some(s) = score(top.element) else {
                    self.alive[top.element] = false;
                    continue;
                };
                let fresh = Entry {
                    score: s,
                    element: top.element,
                };
                match self.heap.peek() {
                    Some(next) if *next > fresh => self.heap.push(fresh),
                    _ => {
                        // the caller decides whether to take it; keep it queued
                        self.heap.push(fresh);
                        return Some((fresh.element, fresh.score));
                    }
                }
            },
        }
    }
}

/// `cost(X ∪ {j})` summed in sorted element order, matching how the final
/// set's cost is reported.
pub(crate) fn cost_with(costs: &[f64], sorted_members: &[usize], j: usize) -> f64 {
    let pos = sorted_members.partition_point(|&e| e < j);
    compensated_sum(
        sorted_members[..pos]
            .iter()
            .chain(std::iter::once(&j))
            .chain(&sorted_members[pos..])
            .map(|&e| costs[e]),
    )
}

pub(crate) fn sorted_insert(v: &mut Vec<usize>, j: usize) {
    let pos = v.partition_point(|&e| e < j);
    v.insert(pos, j);
}
