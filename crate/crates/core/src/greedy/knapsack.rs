use serde::Serialize;

use super::{cost_with, density, sorted_insert, Evaluation, GreedyTrace, Selector, StopReason};
use crate::cost::{SetFunction, WeightVector};
use crate::error::{Error, Result};
use crate::oracle::SubmodularOracle;
use crate::subset::{compensated_sum, Subset};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KnapsackMode {
    /// Better of the gain-per-cost greedy and the pure-gain greedy.
    #[default]
    MaxOfTwo,
    /// All feasible sets of size < 3, plus gain-per-cost completion of every
    /// feasible triple.
    PartialEnumeration,
}

impl KnapsackMode {
    /// Worst-case fraction of the optimum guaranteed by the mode.
    pub fn factor(self) -> f64 {
        let base = 1.0 - (-1.0f64).exp();
        match self {
            KnapsackMode::MaxOfTwo => base / 2.0,
            KnapsackMode::PartialEnumeration => base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnapsackResult {
    pub set: Subset,
    pub value: f64,
    /// `cost(X)`, never above the effective budget.
    pub cost: f64,
    pub effective_budget: f64,
    pub trace: GreedyTrace,
}

/// Greedy submodular knapsack: maximize `g(X)` s.t. `cost(X) + offset <= budget`.
pub fn greedy_knapsack(
    g: &SubmodularOracle,
    cost: &WeightVector,
    offset: f64,
    budget: f64,
    mode: KnapsackMode,
    eval: Evaluation,
) -> Result<KnapsackResult> {
    if cost.len() != g.ground_size() {
        return Err(Error::param("cost", "dimension does not match the oracle"));
    }
    knapsack_raw(g, cost.values(), offset, budget, mode, eval)
}

pub(crate) fn knapsack_raw(
    g: &SubmodularOracle,
    costs: &[f64],
    offset: f64,
    budget: f64,
    mode: KnapsackMode,
    eval: Evaluation,
) -> Result<KnapsackResult> {
    let room = budget - offset;
    if !(room >= 0.0) {
        return Err(Error::infeasible(
            "knapsack piece",
            format!("budget {budget} is below the fixed cost {offset}"),
        ));
    }
    let best = match mode {
        KnapsackMode::MaxOfTwo => {
            let by_density = run(g, costs, room, &[], Rule::Density, eval);
            let by_gain = run(g, costs, room, &[], Rule::Gain, eval);
            if by_gain.value > by_density.value {
                by_gain
            } else {
                by_density
            }
        }
        KnapsackMode::PartialEnumeration => partial_enumeration(g, costs, room, eval),
    };
    Ok(best)
}

#[derive(Clone, Copy, PartialEq)]
enum Rule {
    Density,
    Gain,
}

/// Greedy from a fixed seed set, skipping elements that no longer fit.
fn run(g: &SubmodularOracle, costs: &[f64], room: f64, seed: &[usize], rule: Rule, eval: Evaluation) -> KnapsackResult {
    let n = costs.len();
    let mut state = g.state();
    let mut members: Vec<usize> = Vec::new();
    let mut trace = GreedyTrace::new();
    let mut sel = Selector::new(n, eval);
    for &j in seed {
        let gain = state.gain(j);
        state.insert(j);
        sel.retire(j);
        sorted_insert(&mut members, j);
        trace.push(j, gain, costs[j], state.value(), compensated_sum(members.iter().map(|&e| costs[e])));
    }
    let mut blocked = false;
    loop {
        let pick = sel.next(|j| {
            if cost_with(costs, &members, j) > room {
                blocked = true;
                return None;
            }
            let gain = state.gain(j);
            Some(match rule {
                Rule::Density => density(gain, costs[j]),
                Rule::Gain => gain,
            })
        });
        let Some((j, score)) = pick else { break };
        if score <= 0.0 {
            break;
        }
        let gain = state.gain(j);
        state.insert(j);
        sel.retire(j);
        sorted_insert(&mut members, j);
        trace.push(j, gain, costs[j], state.value(), compensated_sum(members.iter().map(|&e| costs[e])));
    }
    trace.stop = if blocked {
        StopReason::BudgetExhausted
    } else {
        StopReason::GroundSetExhausted
    };
    let cost = compensated_sum(members.iter().map(|&e| costs[e]));
    KnapsackResult {
        value: state.value(),
        set: Subset::from_elems(members),
        cost,
        effective_budget: room,
        trace,
    }
}

fn partial_enumeration(g: &SubmodularOracle, costs: &[f64], room: f64, eval: Evaluation) -> KnapsackResult {
    let n = costs.len();
    let fits = |s: &[usize]| compensated_sum(s.iter().map(|&e| costs[e])) <= room;
    let mut best = run(g, costs, room, &[], Rule::Density, eval);
    let consider = |cand: KnapsackResult, best: &mut KnapsackResult| {
        if cand.value > best.value {
            *best = cand;
        }
    };
    for a in 0..n {
        for b in a..n {
            let small: Vec<usize> = if a == b { vec![a] } else { vec![a, b] };
            if !fits(&small) {
                continue;
            }
            consider(seed_only(g, costs, room, &small), &mut best);
            if a == b {
                continue;
            }
            for c in b + 1..n {
                let triple = [a, b, c];
                if fits(&triple) {
                    consider(run(g, costs, room, &triple, Rule::Density, eval), &mut best);
                }
            }
        }
    }
    best
}

fn seed_only(g: &SubmodularOracle, costs: &[f64], room: f64, seed: &[usize]) -> KnapsackResult {
    let mut trace = GreedyTrace::new();
    let mut state = g.state();
    let mut spent = 0.0;
    for &j in seed {
        let gain = state.gain(j);
        state.insert(j);
        spent += costs[j];
        trace.push(j, gain, costs[j], state.value(), spent);
    }
    KnapsackResult {
        value: state.value(),
        set: Subset::from_elems(seed.iter().copied()),
        cost: compensated_sum(seed.iter().map(|&e| costs[e])),
        effective_budget: room,
        trace,
    }
}

/// Cost-agnostic greedy: take the largest-gain element whose addition keeps
/// `fits(X ∪ {j})`, until none does.
pub fn agnostic_greedy(g: &SubmodularOracle, fits: impl Fn(&[usize]) -> bool) -> Subset {
    let n = g.ground_size();
    let mut state = g.state();
    let mut members: Vec<usize> = Vec::new();
    let mut sel = Selector::new(n, Evaluation::Lazy);
    loop {
        let pick = sel.next(|j| {
            let mut trial = members.clone();
            sorted_insert(&mut trial, j);
            fits(&trial).then(|| state.gain(j))
        });
        let Some((j, gain)) = pick else { break };
        if gain <= 0.0 {
            break;
        }
        state.insert(j);
        sel.retire(j);
        sorted_insert(&mut members, j);
    }
    Subset::from_elems(members)
}
