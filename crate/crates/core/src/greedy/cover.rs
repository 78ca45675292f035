use serde::Serialize;

use super::{density, sorted_insert, Evaluation, GreedyTrace, Selector, StopReason};
use crate::cost::{SetFunction, WeightVector};
use crate::error::{Error, Result};
use crate::oracle::SubmodularOracle;
use crate::subset::{compensated_sum, CompensatedSum, Subset};

/// Relative shortfall tolerated when testing `g(X) >= c`.
pub const COVER_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverResult {
    pub set: Subset,
    /// `cost(X) + offset`.
    pub objective: f64,
    pub value: f64,
    pub trace: GreedyTrace,
}

impl CoverResult {
    /// `c / (c - g(X_{T-1}))`, the data-dependent factor in the
    /// `1 + ln(·)` bound for greedy cover, where `X_{T-1}` is the set before
    /// the final pick.
    pub fn realized_ratio_bound(&self, target: f64) -> f64 {
        if self.trace.picks.is_empty() || target <= 0.0 {
            return 1.0;
        }
        let before = match self.trace.picks.len() {
            1 => 0.0,
            t => self.trace.picks[t - 2].cumulative_value,
        };
        let residual = (target - before).max(f64::MIN_POSITIVE);
        (target / residual).max(1.0)
    }
}

/// Greedy submodular set cover: minimize `cost(X) + offset` s.t. `g(X) >= c`.
pub fn greedy_set_cover(
    g: &SubmodularOracle,
    cost: &WeightVector,
    offset: f64,
    target: f64,
    eval: Evaluation,
) -> Result<CoverResult> {
    if cost.len() != g.ground_size() {
        return Err(Error::param("cost", "dimension does not match the oracle"));
    }
    let full = g.eval(&(0..g.ground_size()).collect::<Vec<_>>());
    set_cover_raw(g, cost.values(), offset, target, full, eval)
}

pub(crate) fn set_cover_raw(
    g: &SubmodularOracle,
    costs: &[f64],
    offset: f64,
    target: f64,
    g_full: f64,
    eval: Evaluation,
) -> Result<CoverResult> {
    if target > g_full * (1.0 + 1e-12) {
        return Err(Error::infeasible(
            "cover",
            format!("target {target} exceeds g(V) = {g_full}"),
        ));
    }
    let n = costs.len();
    let mut state = g.state();
    let mut members: Vec<usize> = Vec::new();
    let mut trace = GreedyTrace::new();
    let mut value = 0.0;
    let mut spent = CompensatedSum::new();
    let mut sel = Selector::new(n, eval);
    let goal = target * (1.0 - COVER_TOLERANCE);
    while value < goal {
        let residual = target - value;
        let pick = sel.next(|j| Some(density(state.gain(j).min(residual), costs[j])));
        let Some((j, score)) = pick else {
            return Err(Error::infeasible("cover", "ground set exhausted before reaching the target"));
        };
        if score <= 0.0 {
            return Err(Error::infeasible("cover", "all remaining gains are zero before reaching the target"));
        }
        let gain = state.gain(j);
        state.insert(j);
        sel.retire(j);
        sorted_insert(&mut members, j);
        value = state.value();
        spent.add(costs[j]);
        trace.push(j, gain, costs[j], value, spent.value());
    }
    trace.stop = StopReason::CoverReached;
    let objective = compensated_sum(members.iter().map(|&e| costs[e])) + offset;
    Ok(CoverResult {
        set: Subset::from_elems(members),
        objective,
        value,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{brute_force, BruteProblem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disjoint_coverage(weights: &[f64]) -> SubmodularOracle {
        SubmodularOracle::WeightedCoverage {
            incidence: (0..weights.len()).map(|j| vec![j]).collect(),
            concept_weights: weights.to_vec(),
        }
    }

    #[test]
    fn modular_cover_takes_everything_needed() {
        let g = disjoint_coverage(&[1.0, 2.0, 0.0, 3.0]);
        let cost = WeightVector::new(vec![1.0; 4]).unwrap();
        let r = greedy_set_cover(&g, &cost, 0.0, 6.0, Evaluation::Lazy).unwrap();
        assert_eq!(r.set.as_slice(), &[0, 1, 3]);
        assert_eq!(r.objective, 3.0);
        assert_eq!(r.trace.stop, StopReason::CoverReached);
    }

    #[test]
    fn truncated_ratio_prefers_the_big_element() {
        // element 0 covers everything at cost 1; the others are cheap but tiny
        let g = SubmodularOracle::WeightedCoverage {
            incidence: vec![vec![0, 1, 2, 3], vec![0], vec![1], vec![2]],
            concept_weights: vec![0.01, 0.01, 0.01, 10.0],
        };
        let cost = WeightVector::new(vec![1.0, 0.1, 0.1, 0.1]).unwrap();
        let r = greedy_set_cover(&g, &cost, 0.5, 10.03, Evaluation::Lazy).unwrap();
        assert_eq!(r.trace.picks[0].element, 0);
        assert_eq!(r.set.as_slice(), &[0]);
        assert!((r.objective - 1.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_targets() {
        let g = disjoint_coverage(&[1.0, 2.0]);
        let cost = WeightVector::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            greedy_set_cover(&g, &cost, 0.0, 3.5, Evaluation::Lazy),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn within_wolsey_bound_of_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let n = 10;
            let g = SubmodularOracle::WeightedCoverage {
                incidence: (0..n).map(|_| (0..3).map(|_| rng.gen_range(0..12)).collect()).collect(),
                concept_weights: (0..12).map(|_| rng.gen_range(0.5..2.0)).collect(),
            };
            let cost = WeightVector::new((0..n).map(|_| rng.gen_range(0.2..3.0)).collect()).unwrap();
            let gv = g.eval(&(0..n).collect::<Vec<_>>());
            let c = gv * rng.gen_range(0.3..1.0);
            let lazy = greedy_set_cover(&g, &cost, 0.0, c, Evaluation::Lazy).unwrap();
            let eager = greedy_set_cover(&g, &cost, 0.0, c, Evaluation::Eager).unwrap();
            assert_eq!(lazy.set, eager.set);
            let modular = crate::cost::CooperativeCost::modular(cost.clone()).unwrap();
            let opt = brute_force(&modular, BruteProblem::Cover { g: &g, target: c }).unwrap();
            let bound = 1.0 + lazy.realized_ratio_bound(c).ln();
            assert!(lazy.objective <= bound * opt.value * (1.0 + 1e-9), "{} > {bound}·{}", lazy.objective, opt.value);
            assert!(lazy.value >= c * (1.0 - COVER_TOLERANCE));
        }
    }
}
