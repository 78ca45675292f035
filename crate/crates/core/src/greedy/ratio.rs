use serde::Serialize;

use super::{density, sorted_insert, Evaluation, GreedyTrace, Selector};
use crate::cost::{SetFunction, WeightVector};
use crate::error::{Error, Result};
use crate::oracle::SubmodularOracle;
use crate::subset::{compensated_sum, CompensatedSum, Subset};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioResult {
    pub set: Subset,
    /// `(cost(X) + offset) / g(X)` of the chosen prefix.
    pub ratio: f64,
    /// Ratio of every greedy prefix with `g > 0`, in pick order (`None` when `g = 0`).
    pub prefix_ratios: Vec<Option<f64>>,
    pub trace: GreedyTrace,
}

/// Minimize `(cost(X) + offset) / g(X)` by scanning the prefixes of the
/// gain-per-cost greedy run to saturation.
pub fn greedy_ratio(cost: &WeightVector, offset: f64, g: &SubmodularOracle, eval: Evaluation) -> Result<RatioResult> {
    if cost.len() != g.ground_size() {
        return Err(Error::param("cost", "dimension does not match the oracle"));
    }
    ratio_raw(cost.values(), offset, g, eval)
}

pub(crate) fn ratio_raw(costs: &[f64], offset: f64, g: &SubmodularOracle, eval: Evaluation) -> Result<RatioResult> {
    let n = costs.len();
    let mut state = g.state();
    let mut members: Vec<usize> = Vec::new();
    let mut trace = GreedyTrace::new();
    let mut sel = Selector::new(n, eval);
    let mut spent = CompensatedSum::new();
    let mut prefix_ratios = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    while let Some((j, score)) = sel.next(|j| Some(density(state.gain(j), costs[j]))) {
        if score <= 0.0 {
            break;
        }
        let gain = state.gain(j);
        state.insert(j);
        sel.retire(j);
        sorted_insert(&mut members, j);
        spent.add(costs[j]);
        let value = state.value();
        trace.push(j, gain, costs[j], value, spent.value());
        let ratio = (value > 0.0).then(|| (compensated_sum(members.iter().map(|&e| costs[e])) + offset) / value);
        prefix_ratios.push(ratio);
        if let Some(r) = ratio {
            if best.is_none_or(|(b, _)| r < b) {
                best = Some((r, trace.picks.len()));
            }
        }
    }
    let Some((ratio, len)) = best else {
        return Err(Error::Degenerate("g(V) = 0, the ratio is undefined everywhere".into()));
    };
    let set = Subset::from_elems(trace.picks[..len].iter().map(|p| p.element));
    Ok(RatioResult {
        set,
        ratio,
        prefix_ratios,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CooperativeCost;
    use crate::greedy::{brute_force, BruteProblem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn modular_g(v: &[f64]) -> SubmodularOracle {
        SubmodularOracle::WeightedCoverage {
            incidence: (0..v.len()).map(|j| vec![j]).collect(),
            concept_weights: v.to_vec(),
        }
    }

    #[test]
    fn best_singleton_for_modular_pair() {
        let g = modular_g(&[1.0, 2.0, 3.0]);
        let cost = WeightVector::new(vec![2.0, 1.0, 4.0]).unwrap();
        let r = greedy_ratio(&cost, 0.0, &g, Evaluation::Lazy).unwrap();
        assert_eq!(r.set.as_slice(), &[1]);
        assert!((r.ratio - 0.5).abs() < 1e-15);
    }

    #[test]
    fn large_offset_favours_long_prefixes() {
        let g = modular_g(&[1.0, 2.0, 3.0]);
        let cost = WeightVector::new(vec![2.0, 1.0, 4.0]).unwrap();
        let r = greedy_ratio(&cost, 100.0, &g, Evaluation::Lazy).unwrap();
        assert_eq!(r.set, Subset::full(3));
        let scan = r.prefix_ratios.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(r.ratio, scan);
    }

    #[test]
    fn zero_coverage_is_degenerate() {
        let g = modular_g(&[0.0, 0.0]);
        let cost = WeightVector::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(greedy_ratio(&cost, 0.0, &g, Evaluation::Lazy), Err(Error::Degenerate(_))));
    }

    #[test]
    fn within_e_over_e_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let bound = std::f64::consts::E / (std::f64::consts::E - 1.0);
        for _ in 0..40 {
            let n = 10;
            let g = SubmodularOracle::FacilityLocation {
                similarity: (0..6).map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()).collect(),
            };
            let cost = WeightVector::new((0..n).map(|_| rng.gen_range(0.1..2.0)).collect()).unwrap();
            let lazy = greedy_ratio(&cost, 0.0, &g, Evaluation::Lazy).unwrap();
            let eager = greedy_ratio(&cost, 0.0, &g, Evaluation::Eager).unwrap();
            assert_eq!(lazy.set, eager.set);
            let f = CooperativeCost::modular(cost.clone()).unwrap();
            let opt = brute_force(&f, BruteProblem::Ratio { g: &g }).unwrap();
            assert!(lazy.ratio <= bound * opt.value * (1.0 + 1e-9));
        }
    }
}
