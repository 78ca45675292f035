use std::cmp::Ordering;

use log::warn;
use serde::Serialize;

use super::cover::COVER_TOLERANCE;
use crate::cost::SetFunction;
use crate::error::{Error, Result};
use crate::linear::{ConstraintSpec, FeasibilityChecker};
use crate::subset::{mask_lex_cmp, Subset};

pub const BRUTE_FORCE_CAP: usize = 20;

/// Which program to enumerate; `f` is passed separately.
#[derive(Clone, Copy)]
pub enum BruteProblem<'a> {
    /// `min f(X)` over `X ∈ 𝒞`.
    ConstrainedMin { constraint: &'a ConstraintSpec },
    /// `min f(X)` s.t. `g(X) >= c`.
    Cover { g: &'a dyn SetFunction, target: f64 },
    /// `max g(X)` s.t. `f(X) <= b`.
    Knapsack { g: &'a dyn SetFunction, budget: f64 },
    /// `min f(X) / g(X)` over nonempty `X` with `g(X) > 0`.
    Ratio { g: &'a dyn SetFunction },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteResult {
    pub set: Subset,
    /// Optimal objective: `f`, `f`, `g` or `f/g` for the four programs.
    pub value: f64,
    pub feasible_count: u64,
}

/// Exact optimum by enumerating all `2^n` subsets; ties go to the
/// lexicographically first subset.
pub fn brute_force(f: &dyn SetFunction, problem: BruteProblem<'_>) -> Result<BruteResult> {
    let n = f.ground_size();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge(format!("brute force needs n <= {BRUTE_FORCE_CAP}, got {n}")));
    }
    if n > 16 {
        warn!("brute force over 2^{n} subsets");
    }
    let maximize = matches!(problem, BruteProblem::Knapsack { .. });
    let checker = match problem {
        BruteProblem::ConstrainedMin { constraint } => Some(FeasibilityChecker::new(constraint)),
        _ => None,
    };
    let size_filter = checker.as_ref().and_then(|c| c.required_size());

    let mut best: Option<(f64, u64)> = None;
    let mut feasible_count = 0u64;
    let mut elems = Vec::with_capacity(n);
    for mask in 0..(1u64 << n) {
        if let Some(k) = size_filter {
            if mask.count_ones() as usize != k {
                continue;
            }
        }
        elems.clear();
        let mut m = mask;
        while m != 0 {
            elems.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        let value = match problem {
            BruteProblem::ConstrainedMin { .. } => {
                if !checker.as_ref().unwrap().is_feasible(&elems) {
                    continue;
                }
                f.eval(&elems)
            }
            BruteProblem::Cover { g, target } => {
                if g.eval(&elems) < target * (1.0 - COVER_TOLERANCE) {
                    continue;
                }
                f.eval(&elems)
            }
            BruteProblem::Knapsack { g, budget } => {
                if f.eval(&elems) > budget {
                    continue;
                }
                g.eval(&elems)
            }
            BruteProblem::Ratio { g } => {
                if elems.is_empty() {
                    continue;
                }
                let gv = g.eval(&elems);
                if gv <= 0.0 {
                    continue;
                }
                f.eval(&elems) / gv
            }
        };
        feasible_count += 1;
        let better = match best {
            None => true,
            Some((bv, bm)) => {
                let scale = bv.abs().max(1.0) * 1e-12;
                let strictly = if maximize { value > bv + scale } else { value < bv - scale };
                let tied = (value - bv).abs() <= scale;
                strictly || (tied && mask_lex_cmp(mask, bm) == Ordering::Less)
            }
        };
        if better {
            best = Some((value, mask));
        }
    }
    let Some((value, mask)) = best else {
        return Err(Error::infeasible("brute force", "no feasible subset"));
    };
    Ok(BruteResult {
        set: Subset::from_mask(mask),
        value,
        feasible_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concave::ConcaveSpec;
    use crate::cost::{CooperativeCost, WeightVector};
    use crate::linear::solve_linear;
    use crate::oracle::SubmodularOracle;

    #[test]
    fn agrees_with_cardinality_solver() {
        let w = WeightVector::new(vec![3.0, 1.0, 2.0, 1.0, 5.0]).unwrap();
        let f = CooperativeCost::modular(w.clone()).unwrap();
        let c = ConstraintSpec::CardinalityLb {
            ground_size: 5,
            min_size: 2,
        };
        let b = brute_force(&f, BruteProblem::ConstrainedMin { constraint: &c }).unwrap();
        let s = solve_linear(&c, &w).unwrap();
        assert_eq!(b.set, s.set);
        assert_eq!(b.value, s.objective);
    }

    #[test]
    fn ratio_of_identical_functions_picks_first_singleton() {
        let f = CooperativeCost::new(vec![(
            ConcaveSpec::power(0.5).unwrap(),
            WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap(),
        )])
        .unwrap();
        let g = SubmodularOracle::CooperativeCost(f.clone());
        let r = brute_force(&f, BruteProblem::Ratio { g: &g }).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.set.as_slice(), &[0]);
    }

    #[test]
    fn full_cover_needs_minimal_cost_complete_set() {
        let g = SubmodularOracle::WeightedCoverage {
            incidence: vec![vec![0], vec![0, 1], vec![1], vec![2]],
            concept_weights: vec![1.0, 1.0, 1.0],
        };
        let f = CooperativeCost::modular(WeightVector::new(vec![1.0, 1.5, 1.0, 0.5]).unwrap()).unwrap();
        let gv = g.eval(&[0, 1, 2, 3]);
        let r = brute_force(&f, BruteProblem::Cover { g: &g, target: gv }).unwrap();
        assert_eq!(r.set.as_slice(), &[1, 3]);
        assert_eq!(g.eval(r.set.as_slice()), gv);
    }

    #[test]
    fn refuses_large_ground_sets() {
        let f = CooperativeCost::modular(WeightVector::new(vec![1.0; 21]).unwrap()).unwrap();
        let g = SubmodularOracle::CooperativeCost(f.clone());
        assert!(matches!(brute_force(&f, BruteProblem::Ratio { g: &g }), Err(Error::TooLarge(_))));
    }
}
