//! Top-level drivers for the four programs
//!
//! 1. `min f(X)` over a combinatorial family `𝒞`,
//! 2. `min f(X)` s.t. `g(X) >= c`,
//! 3. `max g(X)` s.t. `f(X) <= b`,
//! 4. `min f(X) / g(X)`,
//!
//! with `f` a cooperative cost and `g` a monotone submodular oracle.

mod curvature;
mod pla;
mod report;
mod sga;

use serde::{Deserialize, Serialize};

pub use curvature::{curvature, CurvatureReport};
pub use pla::{pla_coordinate_heuristic, pla_early_stop_check, pla_solve, PlaOptions};
pub use report::{Algorithm, Guarantee, Iterate, PieceIndex, PieceRecord, SolveReport};
pub use sga::{sga_solve, sga_solve_cooperative, SgaOptions};

use crate::cost::SetFunction;
use crate::error::{Error, Result};
use crate::greedy::{
    knapsack_raw, ratio_raw, set_cover_raw, BruteProblem, Evaluation, KnapsackMode, COVER_TOLERANCE,
};
use crate::linear::{check_feasible, solve_raw, ConstraintSpec};
use crate::oracle::SubmodularOracle;
use crate::subset::Subset;

/// Shrink applied to knapsack budgets so that rounding in the modular
/// surrogate cannot admit a set whose envelope cost exceeds `b`.
const BUDGET_SHRINK: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub enum Problem<'a> {
    ConstrainedMin { constraint: &'a ConstraintSpec },
    Cover { g: &'a SubmodularOracle, target: f64 },
    Knapsack { g: &'a SubmodularOracle, budget: f64 },
    Ratio { g: &'a SubmodularOracle },
}

impl<'a> Problem<'a> {
    pub fn tag(&self) -> u8 {
        match self {
            Problem::ConstrainedMin { .. } => 1,
            Problem::Cover { .. } => 2,
            Problem::Knapsack { .. } => 3,
            Problem::Ratio { .. } => 4,
        }
    }

    pub fn maximizes(&self) -> bool {
        matches!(self, Problem::Knapsack { .. })
    }

    pub fn oracle(&self) -> Option<&'a SubmodularOracle> {
        match *self {
            Problem::ConstrainedMin { .. } => None,
            Problem::Cover { g, .. } | Problem::Knapsack { g, .. } | Problem::Ratio { g } => Some(g),
        }
    }

    pub fn constraint(&self) -> Option<&'a ConstraintSpec> {
        match *self {
            Problem::ConstrainedMin { constraint } => Some(constraint),
            _ => None,
        }
    }

    /// Same program in the form the exhaustive oracle takes.
    pub fn to_brute(&self) -> BruteProblem<'a> {
        match *self {
            Problem::ConstrainedMin { constraint } => BruteProblem::ConstrainedMin { constraint },
            Problem::Cover { g, target } => BruteProblem::Cover { g, target },
            Problem::Knapsack { g, budget } => BruteProblem::Knapsack { g, budget },
            Problem::Ratio { g } => BruteProblem::Ratio { g },
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(c) = self.constraint() {
            c.validate()?;
            if c.ground_size() != n {
                return Err(Error::param(
                    "constraint",
                    format!("covers {} elements, the cost has {n}", c.ground_size()),
                ));
            }
        }
        if let Some(g) = self.oracle() {
            g.validate()?;
            if g.ground_size() != n {
                return Err(Error::param(
                    "oracle",
                    format!("covers {} elements, the cost has {n}", g.ground_size()),
                ));
            }
        }
        match *self {
            Problem::Cover { target, .. } if !(target.is_finite() && target >= 0.0) => {
                Err(Error::param("target", format!("{target} must be finite and >= 0")))
            }
            Problem::Knapsack { budget, .. } if !(budget.is_finite() && budget >= 0.0) => {
                Err(Error::param("budget", format!("{budget} must be finite and >= 0")))
            }
            _ => Ok(()),
        }
    }
}

/// True-function score of a candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Scored {
    pub f: f64,
    pub g: Option<f64>,
    pub objective: f64,
}

impl Scored {
    /// Smaller is better for every problem.
    pub(crate) fn key(&self, problem: &Problem) -> f64 {
        if problem.maximizes() {
            -self.objective
        } else {
            self.objective
        }
    }
}

pub(crate) fn score(problem: &Problem, f: &dyn SetFunction, set: &[usize]) -> Scored {
    let fv = f.eval(set);
    let gv = problem.oracle().map(|g| g.eval(set));
    let objective = match problem {
        Problem::ConstrainedMin { .. } | Problem::Cover { .. } => fv,
        Problem::Knapsack { .. } => gv.unwrap(),
        Problem::Ratio { .. } => fv / gv.unwrap(),
    };
    Scored { f: fv, g: gv, objective }
}

/// Shared state for solving modular instances of one program.
pub(crate) struct ModularSolver<'a> {
    pub problem: Problem<'a>,
    pub knapsack_mode: KnapsackMode,
    g_full: f64,
}

/// Output of one modular subproblem.
#[derive(Clone, Debug)]
pub(crate) struct ModularSolution {
    pub set: Subset,
    /// The subproblem's own objective, constant included.
    pub surrogate: f64,
    /// Cover only: `c / (c - g(X_{T-1}))` of the greedy run.
    pub cover_ratio: Option<f64>,
}

impl<'a> ModularSolver<'a> {
    /// Checks the program-level infeasibility conditions that no piece can fix.
    pub(crate) fn new(problem: Problem<'a>, knapsack_mode: KnapsackMode, n: usize) -> Result<Self> {
        let g_full = problem.oracle().map_or(0.0, |g| g.eval(&(0..n).collect::<Vec<_>>()));
        match problem {
            Problem::Cover { target, .. } if target > g_full * (1.0 + 1e-12) => {
                return Err(Error::infeasible("cover", format!("target {target} exceeds g(V) = {g_full}")));
            }
            Problem::Ratio { .. } if g_full <= 0.0 => {
                return Err(Error::Degenerate("g(V) = 0, the ratio is undefined everywhere".into()));
            }
            _ => {}
        }
        Ok(ModularSolver {
            problem,
            knapsack_mode,
            g_full,
        })
    }

    pub(crate) fn g_full(&self) -> f64 {
        self.g_full
    }

    /// Optimize `Σ_e w(e) + offset` under the program's structure.
    pub(crate) fn solve(&self, w: &[f64], offset: f64) -> Result<ModularSolution> {
        let eval = Evaluation::Lazy;
        match self.problem {
            Problem::ConstrainedMin { constraint } => {
                let r = solve_raw(constraint, w)?;
                Ok(ModularSolution {
                    surrogate: r.objective + offset,
                    set: r.set,
                    cover_ratio: None,
                })
            }
            Problem::Cover { g, target } => {
                let r = set_cover_raw(g, w, offset, target, self.g_full, eval)?;
                Ok(ModularSolution {
                    surrogate: r.objective,
                    cover_ratio: Some(r.realized_ratio_bound(target)),
                    set: r.set,
                })
            }
            Problem::Knapsack { g, budget } => {
                let r = knapsack_raw(g, w, offset, budget * (1.0 - BUDGET_SHRINK), self.knapsack_mode, eval)?;
                Ok(ModularSolution {
                    surrogate: r.value,
                    set: r.set,
                    cover_ratio: None,
                })
            }
            Problem::Ratio { g } => {
                let r = ratio_raw(w, offset, g, eval)?;
                Ok(ModularSolution {
                    surrogate: r.ratio,
                    set: r.set,
                    cover_ratio: None,
                })
            }
        }
    }

    /// Whether a user-supplied set may compete as a candidate. `surrogate_cost`
    /// is the cost the budget is measured against.
    pub(crate) fn admits(&self, set: &Subset, surrogate_cost: f64) -> bool {
        match self.problem {
            Problem::ConstrainedMin { constraint } => check_feasible(constraint, set),
            Problem::Cover { g, target } => g.eval(set.as_slice()) >= target * (1.0 - COVER_TOLERANCE),
            Problem::Knapsack { budget, .. } => surrogate_cost <= budget,
            Problem::Ratio { g } => !set.is_empty() && g.eval(set.as_slice()) > 0.0,
        }
    }
}

/// Relative improvement test used by iterative drivers.
pub(crate) fn improves(problem: &Problem, new: f64, old: f64) -> bool {
    let tol = 1e-9 * old.abs();
    if problem.maximizes() {
        new > old + tol
    } else {
        new < old - tol
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[default]
    Pla,
    PlaHeuristic,
    Sga,
}
