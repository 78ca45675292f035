use std::fmt;

use serde::{Deserialize, Serialize};

use crate::subset::Subset;

/// One segment choice per component; entry `i` indexes the segments of the
/// `i`-th envelope (0 is the lead chord). Constant components always hold 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PieceIndex(pub Vec<usize>);

impl fmt::Display for PieceIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Pla,
    PlaHeuristic,
    Sga,
}

/// What the returned set is proven (or estimated) to achieve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Guarantee {
    /// `objective(X̂) <= factor · OPT`.
    Approximation { factor: f64 },
    /// Submodular cover. `bicriteria` is `[cost factor, coverage fraction]`
    /// for a run stopped at `(1 - 1/e) c`; `integral_factor` bounds the
    /// saturated run when `g` is integer valued; `realized_factor` is the
    /// data-dependent bound `(1 + ε)(1 + ln r)` of this run.
    Cover {
        bicriteria: [f64; 2],
        integral_factor: f64,
        realized_factor: f64,
    },
    /// `g(X̂) >= fraction · max{g(X) : f(X) <= b}`, with `X̂` feasible for
    /// the surrogate budget `f^PL(X̂) <= b` only.
    Budgeted { fraction: f64, surrogate_factor: f64 },
    /// Curvature-based factor evaluated at the returned set (the bound is
    /// stated at the optimum, so this is an estimate).
    CurvatureEstimate { alpha: f64, average_curvature: f64 },
    /// Heuristic or degenerate run; no bound claimed.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub j: PieceIndex,
    /// `None` when the piece's subproblem is infeasible.
    pub set: Option<Subset>,
    pub surrogate: Option<f64>,
    pub objective: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub set: Subset,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// 1 constrained minimization, 2 cover, 3 knapsack, 4 ratio.
    pub problem: u8,
    pub algorithm: Algorithm,
    pub set: Subset,
    /// The problem's own objective on the true functions: `f`, `f`, `g` or `f/g`.
    pub objective: f64,
    pub f_value: f64,
    pub g_value: Option<f64>,
    /// `f^PL(X̂)` for the piecewise drivers.
    pub surrogate_value: Option<f64>,
    pub loads: Vec<f64>,
    /// Piece that produced `X̂` (for a seeded winner, the piece active at it).
    pub winning_j: Option<PieceIndex>,
    /// Best piece by surrogate value and that value.
    pub surrogate_winner: Option<PieceIndex>,
    pub surrogate_best: Option<f64>,
    pub seeded_winner: bool,
    /// `Π N_i`, the size of the full grid.
    pub grid_size: u128,
    /// Subproblems actually solved.
    pub pieces_evaluated: u64,
    pub early_stop_fired: bool,
    pub heuristic: bool,
    /// Knapsack only: true `f(X̂) > b` although `f^PL(X̂) <= b`.
    pub budget_exceeded: bool,
    pub guarantee: Guarantee,
    /// Accepted iterates of the supergradient method.
    pub iterates: Vec<Iterate>,
    pub pieces: Option<Vec<PieceRecord>>,
    pub wall_time_ms: f64,
}
