use std::time::Instant;

use log::debug;

use super::curvature::curvature;
use super::report::{Algorithm, Guarantee, Iterate, SolveReport};
use super::{improves, score, ModularSolver, Problem};
use crate::cost::{CooperativeCost, SetFunction};
use crate::error::{Error, Result};
use crate::greedy::KnapsackMode;
use crate::subset::{compensated_sum, Subset};

#[derive(Clone, Debug)]
pub struct SgaOptions {
    pub max_iter: usize,
    /// Starting set `X⁰` (default `∅`).
    pub warm_start: Option<Subset>,
    pub knapsack_mode: KnapsackMode,
}

impl Default for SgaOptions {
    fn default() -> Self {
        SgaOptions {
            max_iter: 50,
            warm_start: None,
            knapsack_mode: KnapsackMode::MaxOfTwo,
        }
    }
}

/// Modular upper bound of `f` tight at `X`: weights `f(j|X)` off `X`,
/// `f(j|V∖j)` on `X`, plus the constant `f(X) - Σ_{j∈X} f(j|V∖j)`.
fn supergradient(f: &dyn SetFunction, x: &Subset, tails: &[f64]) -> (Vec<f64>, f64) {
    let n = f.ground_size();
    let fx = f.eval(x.as_slice());
    let mut buf = Vec::with_capacity(x.len() + 1);
    let w: Vec<f64> = (0..n)
        .map(|j| {
            if x.contains(j) {
                tails[j]
            } else {
                buf.clear();
                buf.extend(x.iter());
                let pos = buf.partition_point(|&e| e < j);
                buf.insert(pos, j);
                (f.eval(&buf) - fx).max(0.0)
            }
        })
        .collect();
    let constant = (fx - compensated_sum(x.iter().map(|j| tails[j]))).max(0.0);
    (w, constant)
}

/// Supergradient method: repeatedly solve the program with `f` replaced by
/// its modular upper bound at the current set, accepting each new set while
/// the true objective strictly improves.
pub fn sga_solve(problem: Problem<'_>, f: &dyn SetFunction, opts: &SgaOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let n = f.ground_size();
    problem.validate(n)?;
    let solver = ModularSolver::new(problem, opts.knapsack_mode, n)?;
    let mut x = match &opts.warm_start {
        Some(s) => {
            if let Some(bad) = s.iter().find(|&e| e >= n) {
                return Err(Error::param("warm_start", format!("element {bad} outside ground set of size {n}")));
            }
            s.clone()
        }
        None => Subset::empty(),
    };
    let all: Vec<usize> = (0..n).collect();
    let fv = f.eval(&all);
    let mut rest = Vec::with_capacity(n);
    let tails: Vec<f64> = (0..n)
        .map(|j| {
            rest.clear();
            rest.extend(all.iter().copied().filter(|&e| e != j));
            (fv - f.eval(&rest)).max(0.0)
        })
        .collect();

    let mut iterates: Vec<Iterate> = Vec::new();
    let mut best = None;
    for t in 0..opts.max_iter.max(1) {
        let (w, constant) = supergradient(f, &x, &tails);
        let sol = solver.solve(&w, constant)?;
        let scored = score(&problem, f, sol.set.as_slice());
        let accept = match &best {
            None => true,
            Some((_, prev)) => improves(&problem, scored.objective, *prev),
        };
        debug!("sga iteration {t}: objective {}, accepted {accept}", scored.objective);
        if !accept {
            break;
        }
        iterates.push(Iterate {
            set: sol.set.clone(),
            objective: scored.objective,
        });
        best = Some((scored, scored.objective));
        x = sol.set;
    }
    let (scored, _) = best.expect("at least one iterate");
    let guarantee = match curvature(f, x.as_slice()) {
        Ok(c) => Guarantee::CurvatureEstimate {
            alpha: c.alpha,
            average_curvature: c.average_curvature,
        },
        Err(_) => Guarantee::None,
    };
    let (loads, budget_exceeded) = match problem {
        Problem::Knapsack { budget, .. } => (Vec::new(), scored.f > budget),
        _ => (Vec::new(), false),
    };
    Ok(SolveReport {
        problem: problem.tag(),
        algorithm: Algorithm::Sga,
        objective: scored.objective,
        f_value: scored.f,
        g_value: scored.g,
        surrogate_value: None,
        loads,
        winning_j: None,
        surrogate_winner: None,
        surrogate_best: None,
        seeded_winner: false,
        grid_size: 0,
        pieces_evaluated: iterates.len() as u64,
        early_stop_fired: false,
        heuristic: false,
        budget_exceeded,
        guarantee,
        iterates,
        pieces: None,
        set: x,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// [`sga_solve`] on a cooperative cost, also reporting component loads.
pub fn sga_solve_cooperative(problem: Problem<'_>, f: &CooperativeCost, opts: &SgaOptions) -> Result<SolveReport> {
    let mut r = sga_solve(problem, f, opts)?;
    r.loads = f.loads(r.set.as_slice());
    Ok(r)
}
