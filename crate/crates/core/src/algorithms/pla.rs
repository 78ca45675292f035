use std::cmp::Ordering;
use std::collections::HashMap;
use std::time::Instant;

use log::{info, warn};

use super::report::{Algorithm, Guarantee, PieceIndex, PieceRecord, SolveReport};
use super::{score, ModularSolver, Problem, Scored};
use crate::cost::{CooperativeCost, SetFunction};
use crate::error::{Error, Result};
use crate::greedy::KnapsackMode;
use crate::piecewise::{PLCost, PLEnvelope};
use crate::subset::{compensated_sum, Subset};

/// Relative slack when testing whether a load lies in its segment.
const RANGE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct PlaOptions {
    pub epsilon: f64,
    pub workers: usize,
    /// Stop at the first piece whose solution lies inside its own segments
    /// (forces sequential enumeration).
    pub early_stop: bool,
    pub max_components: usize,
    /// Log a warning above this many pieces.
    pub piece_warning: u128,
    /// Refuse to enumerate more pieces than this.
    pub piece_limit: u128,
    pub knapsack_mode: KnapsackMode,
    pub record_pieces: bool,
    /// Extra candidate sets compared on the true objective.
    pub seeds: Vec<Subset>,
}

impl Default for PlaOptions {
    fn default() -> Self {
        PlaOptions {
            epsilon: 0.1,
            workers: 1,
            early_stop: false,
            max_components: 6,
            piece_warning: 10_000_000,
            piece_limit: 1_000_000_000,
            knapsack_mode: KnapsackMode::MaxOfTwo,
            record_pieces: false,
            seeds: Vec::new(),
        }
    }
}

/// A maximal run of collinear envelope segments, solved once.
#[derive(Clone, Copy, Debug)]
struct Piece {
    slope: f64,
    intercept: f64,
    lo: f64,
    hi: f64,
    /// Segment index of the first segment in the run.
    first: usize,
}

fn collinear(a: (f64, f64), b: (f64, f64), scale: f64) -> bool {
    let ds = (a.0 - b.0).abs() <= 1e-12 * a.0.abs().max(b.0.abs());
    let dc = (a.1 - b.1).abs() <= 1e-12 * a.1.abs().max(b.1.abs()).max(scale);
    ds && dc
}

fn merge_segments(env: &PLEnvelope) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::new();
    for j in 0..env.segment_count() {
        let (slope, intercept) = env.segment(j);
        let (lo, hi) = env.segment_range(j);
        if let Some(last) = out.last_mut() {
            let scale = slope.abs() * lo;
            if collinear((last.slope, last.intercept), (slope, intercept), scale) {
                last.hi = hi;
                continue;
            }
        }
        out.push(Piece {
            slope,
            intercept,
            lo,
            hi,
            first: j,
        });
    }
    out
}

fn constant_piece() -> Piece {
    Piece {
        slope: 0.0,
        intercept: 0.0,
        lo: 0.0,
        hi: f64::INFINITY,
        first: 0,
    }
}

fn in_range(y: f64, lo: f64, hi: f64) -> bool {
    y >= lo * (1.0 - RANGE_TOLERANCE) && y <= hi * (1.0 + RANGE_TOLERANCE)
}

/// True when every load `w_i(X)` lies inside the segment `j_i` selected for
/// component `i` (extended over collinear neighbours), i.e. the surrogate
/// that produced `X` coincides with `f^PL` at `X`.
pub fn pla_early_stop_check(j: &PieceIndex, f: &CooperativeCost, set: &[usize], plc: &PLCost) -> bool {
    let loads = f.loads(set);
    plc.envelopes().iter().zip(&j.0).zip(&loads).all(|((env, &ji), &y)| match env {
        None => true,
        Some(env) => {
            if ji >= env.segment_count() {
                return false;
            }
            let pieces = merge_segments(env);
            let p = pieces.iter().rev().find(|p| p.first <= ji).expect("segment 0 starts a run");
            in_range(y, p.lo, p.hi)
        }
    })
}

#[derive(Clone, Debug)]
struct Candidate {
    idx: u64,
    js: Vec<usize>,
    set: Subset,
    scored: Scored,
    key: f64,
    surrogate: f64,
    surrogate_key: f64,
    cover_ratio: Option<f64>,
    loads: Vec<f64>,
}

fn better(a_key: f64, a_idx: u64, b_key: f64, b_idx: u64) -> bool {
    match a_key.total_cmp(&b_key) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a_idx < b_idx,
    }
}

struct Engine<'a> {
    problem: Problem<'a>,
    f: &'a CooperativeCost,
    plc: PLCost,
    grid: Vec<Vec<Piece>>,
    solver: ModularSolver<'a>,
}

impl<'a> Engine<'a> {
    fn new(problem: Problem<'a>, f: &'a CooperativeCost, opts: &PlaOptions) -> Result<Self> {
        let n = f.ground_size();
        problem.validate(n)?;
        if !(opts.epsilon.is_finite() && opts.epsilon > 0.0) {
            return Err(Error::param("epsilon", format!("{} must be > 0", opts.epsilon)));
        }
        let active = f.components().iter().filter(|c| !c.weights.is_zero()).count();
        if active > opts.max_components {
            return Err(Error::TooLarge(format!(
                "{active} nonconstant components exceed the cap of {}",
                opts.max_components
            )));
        }
        let solver = ModularSolver::new(problem, opts.knapsack_mode, n)?;
        let plc = PLCost::build(f, opts.epsilon, problem.constraint())?;
        let grid: Vec<Vec<Piece>> = plc
            .envelopes()
            .iter()
            .map(|e| e.as_ref().map_or_else(|| vec![constant_piece()], merge_segments))
            .collect();
        let full = plc.piece_count();
        if full > opts.piece_limit {
            return Err(Error::TooLarge(format!(
                "{full} pieces exceed the limit of {}",
                opts.piece_limit
            )));
        }
        if full > opts.piece_warning {
            warn!("enumerating {full} pieces");
        }
        Ok(Engine {
            problem,
            f,
            plc,
            grid,
            solver,
        })
    }

    fn total(&self) -> u64 {
        self.grid.iter().map(|g| g.len() as u64).product()
    }

    fn decode(&self, mut idx: u64) -> Vec<usize> {
        let mut js = vec![0; self.grid.len()];
        for i in (0..self.grid.len()).rev() {
            let d = self.grid[i].len() as u64;
            js[i] = (idx % d) as usize;
            idx /= d;
        }
        js
    }

    fn encode(&self, js: &[usize]) -> u64 {
        js.iter()
            .zip(&self.grid)
            .fold(0u64, |acc, (&j, g)| acc * g.len() as u64 + j as u64)
    }

    fn public_j(&self, js: &[usize]) -> PieceIndex {
        PieceIndex(js.iter().zip(&self.grid).map(|(&j, g)| g[j].first).collect())
    }

    /// Piece active at given loads (lowest index on ties).
    fn active_at(&self, loads: &[f64]) -> Vec<usize> {
        self.grid
            .iter()
            .zip(loads)
            .map(|(pieces, &y)| {
                let mut best = 0;
                for (j, p) in pieces.iter().enumerate() {
                    let b = &pieces[best];
                    if p.slope * y + p.intercept < b.slope * y + b.intercept {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }

    fn fires(&self, js: &[usize], loads: &[f64]) -> bool {
        js.iter()
            .zip(&self.grid)
            .zip(loads)
            .all(|((&j, g), &y)| in_range(y, g[j].lo, g[j].hi))
    }

    fn evaluate(&self, js: &[usize], idx: u64, w: &mut Vec<f64>) -> Result<Option<Candidate>> {
        let n = self.f.ground_size();
        w.clear();
        w.resize(n, 0.0);
        let mut intercepts = Vec::with_capacity(js.len());
        for ((&j, pieces), comp) in js.iter().zip(&self.grid).zip(self.f.components()) {
            let p = pieces[j];
            intercepts.push(p.intercept);
            if p.slope != 0.0 {
                for (acc, &we) in w.iter_mut().zip(comp.weights.values()) {
                    *acc += p.slope * we;
                }
            }
        }
        let offset = compensated_sum(intercepts);
        let sol = match self.solver.solve(w, offset) {
            Ok(s) => s,
            Err(Error::Infeasible { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let loads = self.f.loads(sol.set.as_slice());
        if let Problem::Knapsack { budget, .. } = self.problem {
            let pl = self.plc.eval_loads(&loads);
            if pl > budget {
                warn!("piece {idx}: surrogate cost {pl} exceeds budget {budget}, discarded");
                return Ok(None);
            }
        }
        let scored = score(&self.problem, self.f, sol.set.as_slice());
        let sign = if self.problem.maximizes() { -1.0 } else { 1.0 };
        Ok(Some(Candidate {
            idx,
            js: js.to_vec(),
            key: scored.key(&self.problem),
            scored,
            surrogate: sol.surrogate,
            surrogate_key: sign * sol.surrogate,
            cover_ratio: sol.cover_ratio,
            set: sol.set,
            loads,
        }))
    }
}

#[derive(Default)]
struct Sweep {
    best: Option<Candidate>,
    surrogate_best: Option<Candidate>,
    evaluated: u64,
    max_cover_ratio: f64,
    fired: bool,
    records: Vec<PieceRecord>,
}

impl Sweep {
    fn offer(&mut self, c: Candidate) {
        if let Some(r) = c.cover_ratio {
            self.max_cover_ratio = self.max_cover_ratio.max(r);
        }
        if self
            .surrogate_best
            .as_ref()
            .is_none_or(|b| better(c.surrogate_key, c.idx, b.surrogate_key, b.idx))
        {
            self.surrogate_best = Some(c.clone());
        }
        if self.best.as_ref().is_none_or(|b| better(c.key, c.idx, b.key, b.idx)) {
            self.best = Some(c);
        }
    }

    fn merge(&mut self, other: Sweep) {
        self.evaluated += other.evaluated;
        self.fired |= other.fired;
        self.records.extend(other.records);
        self.max_cover_ratio = self.max_cover_ratio.max(other.max_cover_ratio);
        for c in other.surrogate_best.into_iter() {
            if self
                .surrogate_best
                .as_ref()
                .is_none_or(|b| better(c.surrogate_key, c.idx, b.surrogate_key, b.idx))
            {
                self.surrogate_best = Some(c);
            }
        }
        for c in other.best.into_iter() {
            if self.best.as_ref().is_none_or(|b| better(c.key, c.idx, b.key, b.idx)) {
                self.best = Some(c);
            }
        }
    }
}

fn record(engine: &Engine, js: &[usize], cand: Option<&Candidate>) -> PieceRecord {
    PieceRecord {
        j: engine.public_j(js),
        set: cand.map(|c| c.set.clone()),
        surrogate: cand.map(|c| c.surrogate),
        objective: cand.map(|c| c.scored.objective),
    }
}

fn sweep_range(engine: &Engine, start: u64, end: u64, opts: &PlaOptions) -> Result<Sweep> {
    let mut out = Sweep::default();
    let mut w = Vec::new();
    for idx in start..end {
        let js = engine.decode(idx);
        let cand = engine.evaluate(&js, idx, &mut w)?;
        out.evaluated += 1;
        if opts.record_pieces {
            out.records.push(record(engine, &js, cand.as_ref()));
        }
        let Some(c) = cand else { continue };
        let fires = opts.early_stop && engine.problem.tag() <= 3 && engine.fires(&c.js, &c.loads);
        out.offer(c);
        if fires {
            out.fired = true;
            break;
        }
    }
    Ok(out)
}

fn guarantee(engine: &Engine, opts: &PlaOptions, max_cover_ratio: f64) -> Guarantee {
    let sf = engine.plc.sandwich_factor();
    let e = std::f64::consts::E;
    match engine.problem {
        Problem::ConstrainedMin { .. } => Guarantee::Approximation { factor: sf },
        Problem::Cover { .. } => {
            let gv = engine.solver.g_full();
            Guarantee::Cover {
                bicriteria: [sf, 1.0 - 1.0 / e],
                integral_factor: sf * (1.0 + gv.max(1.0).ln()),
                realized_factor: sf * (1.0 + max_cover_ratio.max(1.0).ln()),
            }
        }
        Problem::Knapsack { .. } => Guarantee::Budgeted {
            fraction: opts.knapsack_mode.factor(),
            surrogate_factor: sf,
        },
        Problem::Ratio { .. } => Guarantee::Approximation { factor: sf * e / (e - 1.0) },
    }
}

/// Offer the user-supplied seed sets; returns the winning seed if one beats
/// every piece.
fn seeded_winner(engine: &Engine, opts: &PlaOptions, best: Option<&Candidate>) -> Result<Option<Candidate>> {
    let n = engine.f.ground_size();
    let mut winner: Option<Candidate> = None;
    for seed in &opts.seeds {
        if let Some(&bad) = seed.iter().find(|&e| e >= n).as_ref() {
            return Err(Error::param("seeds", format!("element {bad} outside ground set of size {n}")));
        }
        let loads = engine.f.loads(seed.as_slice());
        let pl = engine.plc.eval_loads(&loads);
        if !engine.solver.admits(seed, pl) {
            continue;
        }
        let scored = score(&engine.problem, engine.f, seed.as_slice());
        let key = scored.key(&engine.problem);
        let beats_pieces = best.is_none_or(|b| key < b.key);
        let beats_seeds = winner.as_ref().is_none_or(|w| key < w.key);
        if beats_pieces && beats_seeds {
            let js = engine.active_at(&loads);
            winner = Some(Candidate {
                idx: u64::MAX,
                js,
                set: seed.clone(),
                scored,
                key,
                surrogate: pl,
                surrogate_key: f64::INFINITY,
                cover_ratio: None,
                loads,
            });
        }
    }
    Ok(winner)
}

fn finish(
    engine: &Engine,
    opts: &PlaOptions,
    sweep: Sweep,
    algorithm: Algorithm,
    started: Instant,
) -> Result<SolveReport> {
    let seeded = seeded_winner(engine, opts, sweep.best.as_ref())?;
    let seeded_winner = seeded.is_some();
    let Some(best) = seeded.or(sweep.best) else {
        return Err(Error::infeasible(
            "pla",
            format!("every one of the {} pieces is infeasible", sweep.evaluated),
        ));
    };
    let surrogate_value = engine.plc.eval_loads(&best.loads);
    let budget_exceeded = match engine.problem {
        Problem::Knapsack { budget, .. } => best.scored.f > budget,
        _ => false,
    };
    let heuristic = algorithm == Algorithm::PlaHeuristic;
    let guarantee = if heuristic {
        Guarantee::None
    } else {
        guarantee(engine, opts, sweep.max_cover_ratio)
    };
    info!(
        "pla: {} pieces of {}, objective {}",
        sweep.evaluated,
        engine.plc.piece_count(),
        best.scored.objective
    );
    Ok(SolveReport {
        problem: engine.problem.tag(),
        algorithm,
        objective: best.scored.objective,
        f_value: best.scored.f,
        g_value: best.scored.g,
        surrogate_value: Some(surrogate_value),
        winning_j: Some(engine.public_j(&best.js)),
        surrogate_winner: sweep.surrogate_best.as_ref().map(|c| engine.public_j(&c.js)),
        surrogate_best: sweep.surrogate_best.as_ref().map(|c| c.surrogate),
        seeded_winner,
        grid_size: engine.plc.piece_count(),
        pieces_evaluated: sweep.evaluated,
        early_stop_fired: sweep.fired,
        heuristic,
        budget_exceeded,
        guarantee,
        iterates: Vec::new(),
        pieces: opts.record_pieces.then_some(sweep.records),
        loads: best.loads,
        set: best.set,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Piecewise-linear approximation: solve the modular program of every piece
/// index and keep the best set under the true objective.
pub fn pla_solve(problem: Problem<'_>, f: &CooperativeCost, opts: &PlaOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let engine = Engine::new(problem, f, opts)?;
    let total = engine.total();
    let workers = if opts.early_stop {
        1
    } else {
        (opts.workers.max(1) as u64).min(total.max(1))
    };
    let sweep = if workers == 1 {
        sweep_range(&engine, 0, total, opts)?
    } else {
        let bounds: Vec<(u64, u64)> = (0..workers)
            .map(|w| {
                let lo = (total as u128 * w as u128 / workers as u128) as u64;
                let hi = (total as u128 * (w + 1) as u128 / workers as u128) as u64;
                (lo, hi)
            })
            .collect();
        let parts: Vec<Result<Sweep>> = std::thread::scope(|s| {
            let handles: Vec<_> = bounds
                .iter()
                .map(|&(lo, hi)| {
                    let engine = &engine;
                    s.spawn(move || sweep_range(engine, lo, hi, opts))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut all = Sweep::default();
        for p in parts {
            all.merge(p?);
        }
        all.records.sort_by(|a, b| a.j.cmp(&b.j));
        all
    };
    finish(&engine, opts, sweep, Algorithm::Pla, started)
}

/// Coordinate-wise walk over piece indices: starting from segment 1 of every
/// component, move `j_i` down when `w_i(X_J)` falls below its segment and up
/// when it exceeds it, until the solution sits inside its own segments, `J`
/// stops changing, or `max_sweeps` passes are done.
pub fn pla_coordinate_heuristic(
    problem: Problem<'_>,
    f: &CooperativeCost,
    opts: &PlaOptions,
    max_sweeps: usize,
) -> Result<SolveReport> {
    let started = Instant::now();
    let engine = Engine::new(problem, f, opts)?;
    let k = engine.grid.len();
    let mut js: Vec<usize> = engine.grid.iter().map(|g| usize::from(g.len() > 1)).collect();
    let mut cache: HashMap<u64, Option<Candidate>> = HashMap::new();
    let mut sweep = Sweep::default();
    let mut w = Vec::new();
    let mut visit = |js: &[usize], sweep: &mut Sweep| -> Result<Option<Candidate>> {
        let idx = engine.encode(js);
        if let Some(c) = cache.get(&idx) {
            return Ok(c.clone());
        }
        let cand = engine.evaluate(js, idx, &mut w)?;
        sweep.evaluated += 1;
        if opts.record_pieces {
            sweep.records.push(record(&engine, js, cand.as_ref()));
        }
        if let Some(c) = &cand {
            sweep.offer(c.clone());
        }
        cache.insert(idx, cand.clone());
        Ok(cand)
    };
    let stops = |c: &Candidate| engine.problem.tag() <= 3 && engine.fires(&c.js, &c.loads);
    let mut cur = visit(&js, &mut sweep)?;
    'outer: for _ in 0..max_sweeps {
        let mut moved = false;
        for i in 0..k {
            let step = match &cur {
                None => (js[i] > 0).then(|| js[i] - 1),
                Some(c) => {
                    if stops(c) {
                        sweep.fired = true;
                        break 'outer;
                    }
                    let p = engine.grid[i][js[i]];
                    let y = c.loads[i];
                    if y < p.lo * (1.0 - RANGE_TOLERANCE) && js[i] > 0 {
                        Some(js[i] - 1)
                    } else if y > p.hi * (1.0 + RANGE_TOLERANCE) && js[i] + 1 < engine.grid[i].len() {
                        Some(js[i] + 1)
                    } else {
                        None
                    }
                }
            };
            if let Some(j) = step {
                js[i] = j;
                moved = true;
                cur = visit(&js, &mut sweep)?;
            }
        }
        if !moved {
            break;
        }
    }
    if !sweep.fired {
        sweep.fired = cur.as_ref().is_some_and(stops);
    }
    finish(&engine, opts, sweep, Algorithm::PlaHeuristic, started)
}
