use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::algorithms::{pla_solve, sga_solve_cooperative, PlaOptions, Problem, SgaOptions};
use crate::concave::ConcaveSpec;
use crate::cost::{CooperativeCost, SetFunction, WeightVector};
use crate::error::{Error, Result};
use crate::greedy::agnostic_greedy;
use crate::oracle::SubmodularOracle;
use crate::piecewise::PLCost;
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorParams {
    pub locations: usize,
    pub types: usize,
    /// Knee positions of each discount curve as fractions of the group's
    /// total base cost, increasing.
    pub knees: Vec<f64>,
    /// Marginal price on each stretch between knees (first stretch first);
    /// one more entry than `knees`, decreasing.
    pub prices: Vec<f64>,
    /// Budget as a fraction of `f(V)`.
    pub budget_fraction: f64,
    /// RBF bandwidth of the similarity kernel.
    pub bandwidth: f64,
    pub seed: u64,
}

impl Default for SensorParams {
    fn default() -> Self {
        SensorParams {
            locations: 40,
            types: 3,
            knees: vec![0.1, 0.25, 0.45],
            prices: vec![1.0, 0.6, 0.35, 0.15],
            budget_fraction: 0.25,
            bandwidth: 1.5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorInstance {
    pub locations: Vec<[f64; 2]>,
    pub types: Vec<usize>,
    pub base_costs: Vec<f64>,
    pub cost: CooperativeCost,
    pub oracle: SubmodularOracle,
    pub budget: f64,
}

/// Piecewise-linear concave curve through the origin with the given knees
/// (absolute loads) and stretch prices; the final knot closes the last stretch
/// at `end`.
fn discount_curve(knees: &[f64], prices: &[f64], end: f64) -> Result<ConcaveSpec> {
    let mut points = vec![(0.0, 0.0)];
    let mut y = 0.0;
    let mut x = 0.0;
    for (i, &kx) in knees.iter().chain(std::iter::once(&end)).enumerate() {
        y += prices[i] * (kx - x);
        x = kx;
        points.push((x, y));
    }
    ConcaveSpec::explicit_pl(points)
}

/// Random locations in a 10x10 square with `types` location classes and
/// log-normal base costs; cost per class is a volume-discount curve and the
/// objective is facility-location coverage of the locations themselves.
pub fn gen_sensor(p: &SensorParams) -> Result<SensorInstance> {
    if p.locations == 0 || p.types == 0 || p.types > p.locations {
        return Err(Error::param("types", "need locations >= types >= 1"));
    }
    if p.prices.len() != p.knees.len() + 1 {
        return Err(Error::param("prices", "need exactly one more price than knees"));
    }
    if p.knees.windows(2).any(|w| w[0] >= w[1]) || p.knees.iter().any(|&k| !(k > 0.0 && k < 1.0)) {
        return Err(Error::param("knees", "must be increasing fractions in (0, 1)"));
    }
    if !(p.bandwidth.is_finite() && p.bandwidth > 0.0) {
        return Err(Error::param("bandwidth", "must be positive"));
    }
    if !(p.budget_fraction.is_finite() && p.budget_fraction >= 0.0) {
        return Err(Error::param("budget_fraction", "must be finite and >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.locations;
    let locations: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)])
        .collect();
    let types: Vec<usize> = (0..n).map(|j| if j < p.types { j } else { rng.gen_range(0..p.types) }).collect();
    let price = LogNormal::new(0.0, 0.5).expect("valid log-normal");
    let base_costs: Vec<f64> = (0..n).map(|_| price.sample(&mut rng)).collect();

    let mut components = Vec::with_capacity(p.types);
    for t in 0..p.types {
        let w: Vec<f64> = (0..n).map(|j| if types[j] == t { base_costs[j] } else { 0.0 }).collect();
        let total: f64 = w.iter().sum();
        let knees: Vec<f64> = p.knees.iter().map(|k| k * total).collect();
        components.push((discount_curve(&knees, &p.prices, total)?, WeightVector::new(w)?));
    }
    let cost = CooperativeCost::new(components)?;
    let h2 = 2.0 * p.bandwidth * p.bandwidth;
    let similarity: Vec<Vec<f64>> = locations
        .iter()
        .map(|a| {
            locations
                .iter()
                .map(|b| (-((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)) / h2).exp())
                .collect()
        })
        .collect();
    let oracle = SubmodularOracle::FacilityLocation { similarity };
    let budget = p.budget_fraction * cost.eval(&(0..n).collect::<Vec<_>>());
    Ok(SensorInstance {
        locations,
        types,
        base_costs,
        cost,
        oracle,
        budget,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorOutcome {
    pub set: Subset,
    /// Coverage `g`.
    pub objective: f64,
    pub cost: f64,
    pub surrogate_cost: f64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorComparison {
    pub pla: SensorOutcome,
    pub sga: SensorOutcome,
    pub agnostic: SensorOutcome,
}

/// Budgeted coverage three ways: piecewise-linear approximation,
/// supergradient method, and greedy on coverage alone stopped by the budget.
pub fn run_sensor_experiment(inst: &SensorInstance, epsilon: f64, workers: usize) -> Result<SensorComparison> {
    let plc = PLCost::build(&inst.cost, epsilon, None)?;
    let problem = Problem::Knapsack {
        g: &inst.oracle,
        budget: inst.budget,
    };
    let opts = PlaOptions {
        epsilon,
        workers,
        ..PlaOptions::default()
    };
    let outcome = |set: Subset, wall: f64| SensorOutcome {
        objective: inst.oracle.eval(set.as_slice()),
        cost: inst.cost.eval(set.as_slice()),
        surrogate_cost: plc.eval(&inst.cost, set.as_slice()),
        set,
        wall_time_ms: wall,
    };
    let pla = pla_solve(problem, &inst.cost, &opts)?;
    let sga = sga_solve_cooperative(problem, &inst.cost, &SgaOptions::default())?;
    let started = std::time::Instant::now();
    let ag = agnostic_greedy(&inst.oracle, |s| inst.cost.eval(s) <= inst.budget);
    let ag_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(SensorComparison {
        pla: outcome(pla.set, pla.wall_time_ms),
        sga: outcome(sga.set, sga.wall_time_ms),
        agnostic: outcome(ag, ag_ms),
    })
}
