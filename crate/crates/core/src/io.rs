//! Instance and result files (JSON), comparison tables (CSV), and the
//! instance-level entry points used by the command line.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algorithms::{
    pla_coordinate_heuristic, pla_solve, sga_solve_cooperative, Guarantee, PlaOptions, Problem, SgaOptions,
    SolveReport, Solver,
};
use crate::concave::ConcaveSpec;
use crate::cost::{CooperativeCost, GroundSet, SetFunction, WeightVector};
use crate::error::{Error, Result};
use crate::experiments::{ComparisonRow, CorrespondenceInstance, SensorInstance};
use crate::greedy::{brute_force, KnapsackMode};
use crate::linear::ConstraintSpec;
use crate::oracle::SubmodularOracle;
use crate::piecewise::{verify_sandwich, verify_sandwich_exhaustive, PLCost, SandwichReport};
use crate::submodularity::{check_submodularity, CheckMode, SubmodularityReport};
use crate::subset::Subset;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub concave: ConcaveSpec,
    pub weights: WeightVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    ConstrainedMin { constraint: ConstraintSpec },
    Cover { oracle: SubmodularOracle, target: f64 },
    Knapsack { oracle: SubmodularOracle, budget: f64 },
    Ratio { oracle: SubmodularOracle },
}

impl ProblemSpec {
    pub fn as_problem(&self) -> Problem<'_> {
        match self {
            ProblemSpec::ConstrainedMin { constraint } => Problem::ConstrainedMin { constraint },
            ProblemSpec::Cover { oracle, target } => Problem::Cover { g: oracle, target: *target },
            ProblemSpec::Knapsack { oracle, budget } => Problem::Knapsack { g: oracle, budget: *budget },
            ProblemSpec::Ratio { oracle } => Problem::Ratio { g: oracle },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    pub algorithm: Solver,
    pub epsilon: f64,
    pub workers: usize,
    pub seed: u64,
    pub early_stop: bool,
    pub partial_enumeration: bool,
    pub max_sweeps: usize,
    pub max_iter: usize,
    pub warm_start: Option<Vec<usize>>,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            algorithm: Solver::Pla,
            epsilon: 0.1,
            workers: 1,
            seed: 0,
            early_stop: false,
            partial_enumeration: false,
            max_sweeps: 20,
            max_iter: 50,
            warm_start: None,
        }
    }
}

impl SolverParams {
    fn knapsack_mode(&self) -> KnapsackMode {
        if self.partial_enumeration {
            KnapsackMode::PartialEnumeration
        } else {
            KnapsackMode::MaxOfTwo
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub ground_set: GroundSet,
    pub cost: Vec<ComponentSpec>,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub solver: SolverParams,
}

/// Command-line overrides of [`SolverParams`].
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub algorithm: Option<Solver>,
    pub epsilon: Option<f64>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub partial_enumeration: bool,
}

impl InstanceFile {
    pub fn new(cost: &CooperativeCost, problem: ProblemSpec, solver: SolverParams) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            ground_set: GroundSet {
                n: cost.ground_size(),
                labels: None,
            },
            cost: cost
                .components()
                .iter()
                .map(|c| ComponentSpec {
                    concave: c.concave.clone(),
                    weights: c.weights.clone(),
                })
                .collect(),
            problem,
            solver,
        }
    }

    pub fn from_correspondence(inst: &CorrespondenceInstance, solver: SolverParams) -> Self {
        InstanceFile::new(
            &inst.cost,
            ProblemSpec::ConstrainedMin {
                constraint: inst.constraint.clone(),
            },
            solver,
        )
    }

    pub fn from_sensor(inst: &SensorInstance, solver: SolverParams) -> Self {
        InstanceFile::new(
            &inst.cost,
            ProblemSpec::Knapsack {
                oracle: inst.oracle.clone(),
                budget: inst.budget,
            },
            solver,
        )
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(a) = o.algorithm {
            self.solver.algorithm = a;
        }
        if let Some(e) = o.epsilon {
            self.solver.epsilon = e;
        }
        if let Some(w) = o.workers {
            self.solver.workers = w;
        }
        if let Some(s) = o.seed {
            self.solver.seed = s;
        }
        if o.partial_enumeration {
            self.solver.partial_enumeration = true;
        }
    }

    /// Semantic checks beyond the schema; returns the cost function.
    pub fn validate(&self) -> Result<CooperativeCost> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Schema {
                field: "version".into(),
                message: format!("unsupported version {}, expected {FORMAT_VERSION}", self.version),
            });
        }
        self.ground_set.validate()?;
        let n = self.ground_set.n;
        for (i, c) in self.cost.iter().enumerate() {
            if c.weights.len() != n {
                return Err(Error::Schema {
                    field: format!("cost[{i}].weights"),
                    message: format!("has {} entries, ground set has {n}", c.weights.len()),
                });
            }
        }
        let cost = CooperativeCost::new(self.cost.iter().map(|c| (c.concave.clone(), c.weights.clone())).collect())?;
        self.problem.as_problem().validate(n)?;
        let s = &self.solver;
        if !(s.epsilon.is_finite() && s.epsilon > 0.0) {
            return Err(Error::param("solver.epsilon", format!("{} must be > 0", s.epsilon)));
        }
        if let Some(ws) = &s.warm_start {
            if let Some(bad) = ws.iter().find(|&&e| e >= n) {
                return Err(Error::param("solver.warm_start", format!("element {bad} outside ground set of size {n}")));
            }
        }
        Ok(cost)
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    let mut text = String::new();
    fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
        .read_to_string(&mut text)?;
    parse_instance(&text)
}

pub fn instance_to_string(inst: &InstanceFile) -> Result<String> {
    serde_json::to_string_pretty(inst).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Solve an instance with its configured driver.
pub fn solve_instance(inst: &InstanceFile) -> Result<SolveReport> {
    let cost = inst.validate()?;
    let s = &inst.solver;
    let problem = inst.problem.as_problem();
    let pla = PlaOptions {
        epsilon: s.epsilon,
        workers: s.workers.max(1),
        early_stop: s.early_stop,
        knapsack_mode: s.knapsack_mode(),
        ..PlaOptions::default()
    };
    match s.algorithm {
        Solver::Pla => pla_solve(problem, &cost, &pla),
        Solver::PlaHeuristic => pla_coordinate_heuristic(problem, &cost, &pla, s.max_sweeps),
        Solver::Sga => sga_solve_cooperative(
            problem,
            &cost,
            &SgaOptions {
                max_iter: s.max_iter,
                warm_start: s.warm_start.as_ref().map(|w| Subset::from_elems(w.iter().copied())),
                knapsack_mode: s.knapsack_mode(),
            },
        ),
    }
}

/// A solve report with provenance, as written by `solve`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub version: String,
    pub timestamp_unix: u64,
    pub seed: u64,
    #[serde(flatten)]
    pub report: SolveReport,
}

impl ResultFile {
    pub fn new(report: SolveReport, seed: u64) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        ResultFile {
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp_unix,
            seed,
            report,
        }
    }
}

/// Machine-readable failure record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub error: String,
    pub field: Option<String>,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        let field = match e {
            Error::Schema { field, .. } => Some(field.clone()),
            Error::Parameter { name, .. } => Some(name.clone()),
            _ => None,
        };
        ErrorRecord {
            error: e.kind().into(),
            field,
            message: e.to_string(),
        }
    }
}

/// Process exit code for an error: 2 for infeasibility, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible { .. } => 2,
        _ => 1,
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ComparisonRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Io(e.to_string())))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub report: SolveReport,
    pub optimum: Subset,
    pub optimum_value: f64,
    /// `objective / OPT` for minimization, `OPT / objective` for knapsack;
    /// `1` is optimal.
    pub realized_ratio: f64,
    /// Factor the realized ratio is compared to (`None` when no bound applies).
    pub guaranteed_ratio: Option<f64>,
    pub within_guarantee: bool,
    pub sandwich: SandwichReport,
    pub submodularity: SubmodularityReport,
}

fn guaranteed_ratio(g: &Guarantee) -> Option<f64> {
    match *g {
        Guarantee::Approximation { factor } => Some(factor),
        Guarantee::Cover { realized_factor, .. } => Some(realized_factor),
        Guarantee::Budgeted { fraction, .. } => Some(1.0 / fraction),
        Guarantee::CurvatureEstimate { alpha, .. } => Some(alpha),
        Guarantee::None => None,
    }
}

/// Solve, then compare against exhaustive search and check the envelope and
/// submodularity of the cost.
pub fn verify_instance(inst: &InstanceFile, nmax: usize) -> Result<VerifyReport> {
    let cost = inst.validate()?;
    let n = cost.ground_size();
    let cap = nmax.min(crate::greedy::BRUTE_FORCE_CAP);
    if n > cap {
        return Err(Error::TooLarge(format!("ground set of {n} exceeds the verification limit {cap}")));
    }
    let report = solve_instance(inst)?;
    let problem = inst.problem.as_problem();
    let opt = brute_force(&cost, problem.to_brute())?;
    let realized_ratio = if problem.maximizes() {
        if report.objective > 0.0 {
            opt.value / report.objective
        } else if opt.value > 0.0 {
            f64::INFINITY
        } else {
            1.0
        }
    } else if opt.value > 0.0 {
        report.objective / opt.value
    } else if report.objective > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let guaranteed = guaranteed_ratio(&report.guarantee);
    let within_guarantee = guaranteed.is_none_or(|g| realized_ratio <= g * (1.0 + 1e-9));
    let plc = PLCost::build(&cost, inst.solver.epsilon, problem.constraint())?;
    let sandwich = if problem.constraint().is_some() {
        // loads of infeasible sets may fall outside the envelope's range
        let mut s = verify_sandwich(&cost, &plc, 0, inst.solver.seed);
        let feasible = opt_feasible_sandwich(&cost, &plc, &report.set, &opt.set);
        s.passed &= feasible;
        s
    } else {
        verify_sandwich_exhaustive(&cost, &plc)?
    };
    let submodularity = check_submodularity(&cost, CheckMode::Auto { trials: 2000 }, inst.solver.seed)?;
    Ok(VerifyReport {
        report,
        optimum: opt.set,
        optimum_value: opt.value,
        realized_ratio,
        guaranteed_ratio: guaranteed,
        within_guarantee,
        sandwich,
        submodularity,
    })
}

fn opt_feasible_sandwich(f: &CooperativeCost, plc: &PLCost, a: &Subset, b: &Subset) -> bool {
    [a, b].iter().all(|s| {
        let fv = f.eval(s.as_slice());
        let pl = plc.eval(f, s.as_slice());
        pl <= fv * (1.0 + 1e-9) + 1e-12 && fv <= plc.sandwich_factor() * pl * (1.0 + 1e-9) + 1e-12
    })
}
