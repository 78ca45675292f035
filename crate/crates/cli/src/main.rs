use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopsub::algorithms::Solver;
use coopsub::experiments::{
    gen_correspondence, gen_sensor, matching_rows, run_matching_seeds, run_sensor_seeds, sensor_rows, summarize,
    CorrespondenceParams, SensorParams,
};
use coopsub::io::{
    exit_code, read_instance, solve_instance, verify_instance, write_json, write_rows, ErrorRecord, InstanceFile,
    Overrides, ResultFile, SolverParams,
};
use coopsub::{Error, Result};

#[derive(Parser)]
#[command(name = "coopsub", version, about = "Submodular programs with cooperative costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Envelope accuracy.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Coordinate-descent search over pieces instead of full enumeration.
    #[arg(long, conflicts_with = "sga")]
    heuristic: bool,
    /// Supergradient descent instead of the piecewise-linear method.
    #[arg(long)]
    sga: bool,
    /// Partial-enumeration greedy for knapsack subproblems.
    #[arg(long)]
    partial_enumeration: bool,
}

impl SolverFlags {
    fn overrides(&self) -> Overrides {
        let algorithm = if self.heuristic {
            Some(Solver::PlaHeuristic)
        } else if self.sga {
            Some(Solver::Sga)
        } else {
            None
        };
        Overrides {
            algorithm,
            epsilon: self.epsilon,
            workers: self.workers,
            seed: self.seed,
            partial_enumeration: self.partial_enumeration,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Matching,
    Sensor,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write the result as JSON.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        flags: SolverFlags,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve, then compare with exhaustive search and check the cost.
    Verify {
        instance: PathBuf,
        #[command(flatten)]
        flags: SolverFlags,
        /// Largest ground set searched exhaustively.
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment over several seeds; writes rows.csv and summary.json.
    Compare {
        #[arg(value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic instance file.
    Gen {
        #[arg(value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Key points per image or sensor locations.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path, flags: &SolverFlags) -> Result<InstanceFile> {
    let mut inst = read_instance(path)?;
    inst.apply(&flags.overrides());
    Ok(inst)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { instance, flags, out } => {
            let inst = load(&instance, &flags)?;
            let report = solve_instance(&inst)?;
            log::info!("objective {} after {} pieces", report.objective, report.pieces_evaluated);
            emit(&ResultFile::new(report, inst.solver.seed), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            instance,
            flags,
            nmax,
            out,
        } => {
            let inst = load(&instance, &flags)?;
            let v = verify_instance(&inst, nmax)?;
            emit(&v, out.as_deref())?;
            let ok = v.within_guarantee && v.sandwich.passed && v.submodularity.passed;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Compare {
            experiment,
            seeds,
            seed,
            epsilon,
            workers,
            out,
        } => {
            let list: Vec<u64> = (seed..seed + seeds).collect();
            let (name, maximize, rows) = match experiment {
                Experiment::Matching => {
                    let r = run_matching_seeds(&CorrespondenceParams::default(), &list, epsilon, workers)?;
                    ("matching", false, matching_rows(&r))
                }
                Experiment::Sensor => {
                    let r = run_sensor_seeds(&SensorParams::default(), &list, epsilon, workers)?;
                    ("sensor", true, sensor_rows(&r))
                }
            };
            std::fs::create_dir_all(&out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            let csv = std::fs::File::create(out.join("rows.csv"))?;
            write_rows(csv, &rows)?;
            write_json(&out.join("summary.json"), &summarize(name, maximize, &rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            experiment,
            seed,
            size,
            out,
        } => {
            let solver = SolverParams {
                seed,
                epsilon: 0.5,
                ..SolverParams::default()
            };
            let file = match experiment {
                Experiment::Matching => {
                    let mut p = CorrespondenceParams { seed, ..Default::default() };
                    if let Some(s) = size {
                        p.points = s;
                    }
                    InstanceFile::from_correspondence(&gen_correspondence(&p)?, solver)
                }
                Experiment::Sensor => {
                    let mut p = SensorParams { seed, ..Default::default() };
                    if let Some(s) = size {
                        p.locations = s;
                    }
                    InstanceFile::from_sensor(&gen_sensor(&p)?, solver)
                }
            };
            emit(&file, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    let record = ErrorRecord::from(e);
    eprintln!("{}", serde_json::to_string(&record).unwrap_or_else(|_| record.message.clone()));
    ExitCode::from(exit_code(e) as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(&Error::Parameter {
                name: "arguments".into(),
                reason: e.to_string(),
            })
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}
