//! The `ftp` command line: solve, check, gap, bench and gen.
//!
//! Exit codes: 0 success, 1 bench found nothing to run, 2 infeasible
//! instance, 3 parse or validation error, 4 caps exceeded.

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::approx::{approx_k, approx_kplus1, shortest_path};
use crate::bipath::solve_1ftp;
use crate::dag::{solve_kftp_dag_with, DagConfig, DEFAULT_CONFIG_CAP};
use crate::document::{self, Format};
use crate::error::{Error, Result};
use crate::frac::{gap_family, gap_report_with, solve_frac_with, CapacityVector, FracConfig};
use crate::gen::{self, GenParams};
use crate::instance::{feasibility_witness, EdgeId, Instance, Solution, Status, DEFAULT_SCENARIO_CAP};
use crate::oracle::{brute_force_opt, OracleConfig};
use crate::srp::{decompose_srp, solve_ftp_srp, DecompositionTree};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOTHING: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_CAPS: i32 = 4;

pub const LOG_DIR_VAR: &str = "FTP_LOG_DIR";
pub const LOG_FILE: &str = "runs.jsonl";

#[derive(Debug, Parser)]
#[command(name = "ftp", version, about = "Fault-tolerant path solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Caps {
    /// Largest number of failure scenarios an exhaustive method may enumerate.
    #[arg(long, default_value_t = DEFAULT_SCENARIO_CAP)]
    pub cap_scenarios: u128,
    /// Largest estimated number of DAG configurations.
    #[arg(long, default_value_t = DEFAULT_CONFIG_CAP)]
    pub cap_configs: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            cap_scenarios: DEFAULT_SCENARIO_CAP,
            cap_configs: DEFAULT_CONFIG_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Auto,
    Bipath,
    Dag,
    Srp,
    #[value(name = "approx-k")]
    ApproxK,
    #[value(name = "approx-k1")]
    ApproxK1,
    Oracle,
    Frac,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Dag,
    Srp,
    Gap,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print the solution.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Auto)]
        algorithm: Algorithm,
        /// Decomposition expression for `srp`, e.g. `P(e0,S(e1,e2))`.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Native)]
        format: Format,
        #[command(flatten)]
        caps: Caps,
    },
    /// Check whether a solution survives every failure scenario.
    Check {
        path: PathBuf,
        solution: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Native)]
        format: Format,
    },
    /// Integral against fractional optimum on the parallel-edge family.
    Gap {
        d: usize,
        k: usize,
        #[command(flatten)]
        caps: Caps,
    },
    /// Run every applicable solver on each instance in a directory.
    Bench {
        dir: PathBuf,
        /// Results log, appended to.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Native)]
        format: Format,
        #[command(flatten)]
        caps: Caps,
    },
    /// Print a generated instance.
    Gen {
        #[arg(long, value_enum, default_value_t = Family::Random)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        #[arg(long, default_value_t = 10)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value_t = 0.5)]
        faulty_prob: f64,
        #[arg(long, default_value_t = 10)]
        max_cost: i64,
        /// Series or parallel steps for `srp`.
        #[arg(long, default_value_t = 8)]
        compositions: usize,
        /// Parallel edge count for `gap`.
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, value_enum, default_value_t = Format::Native)]
        format: Format,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_digest: String,
    pub solver: String,
    pub edges: Vec<EdgeId>,
    /// Integer or exact rational; absent when the run failed.
    pub cost: Option<String>,
    pub status: String,
    pub wall_time_ms: f64,
    pub version: String,
}

/// Appends one JSON line; earlier records are never touched.
pub fn append_record(path: &Path, record: &RunRecord) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut line = serde_json::to_string(record).map_err(std::io::Error::other)?;
    line.push('\n');
    OpenOptions::new().create(true).append(true).open(path)?.write_all(line.as_bytes())
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Infeasible | Error::FlowInfeasible { .. } => EXIT_INFEASIBLE,
        e if e.is_cap_exceeded() => EXIT_CAPS,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Integral {
        solver: &'static str,
        solution: Solution,
        /// Costs for budgets `0..=k` when the series-parallel solver ran.
        table: Option<Vec<Option<i64>>>,
    },
    Fractional(CapacityVector),
}

impl Outcome {
    fn solver(&self) -> &'static str {
        match self {
            Outcome::Integral { solver, .. } => solver,
            Outcome::Fractional(_) => "frac",
        }
    }

    fn record(&self, instance: &Instance, wall_time_ms: f64) -> RunRecord {
        let (edges, cost, status) = match self {
            Outcome::Integral { solution, .. } => (solution.edges.clone(), solution.cost.to_string(), solution.status.to_string()),
            Outcome::Fractional(x) => (
                x.x.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i).collect(),
                x.value.to_string(),
                "fractional".into(),
            ),
        };
        RunRecord {
            instance_digest: document::digest(instance),
            solver: self.solver().into(),
            edges,
            cost: Some(cost),
            status,
            wall_time_ms,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

fn srp_outcome(instance: &Instance, tree: &DecompositionTree) -> Result<Outcome> {
    let table = solve_ftp_srp(instance, tree)?;
    let costs = table.costs();
    let solution = table.entries.into_iter().nth(instance.k).flatten().ok_or(Error::Infeasible)?;
    Ok(Outcome::Integral {
        solver: "srp",
        solution,
        table: Some(costs),
    })
}

/// Runs one algorithm. `auto` uses the shortest path for `k = 0`, the
/// 1-FTP solver for `k = 1`, the DAG solver for acyclic directed inputs
/// within caps, the series-parallel solver when the graph decomposes, and
/// the k-approximation otherwise.
pub fn solve_with(instance: &Instance, algorithm: Algorithm, caps: Caps, tree: Option<&DecompositionTree>) -> Result<Outcome> {
    instance.validate()?;
    let integral = |solver, solution| Outcome::Integral { solver, solution, table: None };
    let dag = DagConfig { config_cap: caps.cap_configs };
    Ok(match algorithm {
        Algorithm::Auto => {
            if instance.k == 0 {
                integral("shortest-path", shortest_path(instance)?)
            } else if instance.k == 1 {
                integral("bipath", solve_1ftp(instance)?)
            } else if instance.directed {
                match solve_kftp_dag_with(instance, dag) {
                    Ok(sol) => integral("dag", sol),
                    Err(Error::NotADag(_)) => integral("approx-k", approx_k(instance)?),
                    Err(e) if e.is_cap_exceeded() => integral("approx-k", approx_k(instance)?),
                    Err(e) => return Err(e),
                }
            } else {
                match decompose_srp(instance) {
                    Ok(tree) => srp_outcome(instance, &tree)?,
                    Err(Error::NotSeriesParallel(_)) => integral("approx-k", approx_k(instance)?),
                    Err(e) => return Err(e),
                }
            }
        }
        Algorithm::Bipath => integral("bipath", solve_1ftp(instance)?),
        Algorithm::Dag => integral("dag", solve_kftp_dag_with(instance, dag)?),
        Algorithm::Srp => match tree {
            Some(tree) => srp_outcome(instance, tree)?,
            None => srp_outcome(instance, &decompose_srp(instance)?)?,
        },
        Algorithm::ApproxK => integral("approx-k", approx_k(instance)?),
        Algorithm::ApproxK1 => integral("approx-k1", approx_kplus1(instance)?),
        Algorithm::Oracle => {
            let config = OracleConfig { scenario_cap: caps.cap_scenarios, ..Default::default() };
            integral("oracle", brute_force_opt(instance, config)?.best.ok_or(Error::Infeasible)?)
        }
        Algorithm::Frac => {
            let config = FracConfig { scenario_cap: caps.cap_scenarios, ..Default::default() };
            Outcome::Fractional(solve_frac_with(instance, config)?)
        }
    })
}

#[derive(Serialize)]
struct SolutionDoc<'a> {
    solver: &'a str,
    status: String,
    cost: i64,
    ratio_bound: Option<String>,
    edges: &'a [EdgeId],
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<&'a [Option<i64>]>,
}

#[derive(Serialize)]
struct FracDoc {
    solver: &'static str,
    value: String,
    x: Vec<String>,
}

fn ratio_bound(status: Status) -> Option<String> {
    match status {
        Status::RatioBounded { numerator, denominator: 1 } => Some(numerator.to_string()),
        Status::RatioBounded { numerator, denominator } => Some(format!("{numerator}/{denominator}")),
        _ => None,
    }
}

/// The document printed by `solve`; no timings, so it is reproducible.
pub fn outcome_document(outcome: &Outcome) -> String {
    let json = match outcome {
        Outcome::Integral { solver, solution, table } => serde_json::to_string_pretty(&SolutionDoc {
            solver,
            status: solution.status.to_string(),
            cost: solution.cost,
            ratio_bound: ratio_bound(solution.status),
            edges: &solution.edges,
            table: table.as_deref(),
        }),
        Outcome::Fractional(x) => serde_json::to_string_pretty(&FracDoc {
            solver: "frac",
            value: x.value.to_string(),
            x: x.x.iter().map(ToString::to_string).collect(),
        }),
    };
    json.expect("plain data serializes")
}

/// Reads the edge ids of a solution: a document printed by `solve`, or a
/// bare whitespace- or comma-separated id list.
pub fn parse_solution_ids(text: &str) -> Result<Vec<EdgeId>> {
    if let Ok(doc @ serde_json::Value::Object(_)) = serde_json::from_str::<serde_json::Value>(text) {
        let edges = doc.get("edges").and_then(|e| e.as_array()).ok_or_else(|| Error::parse(1, "solution document has no edge list"))?;
        return edges
            .iter()
            .map(|v| v.as_u64().map(|id| id as EdgeId).ok_or_else(|| Error::parse(1, format!("bad edge id {v}"))))
            .collect();
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .map(|w| w.parse().map_err(|_| Error::parse(1, format!("bad edge id {w:?}"))))
        .collect()
}

#[derive(Serialize)]
struct CheckDoc {
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<Vec<EdgeId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cut: Option<Vec<EdgeId>>,
}

#[derive(Serialize)]
struct GapDoc {
    d: usize,
    k: usize,
    integral_opt: i64,
    fractional_opt: String,
    ratio: String,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::parse(0, format!("{}: {e}", path.display())))
}

fn load(path: &Path, format: Format) -> Result<Instance> {
    document::parse(&read(path)?, format)
}

fn log_path() -> Option<PathBuf> {
    std::env::var_os(LOG_DIR_VAR).map(|d| PathBuf::from(d).join(LOG_FILE))
}

fn cmd_solve(path: &Path, algorithm: Algorithm, tree: Option<&Path>, format: Format, caps: Caps, out: &mut dyn Write) -> Result<RunRecord> {
    let instance = load(path, format)?;
    let tree = match tree {
        Some(p) => Some(DecompositionTree::parse_expression(read(p)?.trim(), &instance)?),
        None => None,
    };
    let start = Instant::now();
    let outcome = solve_with(&instance, algorithm, caps, tree.as_ref())?;
    let record = outcome.record(&instance, start.elapsed().as_secs_f64() * 1e3);
    let _ = writeln!(out, "{}", outcome_document(&outcome));
    Ok(record)
}

fn cmd_check(path: &Path, solution: &Path, format: Format, out: &mut dyn Write) -> Result<()> {
    let instance = load(path, format)?;
    let ids = parse_solution_ids(&read(solution)?)?;
    let doc = match feasibility_witness(&instance, &ids)? {
        None => CheckDoc { feasible: true, scenario: None, cut: None },
        Some(w) => CheckDoc {
            feasible: false,
            scenario: Some(w.scenario.failed),
            cut: Some(w.cut_edges),
        },
    };
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("plain data serializes"));
    Ok(())
}

fn cmd_gap(d: usize, k: usize, caps: Caps, out: &mut dyn Write) -> Result<()> {
    let instance = gap_family(d, k)?;
    let report = gap_report_with(
        &instance,
        FracConfig { scenario_cap: caps.cap_scenarios, ..Default::default() },
        OracleConfig { scenario_cap: caps.cap_scenarios, ..Default::default() },
    )?;
    let doc = GapDoc {
        d,
        k,
        integral_opt: report.integral_opt,
        fractional_opt: report.fractional_opt.to_string(),
        ratio: report.ratio.to_string(),
    };
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("plain data serializes"));
    Ok(())
}

const BENCH_SOLVERS: [Algorithm; 7] = [
    Algorithm::Oracle,
    Algorithm::Bipath,
    Algorithm::Dag,
    Algorithm::Srp,
    Algorithm::ApproxK,
    Algorithm::ApproxK1,
    Algorithm::Frac,
];

fn algorithm_name(a: Algorithm) -> String {
    a.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn failure_label(e: &Error) -> String {
    match e {
        Error::WrongBudget { .. } | Error::RequiresDirected | Error::RequiresUndirected | Error::NotADag(_) | Error::NotSeriesParallel(_) => {
            "n/a".into()
        }
        Error::Infeasible | Error::FlowInfeasible { .. } => "INFEASIBLE".into(),
        e if e.is_cap_exceeded() => "SKIPPED(caps)".into(),
        _ => "ERROR".into(),
    }
}

fn cmd_bench(dir: &Path, log: &Path, format: Format, caps: Caps, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::parse(0, format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        let _ = writeln!(err, "no instances in {}", dir.display());
        return Ok(EXIT_NOTHING);
    }
    let _ = writeln!(out, "{:<28} {:<10} {:>14} {:>10} {:>10}", "instance", "solver", "cost", "ratio", "time_ms");
    let mut any_success = false;
    for file in files {
        let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let instance = match load(&file, format) {
            Ok(i) => i,
            Err(e) => {
                let _ = writeln!(out, "{name:<28} {:<10} {:>14}", "-", "ERROR(parse)");
                let _ = writeln!(err, "{name}: {e}");
                continue;
            }
        };
        let mut oracle_cost: Option<i64> = None;
        for algorithm in BENCH_SOLVERS {
            let start = Instant::now();
            let result = solve_with(&instance, algorithm, caps, None);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let solver = algorithm_name(algorithm);
            let (record, cost_cell, ratio_cell) = match &result {
                Ok(outcome) => {
                    any_success = true;
                    let record = outcome.record(&instance, ms);
                    let cost: BigRational = match outcome {
                        Outcome::Integral { solution, .. } => BigRational::from_integer(solution.cost.into()),
                        Outcome::Fractional(x) => x.value.clone(),
                    };
                    if let Outcome::Integral { solver: "oracle", solution, .. } = outcome {
                        oracle_cost = Some(solution.cost);
                    }
                    let ratio = match oracle_cost {
                        Some(0) if cost.is_zero() => "1".to_string(),
                        Some(0) | None => "-".to_string(),
                        Some(o) => (cost.clone() / BigRational::from_integer(o.into())).to_string(),
                    };
                    (record, cost.to_string(), ratio)
                }
                Err(e) => {
                    let label = failure_label(e);
                    let record = RunRecord {
                        instance_digest: document::digest(&instance),
                        solver: solver.clone(),
                        edges: Vec::new(),
                        cost: None,
                        status: format!("{label}: {e}"),
                        wall_time_ms: ms,
                        version: env!("CARGO_PKG_VERSION").into(),
                    };
                    (record, label, "-".into())
                }
            };
            append_record(log, &record).map_err(|e| Error::parse(0, format!("{}: {e}", log.display())))?;
            let _ = writeln!(out, "{name:<28} {solver:<10} {cost_cell:>14} {ratio_cell:>10} {ms:>10.3}");
        }
    }
    Ok(if any_success { EXIT_OK } else { EXIT_NOTHING })
}

fn cmd_gen(family: Family, seed: u64, params: GenParams, compositions: usize, d: usize, format: Format, out: &mut dyn Write) -> Result<()> {
    if !(0.0..=1.0).contains(&params.faulty_prob) {
        return Err(Error::BadParameters(format!("faulty probability {} outside [0, 1]", params.faulty_prob)));
    }
    if params.max_cost < 0 {
        return Err(Error::BadParameters(format!("negative maximum cost {}", params.max_cost)));
    }
    let mut rng = gen::rng(seed);
    let instance = match family {
        Family::Random => gen::random_instance(&mut rng, params),
        Family::Dag => gen::random_dag(&mut rng, GenParams { directed: true, ..params }),
        Family::Srp => gen::random_srp(&mut rng, compositions, params),
        Family::Gap => gap_family(d, params.k)?,
    };
    let _ = write!(out, "{}", document::serialize(&instance, format));
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve { path, algorithm, tree, format, caps } => cmd_solve(&path, algorithm, tree.as_deref(), format, caps, out).and_then(|record| {
            if let Some(log) = log_path() {
                append_record(&log, &record).map_err(|e| Error::parse(0, format!("{}: {e}", log.display())))?;
            }
            Ok(EXIT_OK)
        }),
        Command::Check { path, solution, format } => cmd_check(&path, &solution, format, out).map(|_| EXIT_OK),
        Command::Gap { d, k, caps } => cmd_gap(d, k, caps, out).map(|_| EXIT_OK),
        Command::Bench { dir, out: log, format, caps } => cmd_bench(&dir, &log, format, caps, out, err),
        Command::Gen {
            family,
            seed,
            vertices,
            edges,
            k,
            directed,
            faulty_prob,
            max_cost,
            compositions,
            d,
            format,
        } => {
            let params = GenParams { vertices, edges, k, directed, faulty_prob, max_cost };
            cmd_gen(family, seed, params, compositions, d, format, out).map(|_| EXIT_OK)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
