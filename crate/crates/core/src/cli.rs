//! Command-line front end: one simulation (`-c`), `batch` and `optim`.
//!
//! Exit codes: 0 success, 2 usage, 3 configuration error, 4 runtime error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_yaml::Value;

use crate::batch::{run_batch, BatchPlan, Runner};
use crate::config::{arena_base_dir, read_tree_file, set_path, ConfigError, SimConfig};
use crate::controllers::{program_by_name, CONTROLLER_NAMES};
use crate::optim::{
    optimize, write_history, ArchiveSpec, Method, ObjectiveSource, OptimError, SearchSpace, Settings, SimEvaluator,
};
use crate::runtime::{run_simulation, Program, RunOptions, RuntimeError};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

/// Environment variable holding the log filter (`info` by default).
pub const LOG_ENV: &str = "POGOSIM_LOG";

#[derive(Debug, Parser)]
#[command(name = "pogosim", version, about = "Swarm robot simulator", args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub simulate: SimulateArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every combination of a parameter sweep several times and merge the results.
    Batch(BatchArgs),
    /// Optimize the parameters annotated with `optimization_domain`.
    Optim(OptimArgs),
}

#[derive(Debug, Args, Default)]
pub struct Verbosity {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    /// Log debug output.
    #[arg(short, long, global = true, conflicts_with = "quiet")]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Configuration file.
    #[arg(short = 'c', long = "config")]
    pub config: Option<PathBuf>,
    /// Registered controller to run.
    #[arg(long)]
    pub controller: Option<String>,
    /// Override a configuration value, e.g. `--set objects.robots.nb=2`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub overrides: Vec<String>,
    #[command(flatten)]
    pub verbosity: Verbosity,
}

#[derive(Debug, Args)]
pub struct SimulatorChoice {
    /// Simulator executable, invoked as `<sim> -c <config>` per run.
    #[arg(short = 'S', long = "simulator", conflicts_with = "controller")]
    pub simulator: Option<PathBuf>,
    /// Run in-process with this registered controller instead of `-S`.
    #[arg(long)]
    pub controller: Option<String>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(short = 'c', long = "config")]
    pub config: PathBuf,
    #[command(flatten)]
    pub sim: SimulatorChoice,
    /// Runs per combination.
    #[arg(short = 'r', long = "runs", default_value_t = 1)]
    pub runs: u32,
    /// Directory for per-run scratch files.
    #[arg(short = 't', long = "temp-dir", default_value = "tmp")]
    pub temp_dir: PathBuf,
    /// Directory for merged result files.
    #[arg(short = 'o', long = "output-dir", default_value = "results")]
    pub output_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(short = 'j', long = "jobs")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OptimArgs {
    #[arg(short = 'c', long = "config")]
    pub config: PathBuf,
    #[command(flatten)]
    pub sim: SimulatorChoice,
    /// Simulation runs per evaluation.
    #[arg(short = 'r', long = "runs", default_value_t = 1)]
    pub runs: u32,
    #[arg(long = "max-evals", default_value_t = 10)]
    pub max_evals: usize,
    /// random, cmaes or mapelites.
    #[arg(long, default_value = "cmaes")]
    pub optimizer: Method,
    /// Script called as `<script> <result file>`; prints the fitness then
    /// one feature per line.
    #[arg(long)]
    pub objective: Option<PathBuf>,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Candidates per generation (default `4 + floor(3 ln d)`).
    #[arg(long)]
    pub population: Option<usize>,
    /// MAP-Elites feature bounds, `lo:hi` per feature, comma separated.
    #[arg(long = "fd-bounds", value_parser = parse_bounds)]
    pub fd_bounds: Option<FeatureBounds>,
    /// MAP-Elites bins per feature, comma separated.
    #[arg(long = "fd-bins", value_delimiter = ',')]
    pub fd_bins: Vec<usize>,
    #[arg(short = 't', long = "temp-dir", default_value = "tmp/optim")]
    pub temp_dir: PathBuf,
    /// Receives `optim_history.csv` and `best_config.yaml`.
    #[arg(short = 'o', long = "output-dir", default_value = "results")]
    pub output_dir: PathBuf,
    /// Keep each evaluation's merged results under the temp dir.
    #[arg(long)]
    pub keep_evals: bool,
    /// Worker threads per evaluation.
    #[arg(short = 'j', long = "jobs")]
    pub jobs: Option<usize>,
}

/// `lo:hi` pairs, one per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBounds(pub Vec<(f64, f64)>);

fn parse_bounds(s: &str) -> Result<FeatureBounds, String> {
    s.split(',')
        .map(|part| {
            let (lo, hi) = part.split_once(':').ok_or_else(|| format!("`{part}` is not lo:hi"))?;
            let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
            let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
            Ok((lo, hi))
        })
        .collect::<Result<_, String>>()
        .map(FeatureBounds)
}

/// Categorized failure of one command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<RuntimeError> for CliError {
    fn from(e: RuntimeError) -> Self {
        match e {
            RuntimeError::Config(_) | RuntimeError::World(_) | RuntimeError::Comm { .. } | RuntimeError::MissingController(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<crate::batch::BatchError> for CliError {
    fn from(e: crate::batch::BatchError) -> Self {
        match e {
            crate::batch::BatchError::Config(_) | crate::batch::BatchError::Template { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<OptimError> for CliError {
    fn from(e: OptimError) -> Self {
        match e {
            OptimError::NothingToOptimize | OptimError::Config(_) | OptimError::Archive(_) => {
                CliError::Config(e.to_string())
            }
            OptimError::ZeroBudget => CliError::Usage(e.to_string()),
            OptimError::Batch(b) => b.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_logging(&cli.simulate.verbosity);
    let result = match cli.command {
        None => simulate(&cli.simulate),
        Some(Command::Batch(a)) => batch(&a),
        Some(Command::Optim(a)) => optim(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pogosim: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("Usage: pogosim -c <config> --controller <name>  (see --help)");
            }
            e.exit_code()
        }
    }
}

fn init_logging(v: &Verbosity) {
    let level = if v.quiet {
        "warn"
    } else if v.verbose {
        "debug"
    } else {
        "info"
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().filter_or(LOG_ENV, level))
        .format_timestamp(None)
        .try_init();
}

fn controller_program(name: &str) -> Result<Program, CliError> {
    program_by_name(name).ok_or_else(|| {
        CliError::Usage(format!("unknown controller `{name}` (available: {})", CONTROLLER_NAMES.join(", ")))
    })
}

/// Applies `path=value` overrides; values parse as YAML scalars.
pub fn apply_overrides(tree: &mut Value, overrides: &[String]) -> Result<(), CliError> {
    for o in overrides {
        let (path, raw) =
            o.split_once('=').ok_or_else(|| CliError::Usage(format!("override `{o}` is not PATH=VALUE")))?;
        let value: Value = serde_yaml::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(tree, path.trim(), value)?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let config_path = args.config.as_ref().ok_or_else(|| CliError::Usage("missing -c <config>".into()))?;
    let name = args.controller.as_deref().ok_or_else(|| {
        CliError::Usage(format!("no controller selected; pass --controller <name> ({})", CONTROLLER_NAMES.join(", ")))
    })?;
    let program = controller_program(name)?;
    let mut tree = read_tree_file(config_path)?;
    apply_overrides(&mut tree, &args.overrides)?;
    let (config, warnings) = SimConfig::from_tree_with_warnings(&tree)?;
    for w in warnings {
        log::warn!("{w}");
    }
    let options = RunOptions { write_files: true, ..RunOptions::default() }.arena_dir(arena_base_dir(config_path, &tree));
    let artifacts = run_simulation(config, &program, options)?;
    log::info!(
        "Simulation finished after {} steps: {} rows recorded{}",
        artifacts.steps,
        artifacts.table.num_rows(),
        artifacts.data_file.as_ref().map(|p| format!(", written to {}", p.display())).unwrap_or_default()
    );
    Ok(())
}

fn runner(choice: &SimulatorChoice) -> Result<Runner, CliError> {
    match (&choice.simulator, &choice.controller) {
        (Some(exe), _) => Ok(Runner::External(exe.clone())),
        (None, Some(name)) => Ok(Runner::Embedded(controller_program(name)?)),
        (None, None) => Err(CliError::Usage("pass -S <simulator> or --controller <name>".into())),
    }
}

fn batch(args: &BatchArgs) -> Result<(), CliError> {
    let runner = runner(&args.sim)?;
    if args.runs == 0 {
        return Err(CliError::Usage("-r must be at least 1".into()));
    }
    let mut plan = BatchPlan::from_file(&args.config, args.runs, runner)?;
    plan.temp_dir = args.temp_dir.clone();
    plan.output_dir = args.output_dir.clone();
    plan.parallelism = args.jobs;
    let report = run_batch(&plan)?;
    for o in &report.outputs {
        log::info!("Results saved to {} ({} rows)", o.path.display(), o.rows);
    }
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("{} combination(s) failed", report.failures.len())))
    }
}

fn optim(args: &OptimArgs) -> Result<(), CliError> {
    let runner = runner(&args.sim)?;
    let tree = read_tree_file(&args.config)?;
    let space = SearchSpace::from_tree(&tree)?;
    if space.is_empty() {
        return Err(OptimError::NothingToOptimize.into());
    }
    let mut evaluator = SimEvaluator::new(
        tree.clone(),
        space.clone(),
        args.runs,
        runner,
        &arena_base_dir(&args.config, &tree),
        &args.temp_dir,
    )?;
    evaluator.keep_outputs = args.keep_evals;
    evaluator.parallelism = args.jobs;
    if let Some(script) = &args.objective {
        evaluator.objective = ObjectiveSource::Script(script.clone());
        log::info!("Objective: {}", script.display());
    } else {
        log::info!("Objective: DEFAULT fitness = mean MSD");
    }
    let mut settings = Settings::new(args.optimizer, args.max_evals, args.seed);
    settings.population = args.population;
    if let Some(FeatureBounds(bounds)) = &args.fd_bounds {
        let bins = if args.fd_bins.is_empty() { vec![10; bounds.len()] } else { args.fd_bins.clone() };
        settings.archive = ArchiveSpec { bounds: bounds.clone(), resolution: bins };
    } else if !args.fd_bins.is_empty() {
        settings.archive.resolution = args.fd_bins.clone();
    }
    let result = optimize(&space, &evaluator, &settings)?;
    std::fs::create_dir_all(&args.output_dir).map_err(|e| io_error(&args.output_dir, e))?;
    let history = args.output_dir.join("optim_history.csv");
    write_history(&history, &space, &result)?;
    let best_tree = space.apply(&tree, &result.best.values)?;
    let best_path = args.output_dir.join("best_config.yaml");
    let text = serde_yaml::to_string(&best_tree).map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(&best_path, text).map_err(|e| io_error(&best_path, e))?;
    if let Some(archive) = &result.archive {
        log::info!("Archive: {} cells filled ({:.1}% coverage)", archive.len(), 100.0 * archive.coverage());
    }
    log::info!("History written to {}, best configuration to {}", history.display(), best_path.display());
    Ok(())
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simulator_flags() {
        let cli = Cli::try_parse_from(["pogosim", "-c", "a.yaml", "--controller", "hanabi", "--set", "seed=3"]).unwrap();
        assert!(cli.command.is_none());
        assert_eq!(cli.simulate.config.as_deref(), Some(Path::new("a.yaml")));
        assert_eq!(cli.simulate.overrides, ["seed=3"]);
    }

    #[test]
    fn parses_batch_and_optim() {
        let cli = Cli::try_parse_from([
            "pogosim", "batch", "-c", "b.yaml", "-S", "./sim", "-r", "3", "-t", "t", "-o", "o",
        ])
        .unwrap();
        match cli.command {
            Some(Command::Batch(b)) => {
                assert_eq!(b.runs, 3);
                assert_eq!(b.sim.simulator.as_deref(), Some(Path::new("./sim")));
            }
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from([
            "pogosim", "optim", "-c", "o.yaml", "--controller", "run_and_tumble", "--max-evals", "7",
            "--optimizer", "mapelites", "--fd-bounds", "0:10,1:2", "--fd-bins", "4,5",
        ])
        .unwrap();
        match cli.command {
            Some(Command::Optim(o)) => {
                assert_eq!(o.optimizer, Method::MapElites);
                assert_eq!(o.max_evals, 7);
                assert_eq!(o.fd_bounds, Some(FeatureBounds(vec![(0.0, 10.0), (1.0, 2.0)])));
                assert_eq!(o.fd_bins, [4, 5]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["pogosim", "--controller", "hanabi"]), EXIT_USAGE);
        assert_eq!(run(["pogosim", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["pogosim", "batch", "-c", "x.yaml", "-S", "a", "--controller", "b"]), EXIT_USAGE);
        assert_eq!(run(["pogosim", "-c", "x.yaml", "--controller", "nope"]), EXIT_USAGE);
    }

    #[test]
    fn missing_config_file_is_config_error() {
        assert_eq!(run(["pogosim", "-c", "/nonexistent/x.yaml", "--controller", "hanabi"]), EXIT_CONFIG);
    }

    #[test]
    fn overrides_parse_yaml_scalars() {
        let mut tree = crate::config::parse_tree("objects: {robots: {nb: 5}}\nname: a").unwrap();
        apply_overrides(&mut tree, &["objects.robots.nb=2".into(), "name=b c".into()]).unwrap();
        assert_eq!(crate::config::get_path(&tree, "objects.robots.nb"), Some(&Value::from(2)));
        assert_eq!(crate::config::get_path(&tree, "name"), Some(&Value::from("b c")));
        assert!(matches!(apply_overrides(&mut tree, &["novalue".into()]), Err(CliError::Usage(_))));
    }

    #[test]
    fn bounds_parser() {
        assert_eq!(parse_bounds("0:1, -2:3.5").unwrap().0, vec![(0.0, 1.0), (-2.0, 3.5)]);
        assert!(parse_bounds("0-1").is_err());
    }
}
