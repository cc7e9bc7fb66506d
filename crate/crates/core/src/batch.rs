//! Parameter sweeps: expand `batch_options` into combinations, run each
//! combination several times in parallel and merge the results.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;
use serde_yaml::Value;

use crate::config::{extract_sweeps, get_path, set_path, ConfigError, SimConfig};
use crate::recorder::{read_ipc, write_ipc, ColumnType, RecorderError, Table, Value as Cell};
use crate::runtime::{run_simulation, Program, RunOptions};

pub const DEFAULT_RESULT_NAME: &str = "result.feather";
pub const RUN_COLUMN: &str = "run";

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Recorder(#[from] RecorderError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad result_filename_format `{template}`: {message}")]
    Template { template: String, message: String },
    #[error("run {run} for {output} failed: {message}{}", console_suffix(.console))]
    RunFailed {
        output: String,
        run: u32,
        message: String,
        console: String,
    },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

fn console_suffix(console: &str) -> String {
    if console.trim().is_empty() {
        String::new()
    } else {
        format!("\n--- console ---\n{}", console.trim_end())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BatchError + '_ {
    move |source| BatchError::Io { path: path.display().to_string(), source }
}

/// One concrete configuration of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    /// Configuration tree with every sweep node replaced by one option.
    pub tree: Value,
    /// Chosen option per sweep path.
    pub choices: Vec<(String, Value)>,
    /// File name from `result_filename_format`.
    pub output_name: String,
}

/// Cartesian product of every `batch_options` node. Paths are sorted
/// lexicographically; the first path varies slowest.
pub fn expand(tree: &Value) -> Result<Vec<(Value, Vec<(String, Value)>)>, ConfigError> {
    let mut sweeps = extract_sweeps(tree)?;
    sweeps.sort_by(|a, b| a.path.cmp(&b.path));
    let mut out = vec![(tree.clone(), Vec::new())];
    for sweep in &sweeps {
        let mut next = Vec::with_capacity(out.len() * sweep.options.len());
        for (t, choices) in &out {
            for option in &sweep.options {
                let mut t = t.clone();
                set_path(&mut t, &sweep.path, option.clone())?;
                let mut c = choices.clone();
                c.push((sweep.path.clone(), option.clone()));
                next.push((t, c));
            }
        }
        out = next;
    }
    Ok(out)
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Substitutes every `{dotted.path}` of `template` with the value found in
/// `tree`. Path separators in values become `_`.
pub fn format_result_name(template: &str, tree: &Value) -> Result<String, BatchError> {
    let bad = |message: String| BatchError::Template { template: template.to_string(), message };
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').ok_or_else(|| bad("unclosed `{`".into()))? + open;
        let path = rest[open + 1..close].trim();
        let value = get_path(tree, path).ok_or_else(|| bad(format!("no value at `{path}`")))?;
        let text = scalar_text(value).ok_or_else(|| bad(format!("`{path}` is not a scalar")))?;
        out.push_str(&text.replace(['/', '\\'], "_"));
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Expands `tree` and names each combination.
pub fn plan_combinations(tree: &Value) -> Result<Vec<Combination>, BatchError> {
    let template = get_path(tree, "result_filename_format").and_then(Value::as_str).map(str::to_string);
    expand(tree)?
        .into_iter()
        .map(|(tree, choices)| {
            let output_name = match &template {
                Some(t) => format_result_name(t, &tree)?,
                None => DEFAULT_RESULT_NAME.to_string(),
            };
            Ok(Combination { tree, choices, output_name })
        })
        .collect()
}

/// How each run is executed.
#[derive(Clone)]
pub enum Runner {
    /// In-process, with the given controllers.
    Embedded(Program),
    /// An external simulator executable invoked as `<exe> -c <config>`.
    External(PathBuf),
}

#[derive(Clone)]
pub struct BatchPlan {
    pub combinations: Vec<Combination>,
    pub runs: u32,
    pub temp_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Directory against which relative `arena_file` paths resolve.
    pub config_dir: PathBuf,
    /// Worker threads; `None` uses every available core.
    pub parallelism: Option<usize>,
    pub runner: Runner,
}

impl BatchPlan {
    /// Plans every combination of the configuration file at `path`.
    pub fn from_file(path: &Path, runs: u32, runner: Runner) -> Result<Self, BatchError> {
        let tree = crate::config::read_tree_file(path)?;
        let config_dir = crate::config::arena_base_dir(path, &tree);
        Ok(Self {
            combinations: plan_combinations(&tree)?,
            runs,
            temp_dir: PathBuf::from("tmp"),
            output_dir: PathBuf::from("results"),
            config_dir,
            parallelism: None,
            runner,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSummary {
    pub path: PathBuf,
    pub rows: usize,
}

#[derive(Debug, Default)]
pub struct BatchReport {
    /// Distinct output files in first-written order.
    pub outputs: Vec<OutputSummary>,
    /// Combinations that were aborted.
    pub failures: Vec<BatchError>,
}

fn cell_of(v: &Value) -> (ColumnType, Cell) {
    match v {
        Value::Bool(b) => (ColumnType::Bool, Cell::Bool(*b)),
        Value::Number(n) => match n.as_i64().and_then(|i| i32::try_from(i).ok()) {
            Some(i) => (ColumnType::Int32, Cell::Int32(i)),
            None => (ColumnType::Float64, Cell::Float64(n.as_f64().unwrap_or(f64::NAN))),
        },
        other => (ColumnType::Text, Cell::Text(scalar_text(other).unwrap_or_default())),
    }
}

fn run_embedded(program: &Program, config: SimConfig, config_dir: &Path) -> Result<Table, String> {
    let options = RunOptions::in_memory().arena_dir(config_dir);
    run_simulation(config, program, options).map(|a| a.table).map_err(|e| e.to_string())
}

fn run_external(
    exe: &Path,
    mut tree: Value,
    config_dir: &Path,
    run_dir: &Path,
) -> Result<Table, (String, String)> {
    let fail = |m: String| (m, String::new());
    std::fs::create_dir_all(run_dir).map_err(|e| fail(format!("{}: {e}", run_dir.display())))?;
    let data = std::path::absolute(run_dir.join("data.feather")).map_err(|e| fail(e.to_string()))?;
    let console = std::path::absolute(run_dir.join("console.txt")).map_err(|e| fail(e.to_string()))?;
    let absolute_str = |p: &Path| Value::String(p.display().to_string());
    if let Some(arena) = get_path(&tree, "arena_file").and_then(Value::as_str) {
        let p = config_dir.join(arena);
        let p = std::path::absolute(&p).unwrap_or(p);
        set_path(&mut tree, "arena_file", absolute_str(&p)).map_err(|e| fail(e.to_string()))?;
    }
    for (key, value) in [
        ("data_filename", absolute_str(&data)),
        ("console_filename", absolute_str(&console)),
        ("enable_data_logging", Value::Bool(true)),
        ("save_video_period", Value::from(-1)),
    ] {
        set_path(&mut tree, key, value).map_err(|e| fail(e.to_string()))?;
    }
    let cfg_path = run_dir.join("config.yaml");
    let text = serde_yaml::to_string(&tree).map_err(|e| fail(e.to_string()))?;
    std::fs::write(&cfg_path, text).map_err(|e| fail(e.to_string()))?;
    let output = Command::new(exe)
        .arg("-c")
        .arg(&cfg_path)
        .output()
        .map_err(|e| fail(format!("cannot launch {}: {e}", exe.display())))?;
    let log = || {
        let mut s = String::from_utf8_lossy(&output.stdout).into_owned();
        s.push_str(&String::from_utf8_lossy(&output.stderr));
        if let Ok(c) = std::fs::read_to_string(&console) {
            s.push_str(&c);
        }
        s
    };
    if !output.status.success() {
        return Err((format!("simulator exited with {}", output.status), log()));
    }
    read_ipc(&data).map_err(|e| (e.to_string(), log()))
}

/// Runs every combination `plan.runs` times and merges the rows per output
/// file. Existing outputs with the same names are removed first.
pub fn run_batch(plan: &BatchPlan) -> Result<BatchReport, BatchError> {
    log::info!("Found {} combination(s) to run.", plan.combinations.len());
    std::fs::create_dir_all(&plan.output_dir).map_err(io_err(&plan.output_dir))?;
    let mut names: Vec<&str> = Vec::new();
    for c in &plan.combinations {
        if !names.contains(&c.output_name.as_str()) {
            names.push(&c.output_name);
        }
    }
    for name in &names {
        let path = plan.output_dir.join(name);
        if path.exists() {
            std::fs::remove_file(&path).map_err(io_err(&path))?;
            log::info!("Removed stale result file: {}", path.display());
        }
    }

    let tasks: Vec<(usize, u32)> =
        (0..plan.combinations.len()).flat_map(|c| (0..plan.runs).map(move |r| (c, r))).collect();
    let execute = |&(c, run): &(usize, u32)| -> Result<Table, BatchError> {
        let combo = &plan.combinations[c];
        let failed = |message: String, console: String| BatchError::RunFailed {
            output: combo.output_name.clone(),
            run,
            message,
            console,
        };
        let base = SimConfig::from_tree(&combo.tree)?;
        let seed = base.seed.wrapping_add(run as u64);
        match &plan.runner {
            Runner::Embedded(program) => {
                let mut config = base;
                config.seed = seed;
                run_embedded(program, config, &plan.config_dir).map_err(|m| failed(m, String::new()))
            }
            Runner::External(exe) => {
                let mut tree = combo.tree.clone();
                set_path(&mut tree, "seed", Value::from(seed))?;
                let run_dir = plan.temp_dir.join(format!("combo{c:03}_run{run:03}"));
                run_external(exe, tree, &plan.config_dir, &run_dir).map_err(|(m, log)| failed(m, log))
            }
        }
    };
    let results: Vec<Result<Table, BatchError>> = match plan.parallelism {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| BatchError::Pool(e.to_string()))?
            .install(|| tasks.par_iter().map(execute).collect()),
        None => tasks.par_iter().map(execute).collect(),
    };

    let mut by_combo: BTreeMap<usize, Vec<(u32, Result<Table, BatchError>)>> = BTreeMap::new();
    for ((c, run), r) in tasks.into_iter().zip(results) {
        by_combo.entry(c).or_default().push((run, r));
    }
    let mut report = BatchReport::default();
    let mut merged: BTreeMap<String, Table> = BTreeMap::new();
    for (c, runs) in by_combo {
        let combo = &plan.combinations[c];
        match merge_runs(combo, runs) {
            Ok(table) => {
                let path = plan.output_dir.join(&combo.output_name);
                match merged.get_mut(&combo.output_name) {
                    Some(existing) => {
                        existing.append(&table)?;
                        write_ipc(existing, &path)?;
                        log::info!("Appended {} rows to {}", table.num_rows(), path.display());
                    }
                    None => {
                        write_ipc(&table, &path)?;
                        log::info!("Created {} with {} rows", path.display(), table.num_rows());
                        merged.insert(combo.output_name.clone(), table);
                    }
                }
            }
            Err(e) => {
                log::error!("{e}");
                report.failures.push(e);
            }
        }
    }
    for name in names {
        if let Some(t) = merged.get(name) {
            report.outputs.push(OutputSummary { path: plan.output_dir.join(name), rows: t.num_rows() });
        }
    }
    Ok(report)
}

fn merge_runs(combo: &Combination, runs: Vec<(u32, Result<Table, BatchError>)>) -> Result<Table, BatchError> {
    let new_columns: Vec<String> = get_path(&combo.tree, "result_new_columns")
        .and_then(Value::as_sequence)
        .map(|s| s.iter().filter_map(scalar_text).collect())
        .unwrap_or_default();
    let mut merged: Option<Table> = None;
    for (run, result) in runs {
        let mut table = result?;
        table.add_constant_column(RUN_COLUMN, ColumnType::Int32, Cell::Int32(run as i32))?;
        for path in &new_columns {
            let value = get_path(&combo.tree, path).ok_or_else(|| {
                ConfigError::invalid("result_new_columns", format!("no configuration value at `{path}`"))
            })?;
            let (ty, cell) = cell_of(value);
            table.add_constant_column(path, ty, cell)?;
        }
        match merged.as_mut() {
            Some(m) => m.append(&table)?,
            None => merged = Some(table),
        }
    }
    Ok(merged.unwrap_or_default())
}
