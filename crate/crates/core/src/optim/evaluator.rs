use std::path::{Path, PathBuf};

use serde_yaml::Value;

use super::objective::{features_default, objective_default, run_objective_script};
use super::{Evaluator, OptimError, Outcome, SearchSpace};
use crate::batch::{plan_combinations, run_batch, BatchPlan, Runner};
use crate::config::{Scalar, SimConfig};
use crate::recorder::{read_ipc, write_ipc, Table};

/// Wraps a closure over the decoded values read as floats.
pub struct FnEvaluator<F>(pub F);

impl<F> Evaluator for FnEvaluator<F>
where
    F: Fn(&[f64]) -> Outcome + Sync,
{
    fn evaluate(&self, _index: usize, values: &[Scalar]) -> Result<Outcome, OptimError> {
        let v: Vec<f64> = values.iter().map(|s| s.as_f64().unwrap_or(f64::NAN)).collect();
        Ok((self.0)(&v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSource {
    /// Mean per-agent MSD, with (max, std) MSD features.
    Default,
    /// `<script> <result file>` printing the fitness then one feature per
    /// line. Missing features fall back to the default descriptors.
    Script(PathBuf),
}

/// Scores a candidate by running the substituted configuration through the
/// batch runner `runs` times (per sweep combination) and reducing the merged
/// records.
pub struct SimEvaluator {
    pub tree: Value,
    pub space: SearchSpace,
    pub runs: u32,
    pub runner: Runner,
    pub config_dir: PathBuf,
    /// Each evaluation writes under `<work_dir>/eval_NNNN`.
    pub work_dir: PathBuf,
    pub objective: ObjectiveSource,
    /// Worker threads per evaluation; `None` shares the global pool.
    pub parallelism: Option<usize>,
    pub keep_outputs: bool,
}

impl SimEvaluator {
    /// Checks that the configuration is valid at the initial point of `space`.
    pub fn new(tree: Value, space: SearchSpace, runs: u32, runner: Runner, config_dir: &Path, work_dir: &Path) -> Result<Self, OptimError> {
        let probe = space.apply(&tree, &space.decode(&space.initial_point()))?;
        for combo in plan_combinations(&probe)? {
            SimConfig::from_tree(&combo.tree)?;
        }
        Ok(Self {
            tree,
            space,
            runs: runs.max(1),
            runner,
            config_dir: config_dir.to_path_buf(),
            work_dir: work_dir.to_path_buf(),
            objective: ObjectiveSource::Default,
            parallelism: None,
            keep_outputs: false,
        })
    }

    fn score(&self, dir: &Path, tables: &[Table]) -> Result<Outcome, OptimError> {
        let refs: Vec<&Table> = tables.iter().collect();
        match &self.objective {
            ObjectiveSource::Default => Ok(Outcome::new(objective_default(&refs), features_default(&refs))),
            ObjectiveSource::Script(script) => {
                let mut merged = Table::default();
                for (i, t) in tables.iter().enumerate() {
                    if i == 0 {
                        merged = t.clone();
                    } else {
                        merged.append(t).map_err(crate::batch::BatchError::from)?;
                    }
                }
                let file = dir.join("merged.feather");
                write_ipc(&merged, &file).map_err(crate::batch::BatchError::from)?;
                let (fitness, mut features) = run_objective_script(script, &std::path::absolute(&file).unwrap_or(file))?;
                if features.is_empty() {
                    features = features_default(&refs);
                }
                Ok(Outcome::new(fitness, features))
            }
        }
    }
}

impl Evaluator for SimEvaluator {
    fn evaluate(&self, index: usize, values: &[Scalar]) -> Result<Outcome, OptimError> {
        let tree = self.space.apply(&self.tree, values)?;
        let dir = self.work_dir.join(format!("eval_{index:04}"));
        let plan = BatchPlan {
            combinations: plan_combinations(&tree)?,
            runs: self.runs,
            temp_dir: dir.join("tmp"),
            output_dir: dir.clone(),
            config_dir: self.config_dir.clone(),
            parallelism: self.parallelism,
            runner: self.runner.clone(),
        };
        let report = run_batch(&plan)?;
        let outcome = if let Some(first) = report.failures.first() {
            log::warn!("evaluation {index} ({}) failed, scoring -inf: {first}", self.space.describe(values));
            Outcome::failed(2)
        } else {
            let tables = report
                .outputs
                .iter()
                .map(|o| read_ipc(&o.path))
                .collect::<Result<Vec<_>, _>>()
                .map_err(crate::batch::BatchError::from)?;
            self.score(&dir, &tables)?
        };
        if !self.keep_outputs {
            let _ = std::fs::remove_dir_all(&dir);
        }
        Ok(outcome)
    }
}
