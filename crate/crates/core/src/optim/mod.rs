//! Black-box parameter optimization over `optimization_domain` annotations.
//!
//! Candidates live in the unit hypercube and are decoded into domain values
//! before evaluation. Fitness is maximized.

mod cmaes;
mod evaluator;
mod mapelites;
mod objective;
mod space;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use cmaes::CmaEs;
pub use evaluator::{FnEvaluator, ObjectiveSource, SimEvaluator};
pub use mapelites::{Archive, ArchiveSpec, Elite};
pub use objective::{
    features_default, msd_per_agent, objective_default, parse_script_output, run_objective_script, ScriptError,
};
pub use space::SearchSpace;

use crate::batch::BatchError;
use crate::config::{ConfigError, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum OptimError {
    #[error("nothing to optimize: the configuration has no optimization_domain")]
    NothingToOptimize,
    #[error("max_evals must be at least 1")]
    ZeroBudget,
    #[error("archive spec: {0}")]
    Archive(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Batch(#[from] BatchError),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Random,
    CmaEs,
    MapElites,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Random => "RANDOM",
            Method::CmaEs => "CMAES",
            Method::MapElites => "MAPELITES",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "random" => Ok(Method::Random),
            "cmaes" => Ok(Method::CmaEs),
            "mapelites" => Ok(Method::MapElites),
            _ => Err(format!("unknown optimizer `{s}` (expected random, cmaes or mapelites)")),
        }
    }
}

/// Score of one candidate. Failed or empty evaluations use `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub fitness: f64,
    pub features: Vec<f64>,
}

impl Outcome {
    pub fn new(fitness: f64, features: Vec<f64>) -> Self {
        Self { fitness, features }
    }

    pub fn failed(feature_dims: usize) -> Self {
        Self { fitness: f64::NEG_INFINITY, features: vec![0.0; feature_dims] }
    }
}

/// Scores decoded parameter values. `index` is the global evaluation number.
pub trait Evaluator: Sync {
    fn evaluate(&self, index: usize, values: &[Scalar]) -> Result<Outcome, OptimError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub index: usize,
    pub generation: usize,
    /// Normalized coordinates, clipped to `[0, 1]`.
    pub x: Vec<f64>,
    pub values: Vec<Scalar>,
    pub fitness: f64,
    pub features: Vec<f64>,
}

/// Per-generation statistics, as logged.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub number: usize,
    pub pop: usize,
    pub best: f64,
    pub mean: f64,
    pub min: f64,
    pub best_so_far: f64,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub method: Method,
    pub max_evals: usize,
    pub seed: u64,
    /// Candidates per generation; `None` uses `4 + floor(3 ln d)`.
    pub population: Option<usize>,
    /// Initial CMA-ES step size in normalized units.
    pub sigma0: f64,
    /// MAP-Elites mutation standard deviation in normalized units.
    pub mutation_sigma: f64,
    /// Share of the budget MAP-Elites spends on uniform samples first.
    pub bootstrap_fraction: f64,
    pub archive: ArchiveSpec,
}

impl Settings {
    pub fn new(method: Method, max_evals: usize, seed: u64) -> Self {
        Self {
            method,
            max_evals,
            seed,
            population: None,
            sigma0: 0.3,
            mutation_sigma: 0.1,
            bootstrap_fraction: 0.1,
            archive: ArchiveSpec::default(),
        }
    }
}

pub fn default_population(dim: usize) -> usize {
    4 + (3.0 * (dim.max(1) as f64).ln()).floor() as usize
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub best: Evaluation,
    pub evaluations: Vec<Evaluation>,
    pub generations: Vec<Generation>,
    pub archive: Option<Archive>,
}

/// Proposes candidates and learns from their outcomes.
trait Strategy {
    fn ask(&mut self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>>;
    fn tell(&mut self, scored: &[(Vec<f64>, Outcome)]);
}

struct RandomSearch {
    dim: usize,
}

impl Strategy for RandomSearch {
    fn ask(&mut self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..self.dim).map(|_| rng.random::<f64>()).collect()).collect()
    }

    fn tell(&mut self, _: &[(Vec<f64>, Outcome)]) {}
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

/// Runs `settings.method` for exactly `settings.max_evals` evaluations.
pub fn optimize<E: Evaluator + ?Sized>(
    space: &SearchSpace,
    evaluator: &E,
    settings: &Settings,
) -> Result<OptimResult, OptimError> {
    let dim = space.len();
    if dim == 0 {
        return Err(OptimError::NothingToOptimize);
    }
    if settings.max_evals == 0 {
        return Err(OptimError::ZeroBudget);
    }
    let pop = settings.population.unwrap_or_else(|| default_population(dim)).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut strategy: Box<dyn Strategy> = match settings.method {
        Method::Random => Box::new(RandomSearch { dim }),
        Method::CmaEs => Box::new(CmaEs::new(space.initial_point(), settings.sigma0, pop)),
        Method::MapElites => {
            settings.archive.validate().map_err(OptimError::Archive)?;
            let bootstrap = ((settings.max_evals as f64 * settings.bootstrap_fraction).ceil() as usize).max(1);
            Box::new(mapelites::MapElites::new(dim, settings.archive.clone(), bootstrap, settings.mutation_sigma))
        }
    };
    log::info!(
        "Starting optimization: {} | dim={} | max_evals={} (normalized space)",
        settings.method,
        dim,
        settings.max_evals
    );

    let mut evaluations: Vec<Evaluation> = Vec::with_capacity(settings.max_evals);
    let mut generations = Vec::new();
    let mut best_idx: Option<usize> = None;
    while evaluations.len() < settings.max_evals {
        let n = pop.min(settings.max_evals - evaluations.len());
        let xs: Vec<Vec<f64>> =
            strategy.ask(&mut rng, n).into_iter().map(|x| x.into_iter().map(|v| v.clamp(0.0, 1.0)).collect()).collect();
        let start = evaluations.len();
        let outcomes: Vec<Result<Outcome, OptimError>> = xs
            .par_iter()
            .enumerate()
            .map(|(k, x)| evaluator.evaluate(start + k, &space.decode(x)))
            .collect();
        let number = generations.len() + 1;
        let mut scored = Vec::with_capacity(n);
        for (k, (x, outcome)) in xs.into_iter().zip(outcomes).enumerate() {
            let mut outcome = outcome?;
            outcome.fitness = sanitize(outcome.fitness);
            let e = Evaluation {
                index: start + k,
                generation: number,
                values: space.decode(&x),
                x: x.clone(),
                fitness: outcome.fitness,
                features: outcome.features.clone(),
            };
            if best_idx.is_none_or(|b| e.fitness > evaluations[b].fitness) {
                best_idx = Some(e.index);
            }
            evaluations.push(e);
            scored.push((x, outcome));
        }
        let fs: Vec<f64> = scored.iter().map(|(_, o)| o.fitness).collect();
        let g = Generation {
            number,
            pop: n,
            best: fs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: fs.iter().sum::<f64>() / n as f64,
            min: fs.iter().copied().fold(f64::INFINITY, f64::min),
            best_so_far: best_idx.map_or(f64::NEG_INFINITY, |b| evaluations[b].fitness),
        };
        log::info!(
            "gen {:03}: pop={}  f[best/mean/min]=[{:.6}/{:.6}/{:.6}]  best_so_far={:.6}",
            g.number,
            g.pop,
            g.best,
            g.mean,
            g.min,
            g.best_so_far
        );
        generations.push(g);
        strategy.tell(&scored);
    }
    let best = evaluations[best_idx.expect("at least one evaluation")].clone();
    log::info!("Done. Best fitness: {}", best.fitness);
    log::info!("Best values: {}", space.describe(&best.values));
    let archive = match settings.method {
        Method::MapElites => {
            let mut a = Archive::new(settings.archive.clone());
            for e in &evaluations {
                a.insert(e);
            }
            Some(a)
        }
        _ => None,
    };
    Ok(OptimResult { best, evaluations, generations, archive })
}

/// Writes one CSV row per evaluation: index, generation, parameter values,
/// fitness, features.
pub fn write_history(path: &std::path::Path, space: &SearchSpace, result: &OptimResult) -> Result<(), OptimError> {
    let io = |source: std::io::Error| OptimError::Io { path: path.display().to_string(), source };
    let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
    let nf = result.evaluations.iter().map(|e| e.features.len()).max().unwrap_or(0);
    let mut header = vec!["eval".to_string(), "generation".to_string()];
    header.extend(space.dims.iter().map(|d| d.path.clone()));
    header.push("fitness".into());
    header.extend((0..nf).map(|i| format!("feature_{i}")));
    w.write_record(&header).map_err(|e| io(e.into()))?;
    for e in &result.evaluations {
        let mut rec = vec![e.index.to_string(), e.generation.to_string()];
        rec.extend(e.values.iter().map(|v| v.to_string()));
        rec.push(e.fitness.to_string());
        rec.extend((0..nf).map(|i| e.features.get(i).map_or(String::new(), f64::to_string)));
        w.write_record(&rec).map_err(|e| io(e.into()))?;
    }
    w.flush().map_err(io)
}
