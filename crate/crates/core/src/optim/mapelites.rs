use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Evaluation, Outcome, Strategy};

/// Grid over the feature space: per dimension a `[lo, hi]` range split
/// into `resolution` bins. Features outside the range land in the edge bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveSpec {
    pub bounds: Vec<(f64, f64)>,
    pub resolution: Vec<usize>,
}

impl Default for ArchiveSpec {
    /// Suits the default (max MSD, std MSD) features in mm² for
    /// arenas of about one square metre.
    fn default() -> Self {
        Self { bounds: vec![(0.0, 400_000.0), (0.0, 200_000.0)], resolution: vec![10, 10] }
    }
}

impl ArchiveSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.bounds.is_empty() || self.bounds.len() != self.resolution.len() {
            return Err(format!(
                "{} feature bound(s) but {} resolution value(s)",
                self.bounds.len(),
                self.resolution.len()
            ));
        }
        for (i, (&(lo, hi), &r)) in self.bounds.iter().zip(&self.resolution).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(format!("feature {i}: bounds [{lo}, {hi}] are not an increasing finite range"));
            }
            if r == 0 {
                return Err(format!("feature {i}: resolution must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn cell_of(&self, features: &[f64]) -> Vec<usize> {
        self.bounds
            .iter()
            .zip(&self.resolution)
            .enumerate()
            .map(|(i, (&(lo, hi), &r))| {
                let f = features.get(i).copied().unwrap_or(lo);
                let u = if f.is_nan() { 0.0 } else { (f - lo) / (hi - lo) };
                ((u * r as f64).floor().max(0.0) as usize).min(r - 1)
            })
            .collect()
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.iter().product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elite {
    pub x: Vec<f64>,
    pub fitness: f64,
    pub features: Vec<f64>,
}

/// Best candidate per feature cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    pub spec: ArchiveSpec,
    pub cells: BTreeMap<Vec<usize>, Elite>,
}

impl Archive {
    pub fn new(spec: ArchiveSpec) -> Self {
        Self { spec, cells: BTreeMap::new() }
    }

    /// Stores `e` if its cell is empty or holds a lower fitness.
    pub fn insert(&mut self, e: &Evaluation) -> bool {
        self.offer(&e.x, e.fitness, &e.features)
    }

    fn offer(&mut self, x: &[f64], fitness: f64, features: &[f64]) -> bool {
        let cell = self.spec.cell_of(features);
        match self.cells.get(&cell) {
            Some(old) if old.fitness >= fitness => false,
            _ => {
                self.cells.insert(cell, Elite { x: x.to_vec(), fitness, features: features.to_vec() });
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn coverage(&self) -> f64 {
        self.cells.len() as f64 / self.spec.cell_count() as f64
    }

    pub fn best(&self) -> Option<&Elite> {
        self.cells.values().fold(None, |b: Option<&Elite>, e| match b {
            Some(b) if b.fitness >= e.fitness => Some(b),
            _ => Some(e),
        })
    }
}

/// Uniform bootstrap, then Gaussian mutation of uniformly chosen elites.
pub(super) struct MapElites {
    dim: usize,
    archive: Archive,
    bootstrap: usize,
    asked: usize,
    mutation: Normal<f64>,
}

impl MapElites {
    pub fn new(dim: usize, spec: ArchiveSpec, bootstrap: usize, sigma: f64) -> Self {
        Self {
            dim,
            archive: Archive::new(spec),
            bootstrap,
            asked: 0,
            mutation: Normal::new(0.0, sigma.max(0.0)).expect("finite sigma"),
        }
    }
}

impl Strategy for MapElites {
    fn ask(&mut self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
        let elites: Vec<&Elite> = self.archive.cells.values().collect();
        let out = (0..n)
            .map(|k| {
                if self.asked + k < self.bootstrap || elites.is_empty() {
                    (0..self.dim).map(|_| rng.random::<f64>()).collect()
                } else {
                    let parent = elites[rng.random_range(0..elites.len())];
                    parent.x.iter().map(|&v| (v + self.mutation.sample(rng)).clamp(0.0, 1.0)).collect()
                }
            })
            .collect();
        self.asked += n;
        out
    }

    fn tell(&mut self, scored: &[(Vec<f64>, Outcome)]) {
        for (x, o) in scored {
            self.archive.offer(x, o.fitness, &o.features);
        }
    }
}
