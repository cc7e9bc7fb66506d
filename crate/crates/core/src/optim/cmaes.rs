use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Outcome, Strategy};

/// (mu/mu_w, lambda) CMA-ES with the usual default learning rates.
///
/// Samples are clipped to the unit box before evaluation and the update
/// uses the clipped points. A generation smaller than `lambda` (the tail
/// of the budget) is evaluated but not learned from.
#[derive(Debug, Clone)]
pub struct CmaEs {
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    lambda: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
    p_sigma: DVector<f64>,
    p_c: DVector<f64>,
    /// `B D` and `B D^-1 B^T` of the current covariance.
    bd: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
    generation: usize,
}

impl CmaEs {
    pub fn new(mean: Vec<f64>, sigma: f64, lambda: usize) -> Self {
        let n = mean.len();
        let nf = n as f64;
        let lambda = lambda.max(2);
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu).map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c_1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Self {
            mean: DVector::from_vec(mean),
            sigma,
            cov: DMatrix::identity(n, n),
            lambda,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            bd: DMatrix::identity(n, n),
            inv_sqrt: DMatrix::identity(n, n),
            generation: 0,
        }
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    fn decompose(&mut self) {
        let n = self.mean.len();
        // keep the matrix exactly symmetric before decomposing
        let sym = (&self.cov + self.cov.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let d: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(1e-20).sqrt()).collect();
        let b = eig.eigenvectors;
        let mut bd = b.clone();
        let mut bdi = b.clone();
        for j in 0..n {
            bd.column_mut(j).scale_mut(d[j]);
            bdi.column_mut(j).scale_mut(1.0 / d[j]);
        }
        self.inv_sqrt = &bdi * b.transpose();
        self.bd = bd;
    }

    fn update(&mut self, scored: &[(Vec<f64>, Outcome)]) {
        let n = self.mean.len();
        let mut order: Vec<usize> = (0..scored.len()).collect();
        order.sort_by(|&a, &b| scored[b].1.fitness.total_cmp(&scored[a].1.fitness));
        let old = self.mean.clone();
        let ys: Vec<DVector<f64>> = order
            .iter()
            .take(self.weights.len())
            .map(|&i| (DVector::from_column_slice(&scored[i].0) - &old) / self.sigma)
            .collect();
        let mut step = DVector::zeros(n);
        for (w, y) in self.weights.iter().zip(&ys) {
            step += y * *w;
        }
        self.mean = &old + &step * self.sigma;

        self.generation += 1;
        let cs = self.c_sigma;
        self.p_sigma = &self.p_sigma * (1.0 - cs) + (&self.inv_sqrt * &step) * (cs * (2.0 - cs) * self.mu_eff).sqrt();
        let ps_norm = self.p_sigma.norm();
        let decay = 1.0 - (1.0 - cs).powi(2 * self.generation as i32);
        let h_sigma = ps_norm / decay.sqrt() / self.chi_n < 1.4 + 2.0 / (n as f64 + 1.0);
        let cc = self.c_c;
        self.p_c = &self.p_c * (1.0 - cc);
        if h_sigma {
            self.p_c += &step * (cc * (2.0 - cc) * self.mu_eff).sqrt();
        }
        let mut rank_mu = DMatrix::zeros(n, n);
        for (w, y) in self.weights.iter().zip(&ys) {
            rank_mu += y * y.transpose() * *w;
        }
        let delta_h = if h_sigma { 0.0 } else { cc * (2.0 - cc) };
        self.cov = &self.cov * (1.0 - self.c_1 - self.c_mu)
            + (&self.p_c * self.p_c.transpose() + &self.cov * delta_h) * self.c_1
            + rank_mu * self.c_mu;
        self.sigma *= ((cs / self.d_sigma) * (ps_norm / self.chi_n - 1.0)).exp();
        self.decompose();
    }
}

impl Strategy for CmaEs {
    fn ask(&mut self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
        let dim = self.mean.len();
        (0..n)
            .map(|_| {
                let z = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = &self.mean + &self.bd * z * self.sigma;
                x.iter().copied().collect()
            })
            .collect()
    }

    fn tell(&mut self, scored: &[(Vec<f64>, Outcome)]) {
        if scored.len() >= self.lambda {
            self.update(scored);
        }
    }
}
