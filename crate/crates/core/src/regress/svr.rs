//! Epsilon-insensitive support vector regression with an RBF kernel.
//!
//! The dual coefficients are found by cyclic coordinate descent on the
//! box-constrained, L1-penalized dual; the bias is folded into the
//! kernel as an additive constant and targets are centered, so a
//! constant target is reproduced exactly. Features are standardized
//! with train-set statistics stored in the model.

use serde::{Deserialize, Serialize};

use crate::regress::{SvrParams, TrainingRows};

const MAX_SWEEPS: usize = 400;
const COEF_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportVector {
    pub coefficient: f64,
    /// Standardized feature values.
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrBody {
    pub gamma: f64,
    pub intercept: f64,
    pub feature_means: Vec<f64>,
    pub feature_stds: Vec<f64>,
    pub support_vectors: Vec<SupportVector>,
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl SvrBody {
    pub fn predict(&self, features: &[f64]) -> f64 {
        let z: Vec<f64> = features
            .iter()
            .zip(self.feature_means.iter().zip(&self.feature_stds))
            .map(|(&x, (&m, &s))| (x - m) / s)
            .collect();
        self.intercept
            + self
                .support_vectors
                .iter()
                .map(|sv| sv.coefficient * (rbf(&sv.features, &z, self.gamma) + 1.0))
                .sum::<f64>()
    }
}

pub(crate) fn fit(data: &dyn TrainingRows, params: &SvrParams) -> SvrBody {
    let n = data.n_rows();
    let d = data.n_features();
    let gamma = params.gamma.unwrap_or(1.0 / d as f64);

    let means: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| data.features(i)[j]).sum::<f64>() / n as f64)
        .collect();
    let stds: Vec<f64> = (0..d)
        .map(|j| {
            let ss: f64 = (0..n)
                .map(|i| {
                    let v = data.features(i)[j] - means[j];
                    v * v
                })
                .sum();
            let s = (ss / n as f64).sqrt();
            if s == 0.0 {
                1.0
            } else {
                s
            }
        })
        .collect();
    let z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            data.features(i)
                .iter()
                .enumerate()
                .map(|(j, &x)| (x - means[j]) / stds[j])
                .collect()
        })
        .collect();

    let intercept = (0..n).map(|i| data.target(i)).sum::<f64>() / n as f64;
    let y: Vec<f64> = (0..n).map(|i| data.target(i) - intercept).collect();

    // Kernel with the folded bias term: K~ = rbf + 1.
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let k = rbf(&z[i], &z[j], gamma) + 1.0;
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    let mut beta = vec![0.0; n];
    let mut fitted = vec![0.0; n];
    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let k_ii = kernel[i * n + i];
            // Target residual excluding i's own contribution.
            let q = y[i] - (fitted[i] - beta[i] * k_ii);
            let raw = (q.abs() - params.epsilon).max(0.0) * q.signum() / k_ii;
            let new_beta = raw.clamp(-params.c, params.c);
            let delta = new_beta - beta[i];
            if delta != 0.0 {
                for j in 0..n {
                    fitted[j] += delta * kernel[i * n + j];
                }
                beta[i] = new_beta;
                max_step = max_step.max(delta.abs());
            }
        }
        if max_step < COEF_TOLERANCE {
            break;
        }
    }

    let support_vectors = beta
        .iter()
        .zip(&z)
        .filter(|(&b, _)| b != 0.0)
        .map(|(&b, zi)| SupportVector {
            coefficient: b,
            features: zi.clone(),
        })
        .collect();
    SvrBody {
        gamma,
        intercept,
        feature_means: means,
        feature_stds: stds,
        support_vectors,
    }
}
