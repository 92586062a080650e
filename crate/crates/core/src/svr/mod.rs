//! Epsilon support vector regression over the three combiner features
//! (LSTM score, age, gender), solved in the dual by SMO.
//!
//! Features are standardized internally; the fitted model stores the
//! standardization constants, the support vectors, the dual coefficients
//! `beta_i = alpha_i - alpha_i*`, and the bias. Predictions are clamped to
//! the score scale.

mod smo;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

pub const SVR_FEATURES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    Rbf,
    Linear,
}

/// Kernel with resolved parameters, as stored in a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    Rbf { gamma: f64 },
    Linear,
}

impl Kernel {
    pub fn apply(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => {
                let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * sq).exp()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrHyper {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: KernelChoice,
    /// RBF width; `None` resolves at fit time to `1 / (3 * v)` where `v` is
    /// the mean per-feature variance after standardization (1 for
    /// non-degenerate features, so effectively 1/3).
    pub gamma: Option<f64>,
    /// Predictions are clamped to `[0, scale_max]`.
    pub scale_max: f64,
}

impl Default for SvrHyper {
    fn default() -> Self {
        SvrHyper {
            c: 10.0,
            epsilon: 0.1,
            kernel: KernelChoice::Rbf,
            gamma: None,
            scale_max: 12.0,
        }
    }
}

impl SvrHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::invalid_config("svr.c", "must be > 0"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::invalid_config("svr.epsilon", "must be >= 0"));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0) {
                return Err(Error::invalid_config("svr.gamma", "must be > 0"));
            }
        }
        if !(self.scale_max > 0.0) {
            return Err(Error::invalid_config("svr.scale_max", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: Kernel,
    /// Standardized support vectors.
    pub support_vectors: Vec<[f64; SVR_FEATURES]>,
    /// Indices of the support vectors in the training set, for audits.
    pub sv_indices: Vec<usize>,
    /// `beta_i = alpha_i - alpha_i*`, each in `[-C, C]`, summing to ~0.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub feature_mean: [f64; SVR_FEATURES],
    pub feature_std: [f64; SVR_FEATURES],
    pub c: f64,
    pub epsilon: f64,
    pub clamp_max: f64,
}

impl SvrModel {
    fn standardize(&self, x: &[f64; SVR_FEATURES]) -> [f64; SVR_FEATURES] {
        std::array::from_fn(|i| (x[i] - self.feature_mean[i]) / self.feature_std[i])
    }

    /// Unclamped decision function `sum_i beta_i K(sv_i, x) + b`.
    pub fn predict_raw(&self, x: &[f64; SVR_FEATURES]) -> f64 {
        let z = self.standardize(x);
        let mut f = self.bias;
        for (sv, beta) in self.support_vectors.iter().zip(&self.dual_coefs) {
            f += beta * self.kernel.apply(sv, &z);
        }
        f
    }

    pub fn sum_dual_coefs(&self) -> f64 {
        self.dual_coefs.iter().sum()
    }
}

/// Final score prediction, clamped to `[0, scale_max]`.
pub fn predict_svr(model: &SvrModel, x: &[f64; SVR_FEATURES]) -> f64 {
    model.predict_raw(x).clamp(0.0, model.clamp_max)
}

/// Fits epsilon-SVR on `(lstm_score, age, gender)` rows by SMO to KKT
/// tolerance 1e-3.
pub fn fit_svr(
    rows: &[[f64; SVR_FEATURES]],
    targets: &[f64],
    hyper: &SvrHyper,
) -> Result<SvrModel> {
    hyper.validate()?;
    if rows.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "svr needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    if rows.len() != targets.len() {
        return Err(Error::shape("svr rows vs targets", rows.len(), targets.len()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) || targets.iter().any(|v| !v.is_finite()) {
        return Err(Error::EmptyInput("svr input contains non-finite values".into()));
    }

    // standardize features; constant features get unit std
    let n = rows.len() as f64;
    let mut mean = [0.0; SVR_FEATURES];
    let mut std = [0.0; SVR_FEATURES];
    for f in 0..SVR_FEATURES {
        mean[f] = rows.iter().map(|r| r[f]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[f] - mean[f]).powi(2)).sum::<f64>() / n;
        let s = var.sqrt();
        std[f] = if s <= f64::EPSILON * (1.0 + mean[f].abs()) {
            1.0
        } else {
            s
        };
    }
    let standardized: Vec<[f64; SVR_FEATURES]> = rows
        .iter()
        .map(|r| std::array::from_fn(|f| (r[f] - mean[f]) / std[f]))
        .collect();

    let kernel = match hyper.kernel {
        KernelChoice::Linear => Kernel::Linear,
        KernelChoice::Rbf => {
            let gamma = hyper.gamma.unwrap_or_else(|| {
                let mut pooled = 0.0;
                for f in 0..SVR_FEATURES {
                    let m = standardized.iter().map(|r| r[f]).sum::<f64>() / n;
                    pooled += standardized.iter().map(|r| (r[f] - m).powi(2)).sum::<f64>() / n;
                }
                let v = pooled / SVR_FEATURES as f64;
                if v > 1e-12 {
                    1.0 / (SVR_FEATURES as f64 * v)
                } else {
                    1.0 / SVR_FEATURES as f64
                }
            });
            Kernel::Rbf { gamma }
        }
    };

    let solution = smo::solve(&standardized, targets, &kernel, hyper.c, hyper.epsilon, 1e-3);

    let mut support_vectors = Vec::new();
    let mut sv_indices = Vec::new();
    let mut dual_coefs = Vec::new();
    for (i, beta) in solution.beta.iter().enumerate() {
        if beta.abs() > 1e-12 {
            support_vectors.push(standardized[i]);
            sv_indices.push(i);
            dual_coefs.push(*beta);
        }
    }
    Ok(SvrModel {
        kernel,
        support_vectors,
        sv_indices,
        dual_coefs,
        bias: solution.bias,
        feature_mean: mean,
        feature_std: std,
        c: hyper.c,
        epsilon: hyper.epsilon,
        clamp_max: hyper.scale_max,
    })
}

/// Result of a KKT audit over the training set.
#[derive(Debug, Clone, Copy)]
pub struct KktReport {
    /// Max of `| |f(x_i) - y_i| - epsilon |` over non-bound support vectors.
    pub max_nonbound_violation: f64,
    pub sum_dual_coefs: f64,
    pub nonbound_count: usize,
}

/// Audits the fitted model against its training rows: every non-bound
/// support vector must sit on the epsilon tube boundary.
pub fn kkt_audit(model: &SvrModel, rows: &[[f64; SVR_FEATURES]], targets: &[f64]) -> KktReport {
    let mut max_v: f64 = 0.0;
    let mut count = 0;
    for (k, &i) in model.sv_indices.iter().enumerate() {
        let beta = model.dual_coefs[k];
        let bound = model.c * (1.0 - 1e-6);
        if beta.abs() < bound {
            let residual = (model.predict_raw(&rows[i]) - targets[i]).abs();
            max_v = max_v.max((residual - model.epsilon).abs());
            count += 1;
        }
    }
    KktReport {
        max_nonbound_violation: max_v,
        sum_dual_coefs: model.sum_dual_coefs(),
        nonbound_count: count,
    }
}

#[cfg(test)]
mod tests;
