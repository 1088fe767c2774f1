//! Temporal pooling: per-(viewport, feature) time series down to one
//! scalar.
//!
//! The default pooling models three perceptual effects: a smoothed,
//! asymmetric low-pass recursion over frame scores (degradations and
//! improvements tracked with different gains) followed by an
//! exponentially recency-weighted average.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{FeatureId, Polarity};
use crate::tensor::FeatureTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolingKind {
    Hvs,
    Mean,
    Minkowski,
    Percentile,
}

impl std::str::FromStr for PoolingKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hvs" => Ok(PoolingKind::Hvs),
            "mean" => Ok(PoolingKind::Mean),
            "minkowski" => Ok(PoolingKind::Minkowski),
            "percentile" => Ok(PoolingKind::Percentile),
            other => Err(format!("unknown pooling `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolingConfig {
    pub kind: PoolingKind,
    /// Low-pass gain for non-positive score steps.
    pub alpha: f64,
    /// Low-pass gain for positive score steps.
    pub beta: f64,
    /// Recency time constant in frames; `None` means F/3.
    pub tau: Option<f64>,
    /// Minkowski order.
    pub p: f64,
    /// Percentile pooling keeps the worst k percent.
    pub k_percent: f64,
    /// Divide the recency-weighted sum by F (the literal formulation)
    /// instead of by the weight sum. The literal form is not
    /// constant-preserving; the normalized form is the default.
    pub literal_recency: bool,
}

impl Default for PoolingConfig {
    fn default() -> Self {
        PoolingConfig {
            kind: PoolingKind::Hvs,
            alpha: 0.03,
            beta: 0.2,
            tau: None,
            p: 2.0,
            k_percent: 10.0,
            literal_recency: false,
        }
    }
}

impl PoolingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidPoolingConfig(format!(
                "alpha = {} outside (0, 1]",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidPoolingConfig(format!(
                "beta = {} outside (0, 1]",
                self.beta
            )));
        }
        if let Some(tau) = self.tau {
            if tau.is_nan() || tau <= 0.0 {
                return Err(Error::InvalidPoolingConfig(format!("tau = {tau} <= 0")));
            }
        }
        if self.p.is_nan() || self.p < 1.0 {
            return Err(Error::InvalidPoolingConfig(format!("p = {} < 1", self.p)));
        }
        if !(self.k_percent > 0.0 && self.k_percent <= 100.0) {
            return Err(Error::InvalidPoolingConfig(format!(
                "k_percent = {} outside (0, 100]",
                self.k_percent
            )));
        }
        Ok(())
    }

    fn tau_for_len(&self, len: usize) -> f64 {
        self.tau.unwrap_or(len as f64 / 3.0)
    }
}

/// Smooth/asymmetric low-pass recursion followed by a recency-weighted
/// average. `series(1)` seeds the recursion; steps down are tracked
/// with gain `alpha`, steps up with `beta`.
pub fn hvs_pool(series: &[f64], cfg: &PoolingConfig) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    cfg.validate()?;
    let f_total = series.len();
    let tau = cfg.tau_for_len(f_total);
    let mut low_pass = Vec::with_capacity(f_total);
    low_pass.push(series[0]);
    for &score in &series[1..] {
        let prev = *low_pass.last().unwrap();
        let delta = score - prev;
        let gain = if delta <= 0.0 { cfg.alpha } else { cfg.beta };
        low_pass.push(prev + gain * delta);
    }
    let mut weighted = 0.0;
    let mut weight_sum = 0.0;
    for (i, &q) in low_pass.iter().enumerate() {
        // Frames are 1-based in the weight law: w(f) = e^((f+1-F)/tau).
        let f = (i + 1) as f64;
        let w = ((f + 1.0 - f_total as f64) / tau).exp();
        weighted += q * w;
        weight_sum += w;
    }
    if cfg.literal_recency {
        Ok(weighted / f_total as f64)
    } else {
        Ok(weighted / weight_sum)
    }
}

/// Arithmetic mean.
pub fn mean_pool(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(series.iter().sum::<f64>() / series.len() as f64)
}

/// Minkowski mean, `(mean of q^p)^(1/p)`. Negative inputs are only
/// meaningful for integer `p`.
pub fn minkowski_pool(series: &[f64], p: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if p.fract() != 0.0 {
        if let Some(&bad) = series.iter().find(|v| **v < 0.0) {
            return Err(Error::NegativeInput(bad));
        }
    }
    let mean_pow = series.iter().map(|&q| q.powf(p)).sum::<f64>() / series.len() as f64;
    Ok(mean_pow.powf(1.0 / p))
}

/// Mean of the worst ceil(F * k / 100) values; which tail is "worst"
/// comes from the feature's polarity.
pub fn percentile_pool(series: &[f64], k_percent: f64, polarity: Polarity) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let count = ((series.len() as f64 * k_percent / 100.0).ceil() as usize).clamp(1, series.len());
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let worst: &[f64] = match polarity {
        Polarity::HigherBetter => &sorted[..count],
        Polarity::HigherWorse => &sorted[sorted.len() - count..],
    };
    Ok(worst.iter().sum::<f64>() / count as f64)
}

fn pool_series(series: &[f64], cfg: &PoolingConfig, id: FeatureId) -> Result<f64> {
    match cfg.kind {
        PoolingKind::Hvs => hvs_pool(series, cfg),
        PoolingKind::Mean => mean_pool(series),
        PoolingKind::Minkowski => minkowski_pool(series, cfg.p),
        PoolingKind::Percentile => percentile_pool(series, cfg.k_percent, id.polarity()),
    }
}

/// One pooled value per (viewport, feature), concatenated
/// viewport-major: element index = viewport * M + feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledFeatureVector {
    pub n_viewports: usize,
    pub features: Vec<FeatureId>,
    pub values: Vec<f64>,
}

impl PooledFeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, viewport: usize, feature: usize) -> f64 {
        self.values[viewport * self.features.len() + feature]
    }

    /// Column labels in layout order, `v{viewport}_{FEATURE}`.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.values.len());
        for vp in 0..self.n_viewports {
            for id in &self.features {
                names.push(format!("v{vp}_{}", id.name()));
            }
        }
        names
    }
}

/// Pool every (viewport, feature) series of a tensor independently.
pub fn pool_tensor(tensor: &FeatureTensor, cfg: &PoolingConfig) -> Result<PooledFeatureVector> {
    cfg.validate()?;
    let m = tensor.n_features();
    let mut values = Vec::with_capacity(tensor.viewports * m);
    for viewport in 0..tensor.viewports {
        for feature in 0..m {
            let series = tensor.series(viewport, feature);
            values.push(pool_series(&series, cfg, tensor.feature_ids()[feature])?);
        }
    }
    Ok(PooledFeatureVector {
        n_viewports: tensor.viewports,
        features: tensor.feature_ids().to_vec(),
        values,
    })
}
