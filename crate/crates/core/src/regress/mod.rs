//! Fusion regressors mapping pooled feature vectors to DMOS, plus
//! hyper-parameter search and sequential forward feature selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod forest;
mod gbr;
mod sffs;
mod svr;
mod tree;
mod tune;

pub use sffs::{sffs, SffsStep};
pub use tree::{Tree, TreeNode};
pub use tune::{default_grid, tune_hyperparams, TuneEntry, TuneReport};

/// One training observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRow {
    pub video_id: String,
    pub group_id: String,
    pub features: Vec<f64>,
    pub dmos: f64,
}

/// A validated collection of training rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingSet {
    rows: Vec<TrainingRow>,
}

impl TrainingSet {
    pub fn new(rows: Vec<TrainingRow>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let d = first.features.len();
            for row in &rows {
                if row.features.len() != d {
                    return Err(Error::LengthMismatch(row.features.len(), d));
                }
                if row.group_id.is_empty() {
                    return Err(Error::DegenerateInput(format!(
                        "empty group id for video {}",
                        row.video_id
                    )));
                }
            }
        }
        Ok(TrainingSet { rows })
    }

    pub fn rows(&self) -> &[TrainingRow] {
        &self.rows
    }
}

/// Row-level access used by training, tuning, and selection. Keeping
/// this behind a trait lets tests substitute instrumented tables that
/// prove which rows a protocol step actually read.
pub trait TrainingRows: Sync {
    fn n_rows(&self) -> usize;
    fn n_features(&self) -> usize;
    fn video_id(&self, row: usize) -> &str;
    fn group_id(&self, row: usize) -> &str;
    fn features(&self, row: usize) -> &[f64];
    fn target(&self, row: usize) -> f64;

    /// Distinct group ids in first-appearance order.
    fn distinct_groups(&self) -> Vec<String> {
        let mut groups: Vec<String> = Vec::new();
        for i in 0..self.n_rows() {
            let g = self.group_id(i);
            if !groups.iter().any(|x| x == g) {
                groups.push(g.to_string());
            }
        }
        groups
    }
}

impl TrainingRows for TrainingSet {
    fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn n_features(&self) -> usize {
        self.rows.first().map_or(0, |r| r.features.len())
    }

    fn video_id(&self, row: usize) -> &str {
        &self.rows[row].video_id
    }

    fn group_id(&self, row: usize) -> &str {
        &self.rows[row].group_id
    }

    fn features(&self, row: usize) -> &[f64] {
        &self.rows[row].features
    }

    fn target(&self, row: usize) -> f64 {
        self.rows[row].dmos
    }
}

/// Borrowed row subset; accesses flow through to the base table.
pub struct RowView<'a> {
    base: &'a dyn TrainingRows,
    rows: Vec<usize>,
}

impl<'a> RowView<'a> {
    pub fn new(base: &'a dyn TrainingRows, rows: Vec<usize>) -> Self {
        RowView { base, rows }
    }

    /// Rows whose group id is in `groups`.
    pub fn for_groups(base: &'a dyn TrainingRows, groups: &[String]) -> Self {
        let rows = (0..base.n_rows())
            .filter(|&i| groups.iter().any(|g| g == base.group_id(i)))
            .collect();
        RowView { base, rows }
    }
}

impl TrainingRows for RowView<'_> {
    fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn n_features(&self) -> usize {
        self.base.n_features()
    }

    fn video_id(&self, row: usize) -> &str {
        self.base.video_id(self.rows[row])
    }

    fn group_id(&self, row: usize) -> &str {
        self.base.group_id(self.rows[row])
    }

    fn features(&self, row: usize) -> &[f64] {
        self.base.features(self.rows[row])
    }

    fn target(&self, row: usize) -> f64 {
        self.base.target(self.rows[row])
    }
}

/// Copy selected columns out of a table (used by feature selection).
pub fn materialize_columns(data: &dyn TrainingRows, columns: &[usize]) -> TrainingSet {
    let rows = (0..data.n_rows())
        .map(|i| {
            let full = data.features(i);
            TrainingRow {
                video_id: data.video_id(i).to_string(),
                group_id: data.group_id(i).to_string(),
                features: columns.iter().map(|&c| full[c]).collect(),
                dmos: data.target(i),
            }
        })
        .collect();
    TrainingSet { rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Rfr,
    Gbr,
    Svr,
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rfr" => Ok(ModelKind::Rfr),
            "gbr" => Ok(ModelKind::Gbr),
            "svr" => Ok(ModelKind::Svr),
            other => Err(format!("unknown model kind `{other}`")),
        }
    }
}

/// How many features each split considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSubsample {
    Sqrt,
    Third,
    All,
}

impl FeatureSubsample {
    pub fn count(self, d: usize) -> usize {
        match self {
            FeatureSubsample::Sqrt => (d as f64).sqrt().round().max(1.0) as usize,
            FeatureSubsample::Third => (d / 3).max(1),
            FeatureSubsample::All => d,
        }
        .min(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows trees until purity.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: FeatureSubsample,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 300,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: FeatureSubsample::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbrParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for GbrParams {
    fn default() -> Self {
        GbrParams {
            n_trees: 200,
            learning_rate: 0.1,
            max_depth: Some(3),
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    /// RBF width; `None` means 1/n_features.
    pub gamma: Option<f64>,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 10.0,
            epsilon: 0.1,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Hyperparams {
    Rfr(ForestParams),
    Gbr(GbrParams),
    Svr(SvrParams),
}

impl Hyperparams {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Rfr => Hyperparams::Rfr(ForestParams::default()),
            ModelKind::Gbr => Hyperparams::Gbr(GbrParams::default()),
            ModelKind::Svr => Hyperparams::Svr(SvrParams::default()),
        }
    }

    fn matches_kind(&self, kind: ModelKind) -> bool {
        matches!(
            (self, kind),
            (Hyperparams::Rfr(_), ModelKind::Rfr)
                | (Hyperparams::Gbr(_), ModelKind::Gbr)
                | (Hyperparams::Svr(_), ModelKind::Svr)
        )
    }
}

/// Learned structure behind a model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelBody {
    Forest(Vec<Tree>),
    Boosted {
        base_score: f64,
        learning_rate: f64,
        trees: Vec<Tree>,
    },
    Svr(svr::SvrBody),
}

/// A trained regressor with everything needed to reproduce and apply
/// it: kind, hyper-parameters, seed, and the feature column layout it
/// was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityModel {
    pub kind: ModelKind,
    pub feature_layout: Vec<String>,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub body: ModelBody,
}

/// Fit a model. Training is deterministic for a fixed seed; a constant
/// target yields a constant predictor.
pub fn train(
    data: &dyn TrainingRows,
    kind: ModelKind,
    hyperparams: &Hyperparams,
    seed: u64,
    feature_layout: Vec<String>,
) -> Result<QualityModel> {
    if !hyperparams.matches_kind(kind) {
        return Err(Error::DegenerateInput(format!(
            "hyperparams do not match model kind {kind:?}"
        )));
    }
    if data.distinct_groups().len() < 2 {
        return Err(Error::TooFewGroups {
            have: data.distinct_groups().len(),
            need: 2,
        });
    }
    if feature_layout.len() != data.n_features() {
        return Err(Error::LayoutMismatch {
            expected: format!("{} columns", data.n_features()),
            got: format!("{} names", feature_layout.len()),
        });
    }
    for i in 0..data.n_rows() {
        if !data.target(i).is_finite() {
            return Err(Error::NonFiniteInput(format!("dmos of row {i}")));
        }
        if data.features(i).iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(format!("features of row {i}")));
        }
    }
    let body = match (kind, hyperparams) {
        (ModelKind::Rfr, Hyperparams::Rfr(p)) => ModelBody::Forest(forest::fit(data, p, seed)),
        (ModelKind::Gbr, Hyperparams::Gbr(p)) => gbr::fit(data, p),
        (ModelKind::Svr, Hyperparams::Svr(p)) => ModelBody::Svr(svr::fit(data, p)),
        _ => unreachable!("kind checked above"),
    };
    Ok(QualityModel {
        kind,
        feature_layout,
        hyperparams: hyperparams.clone(),
        seed,
        body,
    })
}

impl QualityModel {
    /// Predict one feature vector. The vector must follow
    /// `feature_layout`.
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.feature_layout.len() {
            return Err(Error::LayoutMismatch {
                expected: format!("{} columns", self.feature_layout.len()),
                got: format!("{} values", features.len()),
            });
        }
        Ok(match &self.body {
            ModelBody::Forest(trees) => {
                trees.iter().map(|t| t.predict(features)).sum::<f64>() / trees.len() as f64
            }
            ModelBody::Boosted {
                base_score,
                learning_rate,
                trees,
            } => {
                base_score + learning_rate * trees.iter().map(|t| t.predict(features)).sum::<f64>()
            }
            ModelBody::Svr(body) => body.predict(features),
        })
    }

    /// Verify a column-name layout against the model's.
    pub fn check_layout(&self, names: &[String]) -> Result<()> {
        if names != self.feature_layout.as_slice() {
            return Err(Error::LayoutMismatch {
                expected: self.feature_layout.join(","),
                got: names.join(","),
            });
        }
        Ok(())
    }

    pub fn predict_rows(&self, data: &dyn TrainingRows) -> Result<Vec<f64>> {
        (0..data.n_rows())
            .map(|i| self.predict(data.features(i)))
            .collect()
    }
}

mod serialize;

pub use serialize::ModelDocument;

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Deterministic synthetic table: `n_groups` groups x
    /// `per_group` rows, `d` feature columns; the target is a caller
    /// chosen function of the features plus optional noise.
    pub fn synthetic(
        n_groups: usize,
        per_group: usize,
        d: usize,
        seed: u64,
        target: impl Fn(&[f64], f64) -> f64,
    ) -> TrainingSet {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 100_000) as f64 / 100_000.0
        };
        let mut rows = Vec::new();
        for g in 0..n_groups {
            for v in 0..per_group {
                let features: Vec<f64> = (0..d).map(|_| next() * 10.0).collect();
                let noise = next() - 0.5;
                let dmos = target(&features, noise);
                rows.push(TrainingRow {
                    video_id: format!("g{g:03}_v{v}"),
                    group_id: format!("g{g:03}"),
                    features,
                    dmos,
                });
            }
        }
        TrainingSet::new(rows).unwrap()
    }
}
