//! Grouped-shuffle cross-validated hyper-parameter search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{derive_seed, grouped_shuffle_split, plcc};
use crate::regress::{
    train, FeatureSubsample, ForestParams, GbrParams, Hyperparams, ModelKind, RowView, SvrParams,
    TrainingRows,
};

const SPLIT_STREAM: u64 = 0x5350_4C49; // "SPLI"
const TRAIN_STREAM: u64 = 0x5452_4149; // "TRAI"

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneEntry {
    pub hyperparams: Hyperparams,
    pub mean_plcc: f64,
    /// Repeats whose validation correlation was defined.
    pub valid_repeats: usize,
    pub excluded_repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub entries: Vec<TuneEntry>,
    pub best_index: usize,
    pub n_repeats: usize,
    pub split_fraction: f64,
    pub seed: u64,
}

/// Mean validation PLCC of one hyper-parameter point over grouped
/// shuffles. Repeats with undefined correlation (constant predictions
/// or targets) are excluded and counted.
pub(crate) fn grouped_cv_plcc(
    data: &dyn TrainingRows,
    kind: ModelKind,
    hyperparams: &Hyperparams,
    n_repeats: usize,
    split_fraction: f64,
    seed: u64,
    stream: u64,
) -> Result<(f64, usize, usize)> {
    let groups = data.distinct_groups();
    let layout: Vec<String> = (0..data.n_features()).map(|i| format!("c{i}")).collect();
    let mut sum = 0.0;
    let mut valid = 0usize;
    let mut excluded = 0usize;
    for repeat in 0..n_repeats {
        let split_seed = derive_seed(seed, SPLIT_STREAM ^ stream, repeat as u64);
        let (train_groups, val_groups) =
            grouped_shuffle_split(&groups, split_fraction, split_seed)?;
        let train_view = RowView::for_groups(data, &train_groups);
        let val_view = RowView::for_groups(data, &val_groups);
        let train_seed = derive_seed(seed, TRAIN_STREAM ^ stream, repeat as u64);
        let model = train(&train_view, kind, hyperparams, train_seed, layout.clone())?;
        let preds = model.predict_rows(&val_view)?;
        let truth: Vec<f64> = (0..val_view.n_rows()).map(|i| val_view.target(i)).collect();
        match plcc(&preds, &truth) {
            Ok(r) => {
                sum += r;
                valid += 1;
            }
            Err(Error::ZeroVariance(_)) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    let mean = if valid > 0 {
        sum / valid as f64
    } else {
        f64::NEG_INFINITY
    };
    Ok((mean, valid, excluded))
}

/// Grid search by average validation PLCC over `n_repeats` grouped
/// shuffles of `data`. The argmax point is returned together with the
/// full table; ties break towards the earlier grid entry.
pub fn tune_hyperparams(
    data: &dyn TrainingRows,
    kind: ModelKind,
    grid: &[Hyperparams],
    n_repeats: usize,
    split_fraction: f64,
    seed: u64,
) -> Result<(Hyperparams, TuneReport)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut entries = Vec::with_capacity(grid.len());
    for (g, hyperparams) in grid.iter().enumerate() {
        let (mean_plcc, valid_repeats, excluded_repeats) = grouped_cv_plcc(
            data,
            kind,
            hyperparams,
            n_repeats,
            split_fraction,
            seed,
            g as u64,
        )?;
        entries.push(TuneEntry {
            hyperparams: hyperparams.clone(),
            mean_plcc,
            valid_repeats,
            excluded_repeats,
        });
    }
    let best_index = entries
        .iter()
        .enumerate()
        .max_by(|(ai, a), (bi, b)| {
            a.mean_plcc
                .partial_cmp(&b.mean_plcc)
                .unwrap()
                .then(bi.cmp(ai))
        })
        .map(|(i, _)| i)
        .unwrap();
    let best = entries[best_index].hyperparams.clone();
    Ok((
        best,
        TuneReport {
            entries,
            best_index,
            n_repeats,
            split_fraction,
            seed,
        },
    ))
}

/// The default search grid per model kind.
pub fn default_grid(kind: ModelKind) -> Vec<Hyperparams> {
    match kind {
        ModelKind::Rfr => {
            let mut grid = Vec::new();
            for &n_trees in &[100usize, 300] {
                for &max_depth in &[Some(8usize), Some(16), None] {
                    for &min_samples_leaf in &[1usize, 5] {
                        for &max_features in &[FeatureSubsample::Sqrt, FeatureSubsample::Third] {
                            grid.push(Hyperparams::Rfr(ForestParams {
                                n_trees,
                                max_depth,
                                min_samples_leaf,
                                max_features,
                                bootstrap: true,
                            }));
                        }
                    }
                }
            }
            grid
        }
        ModelKind::Gbr => {
            let mut grid = Vec::new();
            for &learning_rate in &[0.05, 0.1] {
                for &n_trees in &[200usize, 500] {
                    for &depth in &[2usize, 3] {
                        grid.push(Hyperparams::Gbr(GbrParams {
                            n_trees,
                            learning_rate,
                            max_depth: Some(depth),
                            min_samples_leaf: 1,
                        }));
                    }
                }
            }
            grid
        }
        ModelKind::Svr => {
            let mut grid = Vec::new();
            for &c in &[1.0, 10.0, 100.0] {
                for &epsilon in &[0.1, 1.0] {
                    grid.push(Hyperparams::Svr(SvrParams {
                        c,
                        epsilon,
                        gamma: None,
                    }));
                }
            }
            grid
        }
    }
}
