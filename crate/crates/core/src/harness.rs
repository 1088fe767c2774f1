//! Experiment harnesses: fixed train/test split, repeated grouped
//! cross-validation, and cross-dataset evaluation, all over the pooled
//! feature table.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{
    derive_seed, eval_report, fit_logistic4, plcc, rmse, srocc, EvalReport, Logistic4Params,
};
use crate::metrics::FeatureId;
use crate::regress::{
    train, tune_hyperparams, Hyperparams, ModelKind, QualityModel, RowView, TrainingRow,
    TrainingRows, TrainingSet, TuneReport,
};

const CV_SPLIT_STREAM: u64 = 0x4356_5250; // "CVRP"
const CV_TRAIN_STREAM: u64 = 0x4356_5452; // "CVTR"

/// One row of the pooled feature table.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledRow {
    pub video_id: String,
    pub group_id: String,
    pub dmos: Option<f64>,
    pub values: Vec<f64>,
}

/// The pooled per-video table: one row per video, one column per
/// (viewport, feature) cell, viewport-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledTable {
    pub columns: Vec<String>,
    pub rows: Vec<PooledRow>,
}

impl PooledTable {
    pub fn new(columns: Vec<String>, mut rows: Vec<PooledRow>) -> Result<Self> {
        for row in &rows {
            if row.values.len() != columns.len() {
                return Err(Error::LengthMismatch(row.values.len(), columns.len()));
            }
        }
        // Deterministic row order regardless of compute order.
        rows.sort_by(|a, b| a.video_id.cmp(&b.video_id));
        Ok(PooledTable { columns, rows })
    }

    /// Feature id of each column, parsed from `v{N}_{NAME}` labels.
    pub fn column_ids(&self) -> Result<Vec<FeatureId>> {
        self.columns
            .iter()
            .map(|c| {
                let name = c
                    .split_once('_')
                    .map(|(_, rest)| rest)
                    .ok_or_else(|| Error::UnknownFeature(c.clone()))?;
                FeatureId::from_name(name)
            })
            .collect()
    }

    pub fn to_training_set(&self) -> Result<TrainingSet> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Ok(TrainingRow {
                    video_id: r.video_id.clone(),
                    group_id: r.group_id.clone(),
                    features: r.values.clone(),
                    dmos: r.dmos.ok_or_else(|| Error::MissingField {
                        path: "pooled table".into(),
                        field: format!("dmos (video {})", r.video_id),
                    })?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TrainingSet::new(rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("video_id,group_id,dmos");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.video_id);
            out.push(',');
            out.push_str(&row.group_id);
            out.push(',');
            if let Some(d) = row.dmos {
                out.push_str(&crate::dataset::format_full_value(d));
            }
            for v in &row.values {
                out.push(',');
                out.push_str(&crate::dataset::format_full_value(*v));
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(path, "empty table"))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 4 || cols[0] != "video_id" || cols[1] != "group_id" || cols[2] != "dmos" {
            return Err(Error::parse(path, "bad pooled table header"));
        }
        let columns: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != columns.len() + 3 {
                return Err(Error::parse(
                    path,
                    format!("line {}: bad width", lineno + 2),
                ));
            }
            let dmos =
                if parts[2].is_empty() {
                    None
                } else {
                    Some(parts[2].parse().map_err(|_| {
                        Error::parse(path, format!("line {}: bad dmos", lineno + 2))
                    })?)
                };
            let values = parts[3..]
                .iter()
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::parse(path, format!("line {}: bad value", lineno + 2)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(PooledRow {
                video_id: parts[0].to_string(),
                group_id: parts[1].to_string(),
                dmos,
                values,
            });
        }
        PooledTable::new(columns, rows)
    }
}

/// Parsed split file: video ids under `[train]` / `[test]` headings
/// (group ids are accepted and expand to their videos).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SplitFile {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl SplitFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut split = SplitFile::default();
        let mut section: Option<bool> = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[train]" => section = Some(true),
                "[test]" => section = Some(false),
                id => match section {
                    Some(true) => split.train.push(id.to_string()),
                    Some(false) => split.test.push(id.to_string()),
                    None => {
                        return Err(Error::DegenerateInput(
                            "split file entry before [train]/[test] heading".into(),
                        ))
                    }
                },
            }
        }
        Ok(split)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::from("[train]\n");
        for id in &self.train {
            out.push_str(id);
            out.push('\n');
        }
        out.push_str("[test]\n");
        for id in &self.test {
            out.push_str(id);
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Resolve against a table: ids may name videos or whole groups.
    /// Returns (train row indices, test row indices). Errors when the
    /// sides overlap, a group straddles the split, or a table row is
    /// covered by neither side.
    pub fn resolve(&self, table: &PooledTable) -> Result<(Vec<usize>, Vec<usize>)> {
        let expand = |ids: &[String]| -> Vec<usize> {
            table
                .rows
                .iter()
                .enumerate()
                .filter(|(_, r)| ids.iter().any(|id| *id == r.video_id || *id == r.group_id))
                .map(|(i, _)| i)
                .collect()
        };
        let train = expand(&self.train);
        let test = expand(&self.test);
        let train_set: BTreeSet<usize> = train.iter().copied().collect();
        let overlap: Vec<String> = test
            .iter()
            .filter(|i| train_set.contains(i))
            .map(|&i| table.rows[i].video_id.clone())
            .collect();
        if !overlap.is_empty() {
            return Err(Error::OverlapBetweenSplits(overlap));
        }
        let covered: BTreeSet<usize> = train.iter().chain(test.iter()).copied().collect();
        let uncovered: Vec<String> = (0..table.rows.len())
            .filter(|i| !covered.contains(i))
            .map(|i| table.rows[i].video_id.clone())
            .collect();
        if !uncovered.is_empty() {
            return Err(Error::SplitMismatch(format!(
                "rows not covered by the split: {}",
                uncovered.join(", ")
            )));
        }
        let train_groups: BTreeSet<&str> = train
            .iter()
            .map(|&i| table.rows[i].group_id.as_str())
            .collect();
        let straddlers: Vec<String> = test
            .iter()
            .filter(|&&i| train_groups.contains(table.rows[i].group_id.as_str()))
            .map(|&i| table.rows[i].group_id.clone())
            .collect();
        if !straddlers.is_empty() {
            return Err(Error::SplitMismatch(format!(
                "groups straddle the split: {}",
                straddlers.join(", ")
            )));
        }
        Ok((train, test))
    }
}

/// Output of the fixed-split protocol for one learned method.
#[derive(Debug, Clone)]
pub struct FixedSplitOutcome {
    pub model: QualityModel,
    pub tune_report: TuneReport,
    pub train_report: EvalReport,
    pub test_report: EvalReport,
    /// (video_id, prediction) on the test side, table order.
    pub test_predictions: Vec<(String, f64)>,
}

/// Fixed train/test protocol: tune by grouped CV on the train side
/// only, train with the winning point, report on the held-out side.
pub fn run_fixed_split(
    table: &PooledTable,
    split: &SplitFile,
    kind: ModelKind,
    grid: &[Hyperparams],
    tune_repeats: usize,
    tune_fraction: f64,
    seed: u64,
) -> Result<FixedSplitOutcome> {
    let (train_rows, test_rows) = split.resolve(table)?;
    let full = table.to_training_set()?;
    let train_view = RowView::new(&full, train_rows);
    let test_view = RowView::new(&full, test_rows);
    let (best, tune_report) =
        tune_hyperparams(&train_view, kind, grid, tune_repeats, tune_fraction, seed)?;
    let model = train(
        &train_view,
        kind,
        &best,
        derive_seed(seed, 0xF1A7, 0),
        table.columns.clone(),
    )?;
    let train_pred = model.predict_rows(&train_view)?;
    let train_truth: Vec<f64> = (0..train_view.n_rows())
        .map(|i| train_view.target(i))
        .collect();
    let test_pred = model.predict_rows(&test_view)?;
    let test_truth: Vec<f64> = (0..test_view.n_rows())
        .map(|i| test_view.target(i))
        .collect();
    let test_predictions = (0..test_view.n_rows())
        .map(|i| (test_view.video_id(i).to_string(), test_pred[i]))
        .collect();
    Ok(FixedSplitOutcome {
        model,
        tune_report,
        train_report: eval_report(&train_pred, &train_truth, "fixed-split train")?,
        test_report: eval_report(&test_pred, &test_truth, "fixed-split test")?,
        test_predictions,
    })
}

/// Fixed-split evaluation of a single raw metric column: the logistic
/// map is fitted on the train side and applied to the test side.
pub fn baseline_fixed_split(
    table: &PooledTable,
    split: &SplitFile,
    column: &str,
) -> Result<(Logistic4Params, EvalReport)> {
    let col = table
        .columns
        .iter()
        .position(|c| c == column)
        .ok_or_else(|| Error::UnknownFeature(column.to_string()))?;
    let (train_rows, test_rows) = split.resolve(table)?;
    let gather = |rows: &[usize]| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut scores = Vec::with_capacity(rows.len());
        let mut dmos = Vec::with_capacity(rows.len());
        for &i in rows {
            scores.push(table.rows[i].values[col]);
            dmos.push(table.rows[i].dmos.ok_or_else(|| Error::MissingField {
                path: "pooled table".into(),
                field: format!("dmos (video {})", table.rows[i].video_id),
            })?);
        }
        Ok((scores, dmos))
    };
    let (train_scores, train_dmos) = gather(&train_rows)?;
    let (test_scores, test_dmos) = gather(&test_rows)?;
    let params = fit_logistic4(&train_scores, &train_dmos, None)?;
    let mapped = params.map_all(&test_scores);
    let report = eval_report(
        &mapped,
        &test_dmos,
        &format!("baseline {column}, fixed-split test"),
    )?;
    Ok((params, report))
}

/// One repeat of the repeated-CV protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRepeat {
    pub repeat: usize,
    pub plcc: f64,
    pub srocc: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub mean_plcc: f64,
    pub mean_srocc: f64,
    pub mean_rmse: f64,
    /// Repeats with defined correlations.
    pub valid_repeats: usize,
    /// Repeats excluded for undefined correlation, with count.
    pub excluded_repeats: usize,
    pub per_repeat: Vec<CvRepeat>,
}

/// Repeated grouped shuffle evaluation with fixed hyper-parameters.
/// Each repeat derives its own seeds, so parallel and serial runs
/// agree bit-exactly.
pub fn run_repeated_cv(
    table: &PooledTable,
    kind: ModelKind,
    hyperparams: &Hyperparams,
    n_repeats: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<CvOutcome> {
    let full = table.to_training_set()?;
    let groups = full.distinct_groups();
    if groups.len() < 5 {
        return Err(Error::TooFewGroups {
            have: groups.len(),
            need: 5,
        });
    }
    let results: Vec<Result<Option<CvRepeat>>> = (0..n_repeats)
        .into_par_iter()
        .map(|repeat| {
            let split_seed = derive_seed(seed, CV_SPLIT_STREAM, repeat as u64);
            let (train_groups, test_groups) =
                crate::eval::grouped_shuffle_split(&groups, test_fraction, split_seed)?;
            let train_view = RowView::for_groups(&full, &train_groups);
            let test_view = RowView::for_groups(&full, &test_groups);
            let model = train(
                &train_view,
                kind,
                hyperparams,
                derive_seed(seed, CV_TRAIN_STREAM, repeat as u64),
                table.columns.clone(),
            )?;
            let pred = model.predict_rows(&test_view)?;
            let truth: Vec<f64> = (0..test_view.n_rows())
                .map(|i| test_view.target(i))
                .collect();
            match (plcc(&pred, &truth), srocc(&pred, &truth)) {
                (Ok(p), Ok(s)) => Ok(Some(CvRepeat {
                    repeat,
                    plcc: p,
                    srocc: s,
                    rmse: rmse(&pred, &truth)?,
                })),
                (Err(Error::ZeroVariance(_)), _) | (_, Err(Error::ZeroVariance(_))) => Ok(None),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        })
        .collect();
    let mut per_repeat = Vec::new();
    let mut excluded = 0usize;
    for r in results {
        match r? {
            Some(rep) => per_repeat.push(rep),
            None => excluded += 1,
        }
    }
    if per_repeat.is_empty() {
        return Err(Error::DegenerateInput(
            "every CV repeat had undefined correlation".into(),
        ));
    }
    let n = per_repeat.len() as f64;
    Ok(CvOutcome {
        mean_plcc: per_repeat.iter().map(|r| r.plcc).sum::<f64>() / n,
        mean_srocc: per_repeat.iter().map(|r| r.srocc).sum::<f64>() / n,
        mean_rmse: per_repeat.iter().map(|r| r.rmse).sum::<f64>() / n,
        valid_repeats: per_repeat.len(),
        excluded_repeats: excluded,
        per_repeat,
    })
}

/// Train on the full first table, evaluate on the full second.
pub fn run_cross_dataset(
    train_table: &PooledTable,
    test_table: &PooledTable,
    kind: ModelKind,
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<(QualityModel, EvalReport)> {
    if train_table.columns != test_table.columns {
        return Err(Error::LayoutMismatch {
            expected: train_table.columns.join(","),
            got: test_table.columns.join(","),
        });
    }
    let train_set = train_table.to_training_set()?;
    let test_set = test_table.to_training_set()?;
    let model = train(
        &train_set,
        kind,
        hyperparams,
        derive_seed(seed, 0xCD, 0),
        train_table.columns.clone(),
    )?;
    let pred = model.predict_rows(&test_set)?;
    let truth: Vec<f64> = (0..test_set.n_rows()).map(|i| test_set.target(i)).collect();
    let report = eval_report(&pred, &truth, "cross-dataset test")?;
    Ok((model, report))
}
