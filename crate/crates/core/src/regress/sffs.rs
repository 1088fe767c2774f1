//! Sequential forward feature selection at the feature-id level:
//! picking an id selects that feature's column in every viewport.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::FeatureId;
use crate::regress::tune::grouped_cv_plcc;
use crate::regress::{materialize_columns, Hyperparams, ModelKind, TrainingRows};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SffsStep {
    pub added: FeatureId,
    pub selected: Vec<FeatureId>,
    pub mean_plcc: f64,
}

/// Greedy forward selection maximizing mean grouped-CV PLCC. Every
/// candidate at a given step is scored on the same splits; ties break
/// towards the lower feature code.
#[allow(clippy::too_many_arguments)]
pub fn sffs(
    data: &dyn TrainingRows,
    column_ids: &[FeatureId],
    kind: ModelKind,
    hyperparams: &Hyperparams,
    max_features: usize,
    n_repeats: usize,
    split_fraction: f64,
    seed: u64,
) -> Result<Vec<SffsStep>> {
    assert_eq!(column_ids.len(), data.n_features(), "one id per column");
    let mut available: Vec<FeatureId> = {
        let mut ids: Vec<FeatureId> = column_ids.to_vec();
        ids.sort_by_key(|id| id.code());
        ids.dedup();
        ids
    };
    let budget = max_features.min(available.len());
    let mut selected: Vec<FeatureId> = Vec::new();
    let mut steps = Vec::new();
    for _ in 0..budget {
        let mut best: Option<(FeatureId, f64)> = None;
        for &candidate in &available {
            let active: Vec<FeatureId> = selected.iter().copied().chain([candidate]).collect();
            let columns: Vec<usize> = column_ids
                .iter()
                .enumerate()
                .filter(|(_, id)| active.contains(id))
                .map(|(i, _)| i)
                .collect();
            let subset = materialize_columns(data, &columns);
            let (score, _, _) = grouped_cv_plcc(
                &subset,
                kind,
                hyperparams,
                n_repeats,
                split_fraction,
                seed,
                0xF5,
            )?;
            let improves = match best {
                None => true,
                Some((_, s)) => score > s,
            };
            if improves {
                best = Some((candidate, score));
            }
        }
        let (added, mean_plcc) = best.expect("at least one candidate");
        available.retain(|&id| id != added);
        selected.push(added);
        steps.push(SffsStep {
            added,
            selected: selected.clone(),
            mean_plcc,
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::testutil::synthetic;
    use crate::regress::{ForestParams, TrainingRow, TrainingSet};

    /// Columns laid out like a 2-viewport pooled table over 3 ids.
    fn two_viewport_table(signal_col: usize) -> (TrainingSet, Vec<FeatureId>) {
        let ids = vec![
            FeatureId::PsnrHvs,
            FeatureId::Gmsd,
            FeatureId::RTi,
            FeatureId::PsnrHvs,
            FeatureId::Gmsd,
            FeatureId::RTi,
        ];
        let base = synthetic(16, 3, 6, 77, |_, _| 0.0);
        let rows = base
            .rows()
            .iter()
            .map(|r| TrainingRow {
                dmos: 4.0 * r.features[signal_col] + 30.0,
                ..r.clone()
            })
            .collect();
        (TrainingSet::new(rows).unwrap(), ids)
    }

    #[test]
    fn signal_feature_is_selected_first() {
        // The target depends only on the GMSD column of viewport 0.
        let (set, ids) = two_viewport_table(1);
        let hp = Hyperparams::Rfr(ForestParams {
            n_trees: 30,
            ..ForestParams::default()
        });
        let steps = sffs(&set, &ids, ModelKind::Rfr, &hp, 2, 4, 0.25, 3).unwrap();
        assert_eq!(steps[0].added, FeatureId::Gmsd);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[1].selected.len(), 2);
    }

    #[test]
    fn exhausting_the_budget_selects_every_id() {
        let (set, ids) = two_viewport_table(2);
        let hp = Hyperparams::Rfr(ForestParams {
            n_trees: 15,
            ..ForestParams::default()
        });
        let steps = sffs(&set, &ids, ModelKind::Rfr, &hp, 99, 3, 0.25, 5).unwrap();
        assert_eq!(steps.len(), 3);
        let mut all: Vec<FeatureId> = steps.last().unwrap().selected.clone();
        all.sort_by_key(|id| id.code());
        assert_eq!(
            all,
            vec![FeatureId::PsnrHvs, FeatureId::Gmsd, FeatureId::RTi]
        );
    }

    #[test]
    fn selection_is_deterministic() {
        let (set, ids) = two_viewport_table(4);
        let hp = Hyperparams::Rfr(ForestParams {
            n_trees: 20,
            ..ForestParams::default()
        });
        let a = sffs(&set, &ids, ModelKind::Rfr, &hp, 3, 3, 0.25, 9).unwrap();
        let b = sffs(&set, &ids, ModelKind::Rfr, &hp, 3, 3, 0.25, 9).unwrap();
        assert_eq!(a, b);
    }
}
