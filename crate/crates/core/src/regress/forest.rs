//! Random forest regression: bagged trees with per-split feature
//! subsampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eval::derive_seed;
use crate::regress::tree::{build_tree, Tree, TreeParams};
use crate::regress::{ForestParams, TrainingRows};

const TREE_SEED_STREAM: u64 = 0x7265_6573; // "rees"

/// Fit the forest. Each tree derives its own seed from (seed, index),
/// so parallel and serial training produce identical models.
pub(crate) fn fit(data: &dyn TrainingRows, params: &ForestParams, seed: u64) -> Vec<Tree> {
    let n = data.n_rows();
    let targets: Vec<f64> = (0..n).map(|i| data.target(i)).collect();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        max_features: params.max_features.count(data.n_features()),
    };
    (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, TREE_SEED_STREAM, t as u64));
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            build_tree(data, &rows, &targets, &tree_params, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{plcc, rmse};
    use crate::regress::testutil::synthetic;
    use crate::regress::{train, FeatureSubsample, Hyperparams, ModelKind, RowView};

    fn layout(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn same_seed_same_forest() {
        let set = synthetic(5, 4, 4, 11, |f, n| f[0] + 2.0 * f[2] + n);
        let p = ForestParams {
            n_trees: 20,
            ..ForestParams::default()
        };
        let a = fit(&set, &p, 99);
        let b = fit(&set, &p, 99);
        assert_eq!(a, b);
        let c = fit(&set, &p, 100);
        assert_ne!(a, c);
    }

    #[test]
    fn linear_signal_recovered_on_held_out_groups() {
        // DMOS = 3*f0 + 1 with distractor features; held-out PLCC must
        // clear 0.95 on the synthetic oracle dataset.
        let set = synthetic(40, 5, 4, 17, |f, _| 3.0 * f[0] + 1.0);
        let groups = set.distinct_groups();
        let (train_groups, test_groups) =
            crate::eval::grouped_shuffle_split(&groups, 0.2, 5).unwrap();
        let train_view = RowView::for_groups(&set, &train_groups);
        let test_view = RowView::for_groups(&set, &test_groups);
        let model = train(
            &train_view,
            ModelKind::Rfr,
            &Hyperparams::Rfr(ForestParams {
                n_trees: 100,
                ..ForestParams::default()
            }),
            7,
            layout(4),
        )
        .unwrap();
        let preds = model.predict_rows(&test_view).unwrap();
        let truth: Vec<f64> = (0..test_view.n_rows())
            .map(|i| test_view.target(i))
            .collect();
        let r = plcc(&preds, &truth).unwrap();
        assert!(r >= 0.95, "held-out plcc {r}");
    }

    #[test]
    fn constant_target_yields_constant_predictor() {
        let set = synthetic(3, 4, 3, 2, |_, _| 42.0);
        let model = train(
            &set,
            ModelKind::Rfr,
            &Hyperparams::default_for(ModelKind::Rfr),
            1,
            layout(3),
        )
        .unwrap();
        let preds = model.predict_rows(&set).unwrap();
        assert!(preds.iter().all(|&p| p == 42.0));
        assert_eq!(rmse(&preds, &vec![42.0; preds.len()]).unwrap(), 0.0);
        assert_eq!(model.predict(&[9.9, 0.0, -5.0]).unwrap(), 42.0);
    }

    #[test]
    fn single_unbagged_tree_memorizes_training_targets() {
        let set = synthetic(4, 6, 3, 23, |f, n| f[0] * f[1] - f[2] + n);
        let model = train(
            &set,
            ModelKind::Rfr,
            &Hyperparams::Rfr(ForestParams {
                n_trees: 1,
                max_depth: None,
                min_samples_leaf: 1,
                max_features: FeatureSubsample::All,
                bootstrap: false,
            }),
            3,
            layout(3),
        )
        .unwrap();
        for i in 0..set.n_rows() {
            assert_eq!(model.predict(set.features(i)).unwrap(), set.target(i));
        }
    }

    #[test]
    fn batch_predict_equals_per_row_predict() {
        let set = synthetic(4, 4, 3, 29, |f, n| f[1] + n);
        let model = train(
            &set,
            ModelKind::Rfr,
            &Hyperparams::Rfr(ForestParams {
                n_trees: 30,
                ..ForestParams::default()
            }),
            5,
            layout(3),
        )
        .unwrap();
        let batch = model.predict_rows(&set).unwrap();
        for (i, b) in batch.iter().enumerate() {
            assert_eq!(*b, model.predict(set.features(i)).unwrap());
        }
    }

    #[test]
    fn train_rmse_rarely_exceeds_test_rmse() {
        // Sanity: memorization capacity means train error stays at or
        // below held-out error nearly always.
        let mut hits = 0;
        for seed in 0..100u64 {
            let set = synthetic(12, 4, 3, 1000 + seed, |f, n| 2.0 * f[0] - f[1] + 4.0 * n);
            let groups = set.distinct_groups();
            let (tg, sg) = crate::eval::grouped_shuffle_split(&groups, 0.25, seed).unwrap();
            let train_view = RowView::for_groups(&set, &tg);
            let test_view = RowView::for_groups(&set, &sg);
            let model = train(
                &train_view,
                ModelKind::Rfr,
                &Hyperparams::Rfr(ForestParams {
                    n_trees: 25,
                    ..ForestParams::default()
                }),
                seed,
                layout(3),
            )
            .unwrap();
            let train_pred = model.predict_rows(&train_view).unwrap();
            let train_truth: Vec<f64> = (0..train_view.n_rows())
                .map(|i| train_view.target(i))
                .collect();
            let test_pred = model.predict_rows(&test_view).unwrap();
            let test_truth: Vec<f64> = (0..test_view.n_rows())
                .map(|i| test_view.target(i))
                .collect();
            if rmse(&train_pred, &train_truth).unwrap() <= rmse(&test_pred, &test_truth).unwrap() {
                hits += 1;
            }
        }
        assert!(hits >= 95, "train <= test rmse in only {hits}/100 runs");
    }
}
