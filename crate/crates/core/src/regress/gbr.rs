//! Gradient boosting with squared-error loss: each stage fits a small
//! tree to the current residuals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::regress::tree::{build_tree, TreeParams};
use crate::regress::{GbrParams, ModelBody, TrainingRows};

pub(crate) fn fit(data: &dyn TrainingRows, params: &GbrParams) -> ModelBody {
    let n = data.n_rows();
    let base_score = (0..n).map(|i| data.target(i)).sum::<f64>() / n as f64;
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        max_features: data.n_features(),
    };
    let rows: Vec<usize> = (0..n).collect();
    let mut predictions = vec![base_score; n];
    let mut residuals = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    // No stochastic element: every stage sees all rows and features.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..params.n_trees {
        for (i, r) in residuals.iter_mut().enumerate() {
            *r = data.target(i) - predictions[i];
        }
        let tree = build_tree(data, &rows, &residuals, &tree_params, &mut rng);
        for (i, p) in predictions.iter_mut().enumerate() {
            *p += params.learning_rate * tree.predict(data.features(i));
        }
        trees.push(tree);
    }
    ModelBody::Boosted {
        base_score,
        learning_rate: params.learning_rate,
        trees,
    }
}
