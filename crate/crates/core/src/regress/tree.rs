//! CART regression trees with variance-reduction splits.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::regress::TrainingRows;

/// Flat-array tree node. Internal nodes carry `feature_index`,
/// `threshold`, `left`, `right`; leaves carry `leaf_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub feature_index: Option<usize>,
    pub threshold: Option<f64>,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub leaf_value: Option<f64>,
}

impl TreeNode {
    fn leaf(value: f64) -> Self {
        TreeNode {
            feature_index: None,
            threshold: None,
            left: None,
            right: None,
            leaf_value: Some(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, features: &[f64]) -> f64 {
        let mut node = &self.nodes[0];
        loop {
            match (node.feature_index, node.threshold) {
                (Some(f), Some(t)) => {
                    let next = if features[f] <= t {
                        node.left.expect("internal node has left child")
                    } else {
                        node.right.expect("internal node has right child")
                    };
                    node = &self.nodes[next];
                }
                _ => return node.leaf_value.expect("leaf node has value"),
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match (nodes[i].left, nodes[i].right) {
                (Some(l), Some(r)) => 1 + walk(nodes, l).max(walk(nodes, r)),
                _ => 0,
            }
        }
        walk(&self.nodes, 0)
    }
}

pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Number of feature candidates per split.
    pub max_features: usize,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    split_at: usize,
    reduction: f64,
}

/// Grow a tree over `rows` (indices into `data`), regressing the
/// per-row `targets` array (indexed by data row, not position).
pub(crate) fn build_tree(
    data: &dyn TrainingRows,
    rows: &[usize],
    targets: &[f64],
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let mut nodes = Vec::new();
    let mut rows = rows.to_vec();
    grow(data, &mut rows, targets, params, rng, 0, &mut nodes);
    Tree { nodes }
}

fn mean_target(rows: &[usize], targets: &[f64]) -> f64 {
    rows.iter().map(|&r| targets[r]).sum::<f64>() / rows.len() as f64
}

fn sse(rows: &[usize], targets: &[f64]) -> f64 {
    let n = rows.len() as f64;
    let sum: f64 = rows.iter().map(|&r| targets[r]).sum();
    let sum_sq: f64 = rows.iter().map(|&r| targets[r] * targets[r]).sum();
    sum_sq - sum * sum / n
}

/// Candidate features for one split, ascending so ties break on the
/// lowest feature index.
fn candidate_features(d: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if k >= d {
        (0..d).collect()
    } else {
        let mut chosen: Vec<usize> = rand::seq::index::sample(rng, d, k).into_vec();
        chosen.sort_unstable();
        chosen
    }
}

fn find_best_split(
    data: &dyn TrainingRows,
    rows: &[usize],
    targets: &[f64],
    features: &[usize],
    min_leaf: usize,
) -> Option<BestSplit> {
    let parent_sse = sse(rows, targets);
    let n = rows.len();
    let mut best: Option<BestSplit> = None;
    let mut order: Vec<usize> = rows.to_vec();
    for &feature in features {
        order.sort_by(|&a, &b| {
            data.features(a)[feature]
                .partial_cmp(&data.features(b)[feature])
                .unwrap()
        });
        // Prefix sums over the sorted order.
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let total_sum: f64 = order.iter().map(|&r| targets[r]).sum();
        let total_sq: f64 = order.iter().map(|&r| targets[r] * targets[r]).sum();
        for k in 1..n {
            let t = targets[order[k - 1]];
            sum += t;
            sum_sq += t * t;
            if k < min_leaf || n - k < min_leaf {
                continue;
            }
            let prev = data.features(order[k - 1])[feature];
            let next = data.features(order[k])[feature];
            if prev == next {
                continue;
            }
            let left_sse = sum_sq - sum * sum / k as f64;
            let rn = (n - k) as f64;
            let rsum = total_sum - sum;
            let right_sse = (total_sq - sum_sq) - rsum * rsum / rn;
            let reduction = parent_sse - left_sse - right_sse;
            let better = match &best {
                None => reduction > 1e-12,
                Some(b) => reduction > b.reduction + 1e-12,
            };
            if better {
                best = Some(BestSplit {
                    feature,
                    threshold: (prev + next) / 2.0,
                    split_at: k,
                    reduction,
                });
            }
        }
    }
    best
}

fn grow(
    data: &dyn TrainingRows,
    rows: &mut Vec<usize>,
    targets: &[f64],
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
    depth: usize,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let at_depth_limit = params.max_depth.is_some_and(|d| depth >= d);
    if at_depth_limit || rows.len() < 2 * params.min_samples_leaf || rows.len() < 2 {
        let idx = nodes.len();
        nodes.push(TreeNode::leaf(mean_target(rows, targets)));
        return idx;
    }
    let features = candidate_features(data.n_features(), params.max_features, rng);
    let Some(split) = find_best_split(data, rows, targets, &features, params.min_samples_leaf)
    else {
        let idx = nodes.len();
        nodes.push(TreeNode::leaf(mean_target(rows, targets)));
        return idx;
    };
    rows.sort_by(|&a, &b| {
        data.features(a)[split.feature]
            .partial_cmp(&data.features(b)[split.feature])
            .unwrap()
    });
    let mut right_rows = rows.split_off(split.split_at);
    let idx = nodes.len();
    nodes.push(TreeNode {
        feature_index: Some(split.feature),
        threshold: Some(split.threshold),
        left: None,
        right: None,
        leaf_value: None,
    });
    let left = grow(data, rows, targets, params, rng, depth + 1, nodes);
    let right = grow(
        data,
        &mut right_rows,
        targets,
        params,
        rng,
        depth + 1,
        nodes,
    );
    nodes[idx].left = Some(left);
    nodes[idx].right = Some(right);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::testutil::synthetic;
    use rand::SeedableRng;

    fn params(max_depth: Option<usize>) -> TreeParams {
        TreeParams {
            max_depth,
            min_samples_leaf: 1,
            max_features: usize::MAX,
        }
    }

    fn targets_of(set: &crate::regress::TrainingSet) -> Vec<f64> {
        (0..set.n_rows()).map(|i| set.target(i)).collect()
    }

    #[test]
    fn unlimited_tree_memorizes_distinct_rows() {
        let set = synthetic(4, 5, 3, 7, |f, _| 2.0 * f[0] - f[1] + 0.3 * f[2]);
        let targets = targets_of(&set);
        let rows: Vec<usize> = (0..set.n_rows()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = build_tree(&set, &rows, &targets, &params(None), &mut rng);
        for i in 0..set.n_rows() {
            assert_eq!(tree.predict(set.features(i)), set.target(i));
        }
    }

    #[test]
    fn depth_limit_is_respected() {
        let set = synthetic(4, 8, 3, 9, |f, n| f[0] * f[1] + n);
        let targets = targets_of(&set);
        let rows: Vec<usize> = (0..set.n_rows()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = build_tree(&set, &rows, &targets, &params(Some(2)), &mut rng);
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn stump_splits_a_monotone_target_like_the_oracle() {
        // Single feature, strictly monotone target: a depth-1 stump
        // must put the threshold where the best variance reduction is,
        // and predictions must be monotone in the feature.
        let set = synthetic(2, 10, 1, 3, |f, _| 3.0 * f[0] + 1.0);
        let targets = targets_of(&set);
        let rows: Vec<usize> = (0..set.n_rows()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let stump = build_tree(&set, &rows, &targets, &params(Some(1)), &mut rng);

        // Oracle: brute-force best single split on sorted values.
        let mut vals: Vec<(f64, f64)> = (0..set.n_rows())
            .map(|i| (set.features(i)[0], set.target(i)))
            .collect();
        vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut best = (0usize, f64::NEG_INFINITY);
        let total_sse = {
            let n = vals.len() as f64;
            let s: f64 = vals.iter().map(|v| v.1).sum();
            let sq: f64 = vals.iter().map(|v| v.1 * v.1).sum();
            sq - s * s / n
        };
        for k in 1..vals.len() {
            if vals[k - 1].0 == vals[k].0 {
                continue;
            }
            let (l, r) = vals.split_at(k);
            let part = |v: &[(f64, f64)]| {
                let n = v.len() as f64;
                let s: f64 = v.iter().map(|x| x.1).sum();
                let sq: f64 = v.iter().map(|x| x.1 * x.1).sum();
                sq - s * s / n
            };
            let red = total_sse - part(l) - part(r);
            if red > best.1 {
                best = (k, red);
            }
        }
        let expect_threshold = (vals[best.0 - 1].0 + vals[best.0].0) / 2.0;
        assert_eq!(stump.nodes[0].threshold, Some(expect_threshold));

        // Monotone over a grid.
        let mut last = f64::NEG_INFINITY;
        for i in 0..=40 {
            let x = i as f64 / 4.0;
            let p = stump.predict(&[x]);
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn argsort_preserving_transform_keeps_training_predictions() {
        // Splits depend only on feature order, so a strictly monotone
        // transform of one feature leaves depth-2 training predictions
        // unchanged exactly.
        let set = synthetic(3, 6, 2, 13, |f, _| f[0] * 2.0 + f[1]);
        let targets = targets_of(&set);
        let rows: Vec<usize> = (0..set.n_rows()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree = build_tree(&set, &rows, &targets, &params(Some(2)), &mut rng);

        let warped_rows: Vec<crate::regress::TrainingRow> = set
            .rows()
            .iter()
            .map(|r| {
                let mut row = r.clone();
                row.features[0] = (row.features[0] + 1.0).powi(3);
                row
            })
            .collect();
        let warped = crate::regress::TrainingSet::new(warped_rows).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let warped_tree = build_tree(&warped, &rows, &targets, &params(Some(2)), &mut rng);
        for i in 0..set.n_rows() {
            assert_eq!(
                tree.predict(set.features(i)),
                warped_tree.predict(warped.features(i))
            );
        }
    }
}
