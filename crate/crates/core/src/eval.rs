//! Prediction-accuracy criteria, logistic mapping for non-learned
//! baselines, and grouped train/test splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Correlation/error summary of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub plcc: f64,
    pub srocc: f64,
    pub rmse: f64,
    pub n: usize,
    pub split_descriptor: String,
}

/// Pearson linear correlation coefficient.
pub fn plcc(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateInput("plcc needs n >= 2".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x".into()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y".into()));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Fractional (mid-) ranks; ties receive the average of their ranks.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank-order correlation coefficient.
pub fn srocc(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    plcc(&average_ranks(x), &average_ranks(y))
}

/// Root mean squared error.
pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch(pred.len(), target.len()));
    }
    if pred.is_empty() {
        return Err(Error::DegenerateInput("rmse needs n >= 1".into()));
    }
    let sum: f64 = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| (p - t) * (p - t))
        .sum();
    Ok((sum / pred.len() as f64).sqrt())
}

/// Build a full report for a prediction vector.
pub fn eval_report(pred: &[f64], target: &[f64], split_descriptor: &str) -> Result<EvalReport> {
    Ok(EvalReport {
        plcc: plcc(pred, target)?,
        srocc: srocc(pred, target)?,
        rmse: rmse(pred, target)?,
        n: pred.len(),
        split_descriptor: split_descriptor.to_string(),
    })
}

/// Parameters of the 4-parameter logistic mapping
/// `s' = (b1 - b2) / (1 + exp(-(s - b3)/|b4|)) + b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Logistic4Params {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

impl Logistic4Params {
    pub fn map(&self, s: f64) -> f64 {
        let scale = self.beta4.abs().max(1e-12);
        (self.beta1 - self.beta2) / (1.0 + (-(s - self.beta3) / scale).exp()) + self.beta2
    }

    pub fn map_all(&self, scores: &[f64]) -> Vec<f64> {
        scores.iter().map(|&s| self.map(s)).collect()
    }
}

fn sse(params: &Logistic4Params, scores: &[f64], dmos: &[f64]) -> f64 {
    scores
        .iter()
        .zip(dmos)
        .map(|(&s, &d)| {
            let e = params.map(s) - d;
            e * e
        })
        .sum()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

const NM_MAX_ITERS: usize = 2000;
const NM_TOLERANCE: f64 = 1e-10;

/// Nelder-Mead simplex descent on the logistic SSE.
fn nelder_mead(init: [f64; 4], scores: &[f64], dmos: &[f64]) -> ([f64; 4], f64) {
    let f = |p: &[f64; 4]| {
        sse(
            &Logistic4Params {
                beta1: p[0],
                beta2: p[1],
                beta3: p[2],
                beta4: p[3],
            },
            scores,
            dmos,
        )
    };
    // Initial simplex: the init point plus one perturbed vertex per axis.
    let mut simplex: Vec<[f64; 4]> = vec![init];
    for i in 0..4 {
        let mut v = init;
        v[i] += if v[i] != 0.0 { 0.1 * v[i].abs() } else { 0.1 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(&f).collect();
    for _ in 0..NM_MAX_ITERS {
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let simplex_sorted: Vec<[f64; 4]> = order.iter().map(|&i| simplex[i]).collect();
        let values_sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = simplex_sorted;
        values = values_sorted;
        if (values[4] - values[0]).abs() <= NM_TOLERANCE * (1.0 + values[0].abs()) {
            break;
        }
        let centroid = {
            let mut c = [0.0; 4];
            for v in &simplex[..4] {
                for (ci, vi) in c.iter_mut().zip(v) {
                    *ci += vi / 4.0;
                }
            }
            c
        };
        let mix = |a: f64| {
            let mut p = [0.0; 4];
            for (i, v) in p.iter_mut().enumerate() {
                *v = centroid[i] + a * (simplex[4][i] - centroid[i]);
            }
            p
        };
        let reflected = mix(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = mix(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[4] = expanded;
                values[4] = fe;
            } else {
                simplex[4] = reflected;
                values[4] = fr;
            }
        } else if fr < values[3] {
            simplex[4] = reflected;
            values[4] = fr;
        } else {
            let contracted = if fr < values[4] { mix(-0.5) } else { mix(0.5) };
            let fc = f(&contracted);
            if fc < values[4].min(fr) {
                simplex[4] = contracted;
                values[4] = fc;
            } else {
                // Shrink towards the best vertex.
                let anchor = simplex[0];
                for i in 1..5 {
                    for (v, a) in simplex[i].iter_mut().zip(anchor) {
                        *v = a + 0.5 * (*v - a);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..5)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap())
        .unwrap();
    (simplex[best], values[best])
}

/// Least-squares fit of the 4-parameter logistic by simplex descent.
/// Default init: b1 = max dmos, b2 = min dmos, b3 = median score,
/// b4 = std of scores. The returned fit never has a larger residual
/// than the init.
pub fn fit_logistic4(
    scores: &[f64],
    dmos: &[f64],
    init: Option<Logistic4Params>,
) -> Result<Logistic4Params> {
    if scores.len() != dmos.len() {
        return Err(Error::LengthMismatch(scores.len(), dmos.len()));
    }
    if scores.len() < 4 {
        return Err(Error::DegenerateInput("logistic fit needs n >= 4".into()));
    }
    if std_dev(scores) == 0.0 {
        return Err(Error::DegenerateInput("constant scores".into()));
    }
    let init = init.unwrap_or_else(|| Logistic4Params {
        beta1: dmos.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        beta2: dmos.iter().cloned().fold(f64::INFINITY, f64::min),
        beta3: median(scores),
        beta4: std_dev(scores),
    });
    let start = [init.beta1, init.beta2, init.beta3, init.beta4];
    // A couple of restarts from the incumbent escape degenerate
    // simplexes; each run only ever improves the best vertex.
    let mut best = start;
    let mut best_val = f64::INFINITY;
    for _ in 0..3 {
        let (point, value) = nelder_mead(best, scores, dmos);
        if value + NM_TOLERANCE >= best_val {
            best = point;
            break;
        }
        best = point;
        best_val = value;
    }
    let fitted = Logistic4Params {
        beta1: best[0],
        beta2: best[1],
        beta3: best[2],
        beta4: if best[3] == 0.0 { 1e-12 } else { best[3] },
    };
    debug_assert!(sse(&fitted, scores, dmos) <= sse(&init, scores, dmos) + 1e-9);
    Ok(fitted)
}

/// Deterministic sub-seed derivation (splitmix64 finalizer), so
/// parallel and serial runs of seeded loops agree bit-exactly.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Partition distinct group ids into train/test at the group level.
/// Test group count = round(fraction * n_groups), at least 1 and at
/// most n_groups - 1.
pub fn grouped_shuffle_split(
    groups: &[String],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<String>, Vec<String>)> {
    let mut distinct: Vec<String> = Vec::new();
    for g in groups {
        if !distinct.contains(g) {
            distinct.push(g.clone());
        }
    }
    if distinct.len() < 2 {
        return Err(Error::TooFewGroups {
            have: distinct.len(),
            need: 2,
        });
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::DegenerateInput(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let n_test =
        ((distinct.len() as f64 * test_fraction).round() as usize).clamp(1, distinct.len() - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = distinct;
    shuffled.shuffle(&mut rng);
    let test = shuffled[..n_test].to_vec();
    let train = shuffled[n_test..].to_vec();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_series(seed: u64, n: usize, scale: f64) -> Vec<f64> {
        let mut state = seed;
        (0..n)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 33) % 10_000) as f64 / 10_000.0 * scale
            })
            .collect()
    }

    /// Independent PLCC oracle using the expanded sum formula.
    fn plcc_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let syy: f64 = y.iter().map(|v| v * v).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
    }

    #[test]
    fn plcc_affine_and_reversed() {
        let x = lcg_series(5, 40, 10.0);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((plcc(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((plcc(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn plcc_matches_oracle_on_random_pairs() {
        for seed in 0..100u64 {
            let x = lcg_series(seed * 2 + 1, 25, 5.0);
            let y = lcg_series(seed * 2 + 2, 25, 50.0);
            let got = plcc(&x, &y).unwrap();
            let expect = plcc_oracle(&x, &y);
            assert!((got - expect).abs() < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn plcc_invariant_under_positive_affine_maps() {
        let x = lcg_series(9, 30, 3.0);
        let y = lcg_series(10, 30, 8.0);
        let base = plcc(&x, &y).unwrap();
        let xa: Vec<f64> = x.iter().map(|v| 4.5 * v + 17.0).collect();
        let yb: Vec<f64> = y.iter().map(|v| 0.02 * v - 3.0).collect();
        assert!((plcc(&xa, &yb).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn plcc_zero_variance_errors() {
        assert!(matches!(
            plcc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance(_))
        ));
    }

    /// Brute-force average-rank oracle: rank = mean position among
    /// equal values, found by counting.
    fn ranks_oracle(values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .map(|&v| {
                let less = values.iter().filter(|&&o| o < v).count() as f64;
                let equal = values.iter().filter(|&&o| o == v).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    }

    #[test]
    fn srocc_monotone_and_reversed() {
        let x = lcg_series(3, 30, 10.0);
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        assert!((srocc(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let rev: Vec<f64> = x.iter().map(|v| -v.powi(3)).collect();
        assert!((srocc(&x, &rev).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn srocc_handles_ties_like_the_oracle() {
        let x = vec![1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 0.0, 5.0, 5.0, 1.0];
        let y = vec![2.0, 1.0, 1.0, 4.0, 4.0, 4.0, 0.5, 0.5, 6.0, 6.0];
        assert_eq!(average_ranks(&x), ranks_oracle(&x));
        let got = srocc(&x, &y).unwrap();
        let expect = plcc(&ranks_oracle(&x), &ranks_oracle(&y)).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn srocc_invariant_under_strictly_increasing_transforms() {
        let x = lcg_series(77, 40, 4.0);
        let y = lcg_series(78, 40, 9.0);
        let base = srocc(&x, &y).unwrap();
        let warped: Vec<f64> = x.iter().map(|v| (v + 1.0).ln() * 3.0).collect();
        assert_eq!(srocc(&warped, &y).unwrap(), base);
    }

    #[test]
    fn rmse_basics_and_random_oracle() {
        let x = lcg_series(1, 20, 7.0);
        assert_eq!(rmse(&x, &x).unwrap(), 0.0);
        let off: Vec<f64> = x.iter().map(|v| v + 2.5).collect();
        assert!((rmse(&x, &off).unwrap() - 2.5).abs() < 1e-12);
        let y = lcg_series(2, 20, 7.0);
        let direct = (x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / 20.0)
            .sqrt();
        assert_eq!(rmse(&x, &y).unwrap(), direct);
    }

    #[test]
    fn rmse_triangle_bound_on_random_triples() {
        for seed in 0..50u64 {
            let a = lcg_series(seed * 3 + 1, 15, 5.0);
            let b = lcg_series(seed * 3 + 2, 15, 5.0);
            let c = lcg_series(seed * 3 + 3, 15, 5.0);
            let ac = rmse(&a, &c).unwrap();
            let ab = rmse(&a, &b).unwrap();
            let bc = rmse(&b, &c).unwrap();
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn logistic_recovers_planted_parameters_at_prediction_level() {
        let planted = Logistic4Params {
            beta1: 80.0,
            beta2: 20.0,
            beta3: 45.0,
            beta4: 8.0,
        };
        let scores: Vec<f64> = (0..60).map(|i| 20.0 + i as f64).collect();
        let dmos = planted.map_all(&scores);
        let fitted = fit_logistic4(&scores, &dmos, None).unwrap();
        let pred = fitted.map_all(&scores);
        assert!(rmse(&pred, &dmos).unwrap() < 1e-6);
        assert!(fitted.beta4 != 0.0);
    }

    #[test]
    fn logistic_on_linear_data_keeps_plcc() {
        let scores = lcg_series(12, 50, 40.0);
        let dmos: Vec<f64> = scores.iter().map(|v| 1.5 * v + 12.0).collect();
        let fitted = fit_logistic4(&scores, &dmos, None).unwrap();
        let mapped = fitted.map_all(&scores);
        let raw = plcc(&scores, &dmos).unwrap();
        let after = plcc(&mapped, &dmos).unwrap();
        assert!(after >= raw - 1e-9, "{after} < {raw}");
        // A monotone map preserves ranks exactly.
        assert_eq!(
            srocc(&mapped, &dmos).unwrap(),
            srocc(&scores, &dmos).unwrap()
        );
    }

    #[test]
    fn logistic_init_kept_when_already_optimal() {
        let planted = Logistic4Params {
            beta1: 70.0,
            beta2: 10.0,
            beta3: 30.0,
            beta4: 5.0,
        };
        let scores: Vec<f64> = (0..40).map(|i| 10.0 + i as f64).collect();
        let dmos = planted.map_all(&scores);
        let refit = fit_logistic4(&scores, &dmos, Some(planted)).unwrap();
        let res_planted = sse(&planted, &scores, &dmos);
        let res_refit = sse(&refit, &scores, &dmos);
        assert!(res_refit <= res_planted + 1e-12);
    }

    #[test]
    fn logistic_rejects_degenerate_input() {
        assert!(fit_logistic4(&[1.0, 1.0, 1.0, 1.0], &[1.0, 2.0, 3.0, 4.0], None).is_err());
        assert!(fit_logistic4(&[1.0, 2.0], &[1.0, 2.0], None).is_err());
    }

    fn groups(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("g{i:02}")).collect()
    }

    #[test]
    fn grouped_split_counts_and_determinism() {
        let g = groups(10);
        let (train, test) = grouped_shuffle_split(&g, 0.2, 7).unwrap();
        assert_eq!(test.len(), 2);
        assert_eq!(train.len(), 8);
        let again = grouped_shuffle_split(&g, 0.2, 7).unwrap();
        assert_eq!((train, test), again);
        let different = grouped_shuffle_split(&g, 0.2, 8).unwrap();
        assert_ne!(again, different);
    }

    #[test]
    fn grouped_split_partitions_exactly() {
        let g = groups(13);
        for seed in 0..200 {
            let (train, test) = grouped_shuffle_split(&g, 0.25, seed).unwrap();
            let mut all: Vec<String> = train.iter().chain(test.iter()).cloned().collect();
            all.sort();
            let mut expect = g.clone();
            expect.sort();
            assert_eq!(all, expect);
            assert!(train.iter().all(|t| !test.contains(t)));
        }
    }

    #[test]
    fn grouped_split_needs_two_groups() {
        assert!(matches!(
            grouped_shuffle_split(&groups(1), 0.2, 0),
            Err(Error::TooFewGroups { .. })
        ));
    }

    #[test]
    fn derive_seed_spreads_and_repeats() {
        assert_eq!(derive_seed(42, 1, 2), derive_seed(42, 1, 2));
        assert_ne!(derive_seed(42, 1, 2), derive_seed(42, 1, 3));
        assert_ne!(derive_seed(42, 1, 2), derive_seed(42, 2, 2));
        assert_ne!(derive_seed(42, 0, 0), derive_seed(43, 0, 0));
    }
}
