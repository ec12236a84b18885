//! AdaBoost.R2 over weighted regression trees.
//!
//! Per round: fit a sample-weighted tree, normalize per-sample absolute
//! losses by the round maximum, compute the weighted average loss
//! `l_bar`, set `beta = l_bar / (1 - l_bar)`, multiply each sample weight
//! by `beta^(1 - loss_i)`, and renormalize. A round with `l_bar >= 0.5`
//! stops the ensemble (the round is kept only when it is the first, so a
//! fitted model is never empty). Prediction is the weighted median of
//! the estimator outputs with estimator weights `ln(1/beta)`.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::spec::AdaLoss;
use crate::tree::{RegressionTree, TreeParams};

/// A perfect round (`l_bar` ~ 0) gets this stand-in beta; its estimator
/// weight ln(1/beta) then dominates any finite ensemble.
const PERFECT_BETA: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostFit {
    pub estimators: Vec<RegressionTree>,
    pub betas: Vec<f64>,
    /// Weighted average loss per kept round.
    pub avg_losses: Vec<f64>,
    /// Sample weights after the final kept round.
    pub final_sample_weights: Vec<f64>,
}

pub fn fit(
    n_estimators: usize,
    base_tree_depth: usize,
    loss: AdaLoss,
    x: &Matrix,
    y: &[f64],
) -> AdaBoostFit {
    let n = x.n_rows();
    let params = TreeParams {
        max_depth: base_tree_depth,
        min_samples_leaf: 1,
    };
    let mut weights = vec![1.0 / n as f64; n];
    let mut estimators = Vec::new();
    let mut betas = Vec::new();
    let mut avg_losses = Vec::new();

    for _ in 0..n_estimators {
        let tree = RegressionTree::fit(x, y, &weights, params);
        let preds = tree.predict(x);
        let abs_err: Vec<f64> = preds.iter().zip(y).map(|(p, t)| (p - t).abs()).collect();
        let max_err = abs_err.iter().cloned().fold(0.0, f64::max);

        if max_err <= 0.0 {
            // perfect fit: keep it and stop
            estimators.push(tree);
            betas.push(PERFECT_BETA);
            avg_losses.push(0.0);
            break;
        }
        let losses: Vec<f64> = abs_err
            .iter()
            .map(|&e| {
                let r = e / max_err;
                match loss {
                    AdaLoss::Linear => r,
                    AdaLoss::Square => r * r,
                    AdaLoss::Exponential => 1.0 - (-r).exp(),
                }
            })
            .collect();
        let l_bar: f64 = weights.iter().zip(&losses).map(|(w, l)| w * l).sum();

        if l_bar >= 0.5 {
            if estimators.is_empty() {
                estimators.push(tree);
                betas.push(l_bar / (1.0 - l_bar).max(f64::MIN_POSITIVE));
                avg_losses.push(l_bar);
            }
            break;
        }
        let beta = if l_bar <= 0.0 {
            PERFECT_BETA
        } else {
            l_bar / (1.0 - l_bar)
        };
        estimators.push(tree);
        betas.push(beta);
        avg_losses.push(l_bar);
        if beta <= PERFECT_BETA {
            break;
        }

        for (w, l) in weights.iter_mut().zip(&losses) {
            *w *= beta.powf(1.0 - l);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            break;
        }
        for w in &mut weights {
            *w /= total;
        }
    }

    AdaBoostFit {
        estimators,
        betas,
        avg_losses,
        final_sample_weights: weights,
    }
}

/// Weighted median of `(value, weight)` pairs: the smallest value whose
/// cumulative weight reaches half the total. Order ties are stable in
/// the estimator index.
pub fn weighted_median(pairs: &mut [(f64, f64)]) -> f64 {
    debug_assert!(!pairs.is_empty());
    if pairs.len() == 1 {
        return pairs[0].0;
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = pairs.iter().map(|(_, w)| w).sum();
    let mut acc = 0.0;
    for &(v, w) in pairs.iter() {
        acc += w;
        if acc >= total / 2.0 {
            return v;
        }
    }
    pairs.last().unwrap().0
}

impl AdaBoostFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut pairs: Vec<(f64, f64)> = self
            .estimators
            .iter()
            .zip(&self.betas)
            .map(|(tree, beta)| (tree.predict_row(row), (1.0 / beta).ln()))
            .collect();
        weighted_median(&mut pairs)
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| self.predict_row(r)).collect()
    }
}
