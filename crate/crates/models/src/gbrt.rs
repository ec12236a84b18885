//! Gradient-boosted regression trees for squared loss: each stage fits a
//! tree to the current residuals (leaf values are residual means) and
//! adds it scaled by the learning rate.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::tree::{RegressionTree, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbrtFit {
    pub base: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
}

pub fn fit(
    n_estimators: usize,
    learning_rate: f64,
    max_depth: usize,
    min_samples_leaf: usize,
    x: &Matrix,
    y: &[f64],
) -> GbrtFit {
    let n = x.n_rows();
    let base = y.iter().sum::<f64>() / n as f64;
    let params = TreeParams {
        max_depth,
        min_samples_leaf,
    };
    let weights = vec![1.0; n];
    let mut current: Vec<f64> = vec![base; n];
    let mut trees = Vec::with_capacity(n_estimators);
    for _ in 0..n_estimators {
        let residuals: Vec<f64> = y.iter().zip(&current).map(|(t, c)| t - c).collect();
        let tree = RegressionTree::fit(x, &residuals, &weights, params);
        for (c, row) in current.iter_mut().zip(x.rows()) {
            *c += learning_rate * tree.predict_row(row);
        }
        trees.push(tree);
    }
    GbrtFit {
        base,
        learning_rate,
        trees,
    }
}

impl GbrtFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base
            + self.learning_rate
                * self
                    .trees
                    .iter()
                    .map(|t| t.predict_row(row))
                    .sum::<f64>()
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| self.predict_row(r)).collect()
    }

    /// Predictions after each boosting stage, index 0 being the constant
    /// base model. Used to check the stage-wise training error.
    pub fn staged_predict(&self, x: &Matrix) -> Vec<Vec<f64>> {
        let n = x.n_rows();
        let mut stages = Vec::with_capacity(self.trees.len() + 1);
        let mut current = vec![self.base; n];
        stages.push(current.clone());
        for tree in &self.trees {
            for (c, row) in current.iter_mut().zip(x.rows()) {
                *c += self.learning_rate * tree.predict_row(row);
            }
            stages.push(current.clone());
        }
        stages
    }
}
