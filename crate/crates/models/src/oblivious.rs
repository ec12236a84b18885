//! Gradient boosting over oblivious (symmetric) trees: every node of a
//! level shares one (feature, threshold) split, so a depth-d tree is a
//! lookup table over d comparisons. The level split is chosen by exact
//! scan to minimize the total squared error across all current leaves.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObliviousTree {
    /// One (feature, threshold) per level, root first.
    pub levels: Vec<(usize, f64)>,
    /// 2^levels leaf values; the leaf index is built by the per-level
    /// comparisons, high bit first. Empty leaves hold 0.
    pub leaf_values: Vec<f64>,
}

impl ObliviousTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut idx = 0usize;
        for &(feature, threshold) in &self.levels {
            idx = idx * 2 + usize::from(row[feature] > threshold);
        }
        self.leaf_values[idx]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObliviousGbFit {
    pub base: f64,
    pub learning_rate: f64,
    pub trees: Vec<ObliviousTree>,
}

struct LeafAccum {
    count: f64,
    sum: f64,
    sum_sq: f64,
}

impl LeafAccum {
    fn sse(&self) -> f64 {
        if self.count > 0.0 {
            (self.sum_sq - self.sum * self.sum / self.count).max(0.0)
        } else {
            0.0
        }
    }
}

fn fit_oblivious_tree(
    x: &Matrix,
    residuals: &[f64],
    depth: usize,
    presorted: &[Vec<usize>],
) -> ObliviousTree {
    let n = x.n_rows();
    let p = x.n_cols();
    let mut leaf_of = vec![0usize; n];
    let mut levels = Vec::with_capacity(depth);

    for level in 0..depth {
        let n_leaves = 1usize << level;
        let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, cost)

        for (feature, order) in presorted.iter().enumerate().take(p) {
            // everything starts on the right side of the sweep
            let mut left: Vec<LeafAccum> = (0..n_leaves)
                .map(|_| LeafAccum {
                    count: 0.0,
                    sum: 0.0,
                    sum_sq: 0.0,
                })
                .collect();
            let mut right: Vec<LeafAccum> = (0..n_leaves)
                .map(|_| LeafAccum {
                    count: 0.0,
                    sum: 0.0,
                    sum_sq: 0.0,
                })
                .collect();
            for &i in order {
                let leaf = leaf_of[i];
                right[leaf].count += 1.0;
                right[leaf].sum += residuals[i];
                right[leaf].sum_sq += residuals[i] * residuals[i];
            }

            for k in 0..n.saturating_sub(1) {
                let i = order[k];
                let leaf = leaf_of[i];
                let r = residuals[i];
                left[leaf].count += 1.0;
                left[leaf].sum += r;
                left[leaf].sum_sq += r * r;
                right[leaf].count -= 1.0;
                right[leaf].sum -= r;
                right[leaf].sum_sq -= r * r;

                let v = x.get(i, feature);
                let v_next = x.get(order[k + 1], feature);
                if v == v_next {
                    continue;
                }
                let cost: f64 = (0..n_leaves).map(|l| left[l].sse() + right[l].sse()).sum();
                let threshold = (v + v_next) / 2.0;
                let better = match best {
                    None => true,
                    Some((_, _, best_cost)) => cost < best_cost,
                };
                if better {
                    best = Some((feature, threshold, cost));
                }
            }
        }

        // no admissible split anywhere: the tree stops growing early
        let Some((feature, threshold, _)) = best else {
            break;
        };
        levels.push((feature, threshold));
        for (i, leaf) in leaf_of.iter_mut().enumerate() {
            *leaf = *leaf * 2 + usize::from(x.get(i, feature) > threshold);
        }
    }

    let n_leaves = 1usize << levels.len();
    let mut sums = vec![0.0; n_leaves];
    let mut counts = vec![0usize; n_leaves];
    for i in 0..n {
        sums[leaf_of[i]] += residuals[i];
        counts[leaf_of[i]] += 1;
    }
    let leaf_values = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    ObliviousTree {
        levels,
        leaf_values,
    }
}

pub fn fit(
    n_estimators: usize,
    learning_rate: f64,
    depth: usize,
    x: &Matrix,
    y: &[f64],
) -> ObliviousGbFit {
    let n = x.n_rows();
    let base = y.iter().sum::<f64>() / n as f64;
    // feature orders never change across stages
    let presorted: Vec<Vec<usize>> = (0..x.n_cols())
        .map(|j| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| x.get(a, j).partial_cmp(&x.get(b, j)).unwrap().then(a.cmp(&b)));
            order
        })
        .collect();

    let mut current = vec![base; n];
    let mut trees = Vec::with_capacity(n_estimators);
    for _ in 0..n_estimators {
        let residuals: Vec<f64> = y.iter().zip(&current).map(|(t, c)| t - c).collect();
        let tree = fit_oblivious_tree(x, &residuals, depth, &presorted);
        for (c, row) in current.iter_mut().zip(x.rows()) {
            *c += learning_rate * tree.predict_row(row);
        }
        trees.push(tree);
    }
    ObliviousGbFit {
        base,
        learning_rate,
        trees,
    }
}

impl ObliviousGbFit {
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
