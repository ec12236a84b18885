//! Weighted CART regression tree with exact split search.
//!
//! Splits scan every midpoint between consecutive distinct feature
//! values under the weighted variance-reduction criterion. Ties break
//! toward the lowest feature index, then the lowest threshold. Leaf
//! values are weighted target means.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    /// 0 means the root itself is a leaf.
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    w: &'a [f64],
    params: TreeParams,
    nodes: Vec<Node>,
}

/// Weighted mean with an unweighted fallback when the weight mass in a
/// node has underflowed to zero.
fn node_mean(y: &[f64], w: &[f64], indices: &[usize]) -> f64 {
    let sw: f64 = indices.iter().map(|&i| w[i]).sum();
    if sw > 0.0 {
        indices.iter().map(|&i| w[i] * y[i]).sum::<f64>() / sw
    } else {
        indices.iter().map(|&i| y[i]).sum::<f64>() / indices.len().max(1) as f64
    }
}

fn node_sse(y: &[f64], w: &[f64], indices: &[usize]) -> f64 {
    let sw: f64 = indices.iter().map(|&i| w[i]).sum();
    if sw <= 0.0 {
        return 0.0;
    }
    let swy: f64 = indices.iter().map(|&i| w[i] * y[i]).sum();
    let swyy: f64 = indices.iter().map(|&i| w[i] * y[i] * y[i]).sum();
    (swyy - swy * swy / sw).max(0.0)
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    cost: f64,
    split_pos: usize,
    order: Vec<usize>,
}

impl Builder<'_> {
    fn build(&mut self, indices: &[usize], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node::Leaf {
            value: node_mean(self.y, self.w, indices),
        });

        if depth >= self.params.max_depth || indices.len() < 2 * self.params.min_samples_leaf {
            return id;
        }
        let parent_sse = node_sse(self.y, self.w, indices);
        if parent_sse <= 1e-12 {
            return id;
        }
        let Some(best) = self.find_split(indices, parent_sse) else {
            return id;
        };

        let (left_idx, right_idx) = best.order.split_at(best.split_pos);
        let left = self.build(left_idx, depth + 1);
        let right = self.build(right_idx, depth + 1);
        self.nodes[id as usize] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn find_split(&self, indices: &[usize], parent_sse: f64) -> Option<BestSplit> {
        let p = self.x.n_cols();
        let min_leaf = self.params.min_samples_leaf;
        let mut best: Option<BestSplit> = None;

        for feature in 0..p {
            let mut order = indices.to_vec();
            order.sort_by(|&a, &b| {
                self.x
                    .get(a, feature)
                    .partial_cmp(&self.x.get(b, feature))
                    .unwrap()
                    .then(a.cmp(&b))
            });

            // prefix accumulators over the sorted order
            let mut sw_l = 0.0;
            let mut swy_l = 0.0;
            let mut swyy_l = 0.0;
            let sw: f64 = order.iter().map(|&i| self.w[i]).sum();
            let swy: f64 = order.iter().map(|&i| self.w[i] * self.y[i]).sum();
            let swyy: f64 = order.iter().map(|&i| self.w[i] * self.y[i] * self.y[i]).sum();

            for k in 1..order.len() {
                let i = order[k - 1];
                sw_l += self.w[i];
                swy_l += self.w[i] * self.y[i];
                swyy_l += self.w[i] * self.y[i] * self.y[i];

                let v_prev = self.x.get(i, feature);
                let v_next = self.x.get(order[k], feature);
                if v_prev == v_next {
                    continue;
                }
                if k < min_leaf || order.len() - k < min_leaf {
                    continue;
                }
                let sse_side = |sw: f64, swy: f64, swyy: f64| {
                    if sw > 0.0 {
                        (swyy - swy * swy / sw).max(0.0)
                    } else {
                        0.0
                    }
                };
                let cost = sse_side(sw_l, swy_l, swyy_l)
                    + sse_side(sw - sw_l, swy - swy_l, swyy - swyy_l);
                let improves = match &best {
                    None => cost < parent_sse - 1e-12,
                    Some(b) => cost < b.cost,
                };
                if improves {
                    best = Some(BestSplit {
                        feature,
                        threshold: (v_prev + v_next) / 2.0,
                        cost,
                        split_pos: k,
                        order: order.clone(),
                    });
                }
            }
        }
        best
    }
}

impl RegressionTree {
    pub fn fit(x: &Matrix, y: &[f64], weights: &[f64], params: TreeParams) -> RegressionTree {
        debug_assert_eq!(x.n_rows(), y.len());
        debug_assert_eq!(y.len(), weights.len());
        let indices: Vec<usize> = (0..x.n_rows()).collect();
        let mut builder = Builder {
            x,
            y,
            w: weights,
            params,
            nodes: Vec::new(),
        };
        builder.build(&indices, 0);
        RegressionTree {
            nodes: builder.nodes,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| self.predict_row(r)).collect()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}
