//! k-nearest-neighbor regression: predictions average the targets of the
//! k closest training rows, optionally weighted by inverse distance.
//! Distance ties break toward the lower training-row index.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::ModelError;
use crate::spec::KnnWeighting;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnFit {
    pub k: usize,
    pub weighting: KnnWeighting,
    pub x: Matrix,
    pub y: Matrix,
}

pub fn fit(
    k: usize,
    weighting: KnnWeighting,
    x: &Matrix,
    y: &Matrix,
) -> Result<KnnFit, ModelError> {
    if k > x.n_rows() {
        return Err(ModelError::KTooLarge { k, n: x.n_rows() });
    }
    Ok(KnnFit {
        k,
        weighting,
        x: x.clone(),
        y: y.clone(),
    })
}

impl KnnFit {
    pub fn predict(&self, x: &Matrix) -> Matrix {
        let q = self.y.n_cols();
        let mut out = Matrix::zeros(x.n_rows(), q);
        let mut scored: Vec<(f64, usize)> = Vec::with_capacity(self.x.n_rows());
        for (m, query) in x.rows().enumerate() {
            scored.clear();
            scored.extend(self.x.rows().enumerate().map(|(i, row)| {
                let d2: f64 = row
                    .iter()
                    .zip(query)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2.sqrt(), i)
            }));
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let neighbors = &scored[..self.k];

            let mut row_out = vec![0.0; q];
            match self.weighting {
                KnnWeighting::Uniform => {
                    for &(_, i) in neighbors {
                        for (acc, v) in row_out.iter_mut().zip(self.y.row(i)) {
                            *acc += v;
                        }
                    }
                    for acc in &mut row_out {
                        *acc /= self.k as f64;
                    }
                }
                KnnWeighting::InverseDistance => {
                    // exact matches dominate: average only the zero-distance
                    // neighbors when any exist
                    let exact: Vec<usize> = neighbors
                        .iter()
                        .filter(|(d, _)| *d <= 0.0)
                        .map(|&(_, i)| i)
                        .collect();
                    if !exact.is_empty() {
                        for &i in &exact {
                            for (acc, v) in row_out.iter_mut().zip(self.y.row(i)) {
                                *acc += v;
                            }
                        }
                        for acc in &mut row_out {
                            *acc /= exact.len() as f64;
                        }
                    } else {
                        let mut total = 0.0;
                        for &(d, i) in neighbors {
                            let w = 1.0 / d;
                            total += w;
                            for (acc, v) in row_out.iter_mut().zip(self.y.row(i)) {
                                *acc += w * v;
                            }
                        }
                        for acc in &mut row_out {
                            *acc /= total;
                        }
                    }
                }
            }
            out.set_row(m, &row_out);
        }
        out
    }
}
