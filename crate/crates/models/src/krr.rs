//! Kernel ridge regression: solves `(K + lambda I) alpha = y` by Cholesky
//! factorization, escalating the ridge from a 1e-10 floor when the kernel
//! matrix is numerically singular.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::ModelError;
use crate::kernel;
use crate::linalg::{cholesky_in_place, cholesky_solve};
use crate::spec::Kernel;

const RIDGE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrrFit {
    pub kernel: Kernel,
    /// Ridge actually used after any escalation.
    pub lambda_used: f64,
    pub x: Matrix,
    /// Dual coefficients, one column per output.
    pub alpha: Matrix,
}

pub fn fit(kernel: &Kernel, lambda: f64, x: &Matrix, y: &Matrix) -> Result<KrrFit, ModelError> {
    let n = x.n_rows();
    let rows: Vec<&[f64]> = x.rows().collect();
    let k = kernel::gram(kernel, &rows);

    let mut lambda_used = lambda;
    let mut factor = None;
    for attempt in 0..4 {
        let ridge = match attempt {
            0 => lambda,
            1 => lambda.max(RIDGE_FLOOR),
            n_try => lambda.max(RIDGE_FLOOR) * 100f64.powi(n_try - 1),
        };
        let mut a = k.clone();
        for i in 0..n {
            a[i * n + i] += ridge;
        }
        if cholesky_in_place(&mut a, n).is_ok() {
            lambda_used = ridge;
            factor = Some(a);
            break;
        }
    }
    let factor = factor.ok_or(ModelError::SingularKernel)?;

    let q = y.n_cols();
    let mut alpha = Matrix::zeros(n, q);
    for j in 0..q {
        let col = y.column(j);
        let a_j = cholesky_solve(&factor, n, &col);
        for (i, v) in a_j.into_iter().enumerate() {
            alpha.set(i, j, v);
        }
    }
    Ok(KrrFit {
        kernel: *kernel,
        lambda_used,
        x: x.clone(),
        alpha,
    })
}

impl KrrFit {
    pub fn predict(&self, x: &Matrix) -> Matrix {
        let q = self.alpha.n_cols();
        let mut out = Matrix::zeros(x.n_rows(), q);
        for (m, query) in x.rows().enumerate() {
            let mut acc = vec![0.0; q];
            for (i, train_row) in self.x.rows().enumerate() {
                let kv = kernel::eval(&self.kernel, train_row, query);
                for (j, a) in acc.iter_mut().enumerate() {
                    *a += kv * self.alpha.get(i, j);
                }
            }
            out.set_row(m, &acc);
        }
        out
    }
}
