//! Zero-mean, unit-variance feature standardization, `x' = (x - mu) / sigma`,
//! with population standard deviation (divisor n). Zero-variance features
//! map to 0 and invert back to their constant value.

use railbench_models::Matrix;

use crate::PipelineError;

#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &Matrix) -> Result<Scaler, PipelineError> {
        let n = x.n_rows();
        if n == 0 {
            return Err(PipelineError::Empty("scaler fit needs at least one row".into()));
        }
        let p = x.n_cols();
        let mut mu = vec![0.0; p];
        for row in x.rows() {
            for (m, v) in mu.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mu {
            *m /= n as f64;
        }
        let mut var = vec![0.0; p];
        for row in x.rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mu) {
                let d = v - m;
                *s += d * d;
            }
        }
        let sigma = var.iter().map(|s| (s / n as f64).sqrt()).collect();
        Ok(Scaler { mu, sigma })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    fn check_width(&self, x: &Matrix) -> Result<(), PipelineError> {
        if x.n_cols() != self.mu.len() {
            return Err(PipelineError::LengthMismatch(format!(
                "scaler fitted on {} features, got {}",
                self.mu.len(),
                x.n_cols()
            )));
        }
        Ok(())
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix, PipelineError> {
        self.check_width(x)?;
        let mut out = Matrix::zeros(x.n_rows(), x.n_cols());
        for (i, row) in x.rows().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let s = self.sigma[j];
                let t = if s > 0.0 { (v - self.mu[j]) / s } else { 0.0 };
                out.set(i, j, t);
            }
        }
        Ok(out)
    }

    pub fn inverse_transform(&self, x: &Matrix) -> Result<Matrix, PipelineError> {
        self.check_width(x)?;
        let mut out = Matrix::zeros(x.n_rows(), x.n_cols());
        for (i, row) in x.rows().enumerate() {
            for (j, v) in row.iter().enumerate() {
                out.set(i, j, v * self.sigma[j] + self.mu[j]);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_column_matches_the_formula() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let scaler = Scaler::fit(&x).unwrap();
        assert_eq!(scaler.mu(), &[2.0]);
        assert!((scaler.sigma()[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let t = scaler.transform(&x).unwrap();
        let want = (3.0f64 / 2.0).sqrt(); // 1.2247...
        assert!((t.get(0, 0) + want).abs() < 1e-12);
        assert!(t.get(1, 0).abs() < 1e-15);
        assert!((t.get(2, 0) - want).abs() < 1e-12);
    }

    #[test]
    fn constant_column_maps_to_zero_and_inverts() {
        let x = Matrix::from_rows(&[vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        let scaler = Scaler::fit(&x).unwrap();
        let t = scaler.transform(&x).unwrap();
        assert!(t.as_slice().iter().all(|&v| v == 0.0));
        let back = scaler.inverse_transform(&t).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn transform_then_inverse_is_identity() {
        let x = Matrix::from_rows(&[
            vec![1.5, -3.0],
            vec![0.25, 2.0],
            vec![-7.0, 0.5],
            vec![4.0, 4.0],
        ])
        .unwrap();
        let scaler = Scaler::fit(&x).unwrap();
        let back = scaler
            .inverse_transform(&scaler.transform(&x).unwrap())
            .unwrap();
        for (a, b) in x.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fitted_data_is_standardized() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![i as f64 * 3.7 + 11.0, (i as f64).powi(2)])
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let scaler = Scaler::fit(&x).unwrap();
        let t = scaler.transform(&x).unwrap();
        for j in 0..2 {
            let col = t.column(j);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < 1e-10, "mean {mean}");
            assert!((var - 1.0).abs() < 1e-8, "var {var}");
        }
    }

    #[test]
    fn unseen_data_uses_training_statistics() {
        let train = Matrix::from_rows(&[vec![0.0], vec![10.0]]).unwrap();
        let scaler = Scaler::fit(&train).unwrap();
        let t = scaler
            .transform(&Matrix::from_rows(&[vec![20.0]]).unwrap())
            .unwrap();
        // (20 - 5) / 5 = 3
        assert!((t.get(0, 0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn width_mismatch_rejected() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let scaler = Scaler::fit(&x).unwrap();
        let narrow = Matrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(scaler.transform(&narrow).is_err());
    }
}
