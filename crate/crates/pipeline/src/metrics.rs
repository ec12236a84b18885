//! Mean absolute error and mean squared error.

use crate::PipelineError;

fn check(y: &[f64], yhat: &[f64]) -> Result<(), PipelineError> {
    if y.is_empty() {
        return Err(PipelineError::Empty("metrics need at least one value".into()));
    }
    if y.len() != yhat.len() {
        return Err(PipelineError::LengthMismatch(format!(
            "{} targets vs {} predictions",
            y.len(),
            yhat.len()
        )));
    }
    Ok(())
}

/// `(1/N) sum |y_i - yhat_i|`
pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64, PipelineError> {
    check(y, yhat)?;
    Ok(y.iter()
        .zip(yhat)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / y.len() as f64)
}

/// `(1/N) sum (y_i - yhat_i)^2`
pub fn mse(y: &[f64], yhat: &[f64]) -> Result<f64, PipelineError> {
    check(y, yhat)?;
    Ok(y.iter()
        .zip(yhat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / y.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fits_score_zero() {
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn unit_errors() {
        assert_eq!(mae(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mse(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn asymmetric_errors() {
        assert_eq!(mae(&[0.0, 4.0], &[0.0, 0.0]).unwrap(), 2.0);
        assert_eq!(mse(&[0.0, 4.0], &[0.0, 0.0]).unwrap(), 8.0);
    }

    #[test]
    fn constant_residuals_make_mse_the_square_of_mae() {
        // spot check; the inequality does not hold in general
        let y = [1.0, 2.0, 3.0];
        let yhat = [2.5, 3.5, 4.5];
        let mae_v = mae(&y, &yhat).unwrap();
        let mse_v = mse(&y, &yhat).unwrap();
        assert!((mse_v - mae_v * mae_v).abs() < 1e-12);
    }

    #[test]
    fn error_contracts() {
        assert!(mae(&[], &[]).is_err());
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }
}
