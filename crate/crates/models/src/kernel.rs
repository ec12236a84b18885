//! Kernel evaluation shared by KRR and SVR.

use crate::spec::Kernel;

pub fn eval(kernel: &Kernel, a: &[f64], b: &[f64]) -> f64 {
    match kernel {
        Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        Kernel::Rbf { gamma } => {
            let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            (-gamma * sq).exp()
        }
    }
}

/// Full n x n Gram matrix, row-major.
pub fn gram(kernel: &Kernel, rows: &[&[f64]]) -> Vec<f64> {
    let n = rows.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = eval(kernel, rows[i], rows[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}
