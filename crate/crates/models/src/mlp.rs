//! Feed-forward network trained by plain gradient descent.
//!
//! Hidden layers use the configured activation, the output layer is
//! linear. Gradients are exact backpropagation of the summed squared
//! error over a batch; the update step divides by the batch size, so
//! training descends the mean loss. No adaptive optimizer, no shuffling:
//! a fixed epoch budget over fixed batch slices keeps fits deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::spec::Activation;

fn activate(a: Activation, z: f64) -> f64 {
    match a {
        Activation::Relu => z.max(0.0),
        Activation::Tanh => z.tanh(),
    }
}

/// Derivative in terms of the pre-activation z.
fn activate_prime(a: Activation, z: f64) -> f64 {
    match a {
        Activation::Relu => {
            if z > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Activation::Tanh => {
            let t = z.tanh();
            1.0 - t * t
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNetwork {
    /// Input width, hidden widths, output width.
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    /// weights[l] has shape (layer_sizes[l+1] x layer_sizes[l]).
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpNetwork {
    /// Seeded uniform init scaled by 1/sqrt(fan_in); zero biases.
    pub fn init(layer_sizes: Vec<usize>, activation: Activation, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_sizes.len() - 1 {
            let fan_in = layer_sizes[l];
            let fan_out = layer_sizes[l + 1];
            let scale = 1.0 / (fan_in as f64).sqrt();
            let mut w = Matrix::zeros(fan_out, fan_in);
            for i in 0..fan_out {
                for j in 0..fan_in {
                    w.set(i, j, (rng.gen::<f64>() * 2.0 - 1.0) * scale);
                }
            }
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        MlpNetwork {
            layer_sizes,
            activation,
            weights,
            biases,
        }
    }

    pub fn zeroed(layer_sizes: Vec<usize>, activation: Activation) -> Self {
        let weights = (0..layer_sizes.len() - 1)
            .map(|l| Matrix::zeros(layer_sizes[l + 1], layer_sizes[l]))
            .collect();
        let biases = (0..layer_sizes.len() - 1)
            .map(|l| vec![0.0; layer_sizes[l + 1]])
            .collect();
        MlpNetwork {
            layer_sizes,
            activation,
            weights,
            biases,
        }
    }

    fn n_layers(&self) -> usize {
        self.weights.len()
    }

    /// Pre-activations and activations per layer for one sample.
    fn forward_trace(&self, input: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut zs = Vec::with_capacity(self.n_layers());
        let mut acts = Vec::with_capacity(self.n_layers() + 1);
        acts.push(input.to_vec());
        for l in 0..self.n_layers() {
            let prev = &acts[l];
            let w = &self.weights[l];
            let mut z = self.biases[l].clone();
            for (zi, row) in z.iter_mut().zip((0..w.n_rows()).map(|i| w.row(i))) {
                *zi += row.iter().zip(prev).map(|(a, b)| a * b).sum::<f64>();
            }
            let out = if l + 1 == self.n_layers() {
                z.clone()
            } else {
                z.iter().map(|&v| activate(self.activation, v)).collect()
            };
            zs.push(z);
            acts.push(out);
        }
        (zs, acts)
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_trace(input).1.pop().expect("output layer")
    }

    /// Summed squared error over the batch (no mean, no 1/2 factor).
    pub fn sum_squared_loss(&self, x: &Matrix, y: &Matrix) -> f64 {
        let mut loss = 0.0;
        for (row, target) in x.rows().zip(y.rows()) {
            let out = self.forward(row);
            loss += out
                .iter()
                .zip(target)
                .map(|(o, t)| (o - t) * (o - t))
                .sum::<f64>();
        }
        loss
    }

    /// Exact backpropagation gradients of [`Self::sum_squared_loss`].
    /// Contributions add per sample, so duplicating a sample doubles its
    /// share of the gradient.
    pub fn gradients(&self, x: &Matrix, y: &Matrix) -> MlpGradients {
        let mut gw: Vec<Matrix> = self
            .weights
            .iter()
            .map(|w| Matrix::zeros(w.n_rows(), w.n_cols()))
            .collect();
        let mut gb: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();

        for (row, target) in x.rows().zip(y.rows()) {
            let (zs, acts) = self.forward_trace(row);
            let last = self.n_layers() - 1;
            // linear output: dL/dz = 2 (out - target)
            let mut delta: Vec<f64> = acts[last + 1]
                .iter()
                .zip(target)
                .map(|(o, t)| 2.0 * (o - t))
                .collect();
            for l in (0..=last).rev() {
                for (i, d) in delta.iter().enumerate() {
                    gb[l][i] += d;
                    for (j, a) in acts[l].iter().enumerate() {
                        let cur = gw[l].get(i, j);
                        gw[l].set(i, j, cur + d * a);
                    }
                }
                if l > 0 {
                    let mut next = vec![0.0; self.weights[l].n_cols()];
                    for (j, nd) in next.iter_mut().enumerate() {
                        let mut s = 0.0;
                        for (i, d) in delta.iter().enumerate() {
                            s += self.weights[l].get(i, j) * d;
                        }
                        *nd = s * activate_prime(self.activation, zs[l - 1][j]);
                    }
                    delta = next;
                }
            }
        }
        MlpGradients {
            weights: gw,
            biases: gb,
        }
    }

    fn apply_update(&mut self, grads: &MlpGradients, scale: f64) {
        for l in 0..self.n_layers() {
            for i in 0..self.weights[l].n_rows() {
                for j in 0..self.weights[l].n_cols() {
                    let cur = self.weights[l].get(i, j);
                    self.weights[l].set(i, j, cur - scale * grads.weights[l].get(i, j));
                }
            }
            for (b, g) in self.biases[l].iter_mut().zip(&grads.biases[l]) {
                *b -= scale * g;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpFit {
    pub network: MlpNetwork,
}

#[allow(clippy::too_many_arguments)]
pub fn fit(
    hidden_layers: &[usize],
    activation: Activation,
    learning_rate: f64,
    epochs: usize,
    batch_size: usize,
    init_seed: u64,
    x: &Matrix,
    y: &Matrix,
) -> MlpFit {
    let mut sizes = Vec::with_capacity(hidden_layers.len() + 2);
    sizes.push(x.n_cols());
    sizes.extend_from_slice(hidden_layers);
    sizes.push(y.n_cols());
    let mut network = MlpNetwork::init(sizes, activation, init_seed);

    let n = x.n_rows();
    let indices: Vec<usize> = (0..n).collect();
    for _ in 0..epochs {
        for chunk in indices.chunks(batch_size) {
            let bx = x.select_rows(chunk);
            let by = y.select_rows(chunk);
            let grads = network.gradients(&bx, &by);
            network.apply_update(&grads, learning_rate / chunk.len() as f64);
        }
    }
    MlpFit { network }
}

impl MlpFit {
    pub fn predict(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.n_rows(), *self.network.layer_sizes.last().unwrap());
        for (i, row) in x.rows().enumerate() {
            out.set_row(i, &self.network.forward(row));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_net() -> MlpNetwork {
        MlpNetwork::init(vec![2, 3, 2], Activation::Tanh, 42)
    }

    #[test]
    fn zero_network_zero_targets_has_zero_output_bias_gradient() {
        let net = MlpNetwork::zeroed(vec![2, 3, 1], Activation::Relu);
        let x = Matrix::from_rows(&[vec![1.0, -2.0]]).unwrap();
        let y = Matrix::from_rows(&[vec![0.0]]).unwrap();
        let g = net.gradients(&x, &y);
        assert!(g.biases.last().unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn duplicated_sample_doubles_its_gradient_contribution() {
        let net = toy_net();
        let x1 = Matrix::from_rows(&[vec![0.3, -0.7]]).unwrap();
        let y1 = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        let single = net.gradients(&x1, &y1);
        let x2 = Matrix::from_rows(&[vec![0.3, -0.7], vec![0.3, -0.7]]).unwrap();
        let y2 = Matrix::from_rows(&[vec![1.0, -1.0], vec![1.0, -1.0]]).unwrap();
        let doubled = net.gradients(&x2, &y2);
        for l in 0..single.weights.len() {
            for (a, b) in single.weights[l]
                .as_slice()
                .iter()
                .zip(doubled.weights[l].as_slice())
            {
                assert!((2.0 * a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut net = toy_net();
        let x = Matrix::from_rows(&[vec![0.5, -1.0], vec![-0.25, 0.75], vec![1.5, 0.1]]).unwrap();
        let y = Matrix::from_rows(&[vec![0.2, -0.4], vec![1.0, 0.3], vec![-0.6, 0.9]]).unwrap();
        let analytic = net.gradients(&x, &y);
        let h = 1e-5;
        for l in 0..net.weights.len() {
            for i in 0..net.weights[l].n_rows() {
                for j in 0..net.weights[l].n_cols() {
                    let orig = net.weights[l].get(i, j);
                    net.weights[l].set(i, j, orig + h);
                    let up = net.sum_squared_loss(&x, &y);
                    net.weights[l].set(i, j, orig - h);
                    let down = net.sum_squared_loss(&x, &y);
                    net.weights[l].set(i, j, orig);
                    let numeric = (up - down) / (2.0 * h);
                    let a = analytic.weights[l].get(i, j);
                    let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                    assert!(rel < 1e-4, "layer {l} w[{i}][{j}]: {a} vs {numeric}");
                }
            }
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let x = Matrix::from_rows(&[vec![0.0], vec![0.5], vec![1.0], vec![1.5]]).unwrap();
        let y = Matrix::column_vector(&[0.0, 1.0, 2.0, 3.0]);
        let a = fit(&[8], Activation::Relu, 0.01, 50, 2, 9, &x, &y);
        let b = fit(&[8], Activation::Relu, 0.01, 50, 2, 9, &x, &y);
        assert_eq!(a.network, b.network);
    }

    #[test]
    fn learns_a_linear_map() {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 10.0 - 1.0]).collect();
        let x = Matrix::from_rows(&xs).unwrap();
        let targets: Vec<f64> = xs.iter().map(|r| 3.0 * r[0] + 0.5).collect();
        let y = Matrix::column_vector(&targets);
        let model = fit(&[16], Activation::Tanh, 0.02, 800, 20, 3, &x, &y);
        let pred = model.predict(&x);
        let mse: f64 = (0..20)
            .map(|i| (pred.get(i, 0) - targets[i]).powi(2))
            .sum::<f64>()
            / 20.0;
        assert!(mse < 0.05, "mse {mse}");
    }
}
