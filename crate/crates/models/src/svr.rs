//! Epsilon-insensitive support vector regression solved by pairwise
//! coordinate ascent on the dual (SMO style).
//!
//! The dual is kept in the net-coefficient form `beta_i = alpha_i -
//! alpha*_i` with `beta_i` in `[-C, C]` and `sum(beta) = 0`:
//!
//! `W(beta) = -1/2 beta' K beta + y' beta - epsilon * sum |beta_i|`
//!
//! A pair `(i, j)` moves along `beta_i += t, beta_j -= t`, which keeps
//! the equality constraint; the one-dimensional objective is piecewise
//! quadratic in `t` (kinks where a coefficient crosses zero), so the
//! exact piecewise maximizer is evaluated directly.

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::kernel;
use crate::spec::Kernel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrFit {
    pub kernel: Kernel,
    pub c: f64,
    pub epsilon: f64,
    pub tol: f64,
    /// Net dual coefficients alpha_i - alpha*_i.
    pub beta: Vec<f64>,
    pub bias: f64,
    pub x: Matrix,
    pub converged: bool,
}

struct Solver<'a> {
    k: Vec<f64>,
    y: &'a [f64],
    c: f64,
    epsilon: f64,
    tol: f64,
    n: usize,
    beta: Vec<f64>,
    /// f = K beta, without the bias.
    f: Vec<f64>,
    b: f64,
}

impl Solver<'_> {
    fn kk(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    fn error(&self, i: usize) -> f64 {
        self.f[i] + self.b - self.y[i]
    }

    fn at_upper(&self, i: usize) -> bool {
        self.beta[i] >= self.c - 1e-10 * self.c.max(1.0)
    }

    fn at_lower(&self, i: usize) -> bool {
        self.beta[i] <= -self.c + 1e-10 * self.c.max(1.0)
    }

    fn is_zero(&self, i: usize) -> bool {
        self.beta[i].abs() <= 1e-12 * self.c.max(1.0)
    }

    /// KKT violation magnitude for point i under the current bias.
    fn violation(&self, i: usize) -> f64 {
        let e = self.error(i);
        if self.is_zero(i) {
            (e.abs() - self.epsilon).max(0.0)
        } else if self.at_upper(i) {
            (e + self.epsilon).max(0.0)
        } else if self.at_lower(i) {
            (self.epsilon - e).max(0.0)
        } else if self.beta[i] > 0.0 {
            (e + self.epsilon).abs()
        } else {
            (e - self.epsilon).abs()
        }
    }

    fn delta_objective(&self, i: usize, j: usize, t: f64, eta: f64, e_diff: f64) -> f64 {
        -0.5 * eta * t * t - t * e_diff
            - self.epsilon * ((self.beta[i] + t).abs() - self.beta[i].abs())
            - self.epsilon * ((self.beta[j] - t).abs() - self.beta[j].abs())
    }

    /// Exact maximization over the pair direction. Returns true when the
    /// coefficients moved.
    fn optimize_pair(&mut self, i: usize, j: usize) -> bool {
        let eta = self.kk(i, i) + self.kk(j, j) - 2.0 * self.kk(i, j);
        if eta <= 1e-12 {
            return false;
        }
        let e_diff = self.error(i) - self.error(j);
        let lo = (-self.c - self.beta[i]).max(self.beta[j] - self.c);
        let hi = (self.c - self.beta[i]).min(self.beta[j] + self.c);
        if hi - lo <= 1e-15 {
            return false;
        }

        let mut breaks = vec![lo, hi];
        for kink in [-self.beta[i], self.beta[j]] {
            if kink > lo && kink < hi {
                breaks.push(kink);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut best_t = 0.0;
        let mut best_gain = 0.0;
        let mut consider = |t: f64, this: &Self| {
            let gain = this.delta_objective(i, j, t, eta, e_diff);
            if gain > best_gain {
                best_gain = gain;
                best_t = t;
            }
        };
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            consider(a, self);
            consider(b, self);
            let mid = (a + b) / 2.0;
            let s_i = (self.beta[i] + mid).signum();
            let s_j = (self.beta[j] - mid).signum();
            let t_star = (-e_diff - self.epsilon * (s_i - s_j)) / eta;
            if t_star > a && t_star < b {
                consider(t_star, self);
            }
        }

        let scale = 1.0 + self.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if best_gain <= 1e-14 * scale || best_t.abs() <= 1e-14 {
            return false;
        }

        self.beta[i] += best_t;
        self.beta[j] -= best_t;
        for k_idx in 0..self.n {
            self.f[k_idx] += best_t * (self.kk(i, k_idx) - self.kk(j, k_idx));
        }
        // keep the bias aligned with a free coefficient when one exists
        for &p in &[i, j] {
            if !self.is_zero(p) && !self.at_upper(p) && !self.at_lower(p) {
                self.b = if self.beta[p] > 0.0 {
                    self.y[p] - self.epsilon - self.f[p]
                } else {
                    self.y[p] + self.epsilon - self.f[p]
                };
                break;
            }
        }
        true
    }

    /// Bias from free coefficients when available, otherwise the midpoint
    /// of the feasible bias interval implied by the bound constraints.
    fn compute_bias(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..self.n {
            if !self.is_zero(i) && !self.at_upper(i) && !self.at_lower(i) {
                sum += if self.beta[i] > 0.0 {
                    self.y[i] - self.epsilon - self.f[i]
                } else {
                    self.y[i] + self.epsilon - self.f[i]
                };
                count += 1;
            }
        }
        if count > 0 {
            return sum / count as f64;
        }
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..self.n {
            let base = self.y[i] - self.f[i];
            if self.is_zero(i) {
                lo = lo.max(base - self.epsilon);
                hi = hi.min(base + self.epsilon);
            } else if self.at_upper(i) {
                hi = hi.min(base - self.epsilon);
            } else if self.at_lower(i) {
                lo = lo.max(base + self.epsilon);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo + hi) / 2.0,
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => {
                (0..self.n).map(|i| self.y[i] - self.f[i]).sum::<f64>() / self.n as f64
            }
        }
    }

    fn second_choice(&self, i: usize) -> Vec<usize> {
        let e_i = self.error(i);
        let mut order: Vec<usize> = (0..self.n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| {
            let da = (e_i - self.error(a)).abs();
            let db = (e_i - self.error(b)).abs();
            db.partial_cmp(&da).unwrap().then(a.cmp(&b))
        });
        order
    }

    fn solve(&mut self, max_passes: usize) -> bool {
        for _ in 0..max_passes {
            self.b = self.compute_bias();
            let mut violating = 0usize;
            let mut changed = 0usize;
            for i in 0..self.n {
                if self.violation(i) <= self.tol {
                    continue;
                }
                violating += 1;
                for j in self.second_choice(i) {
                    if self.optimize_pair(i, j) {
                        changed += 1;
                        break;
                    }
                }
            }
            if violating == 0 {
                return true;
            }
            if changed == 0 {
                return false;
            }
        }
        self.b = self.compute_bias();
        (0..self.n).all(|i| self.violation(i) <= self.tol)
    }
}

pub fn fit(
    kernel: &Kernel,
    c: f64,
    epsilon: f64,
    tol: f64,
    max_passes: usize,
    x: &Matrix,
    y: &[f64],
) -> SvrFit {
    let rows: Vec<&[f64]> = x.rows().collect();
    let n = rows.len();
    let mut solver = Solver {
        k: kernel::gram(kernel, &rows),
        y,
        c,
        epsilon,
        tol,
        n,
        beta: vec![0.0; n],
        f: vec![0.0; n],
        b: 0.0,
    };
    let converged = solver.solve(max_passes);
    let bias = solver.compute_bias();
    SvrFit {
        kernel: *kernel,
        c,
        epsilon,
        tol,
        beta: solver.beta,
        bias,
        x: x.clone(),
        converged,
    }
}

impl SvrFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut acc = self.bias;
        for (i, train_row) in self.x.rows().enumerate() {
            if self.beta[i] != 0.0 {
                acc += self.beta[i] * kernel::eval(&self.kernel, train_row, row);
            }
        }
        acc
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.rows().map(|r| self.predict_row(r)).collect()
    }

    pub fn n_support_vectors(&self) -> usize {
        self.beta.iter().filter(|b| b.abs() > 1e-12).count()
    }

    /// Dual objective at the stored coefficients.
    pub fn dual_objective(&self, y: &[f64]) -> f64 {
        let rows: Vec<&[f64]> = self.x.rows().collect();
        let k = kernel::gram(&self.kernel, &rows);
        let n = rows.len();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += self.beta[i] * self.beta[j] * k[i * n + j];
            }
        }
        let l1: f64 = self.beta.iter().map(|b| b.abs()).sum();
        let lin: f64 = self.beta.iter().zip(y).map(|(b, t)| b * t).sum();
        -0.5 * quad - self.epsilon * l1 + lin
    }

    /// Largest KKT violation at the stored solution.
    pub fn kkt_max_violation(&self, y: &[f64]) -> f64 {
        let rows: Vec<&[f64]> = self.x.rows().collect();
        let n = rows.len();
        let k = kernel::gram(&self.kernel, &rows);
        let mut f = vec![0.0; n];
        for (i, fi) in f.iter_mut().enumerate() {
            *fi = (0..n).map(|j| self.beta[j] * k[i * n + j]).sum();
        }
        let solver = Solver {
            k,
            y,
            c: self.c,
            epsilon: self.epsilon,
            tol: self.tol,
            n,
            beta: self.beta.clone(),
            f,
            b: self.bias,
        };
        (0..n)
            .map(|i| solver.violation(i))
            .fold(0.0, f64::max)
    }

    /// Net-coefficient feasibility: every |beta| within C and the betas
    /// summing to zero (the equality constraint of the dual).
    pub fn dual_feasible(&self) -> bool {
        let slack = 1e-9 * self.c.max(1.0);
        self.beta.iter().all(|b| b.abs() <= self.c + slack)
            && self.beta.iter().sum::<f64>().abs() <= 1e-9 * self.c.max(1.0)
    }
}
