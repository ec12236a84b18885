//! Seven regressor families implemented from first principles behind one
//! uniform fit/predict contract.
//!
//! KNN, KRR, and the MLP handle multiple outputs natively; the tree
//! ensembles and SVR wrap one independent single-output model per target
//! column. Every fit is deterministic given its spec (including any seed
//! fields) and fitted models are immutable: `predict` is a pure function
//! of `(model, input)`.

pub mod adaboost;
pub mod data;
mod error;
pub mod gbrt;
pub mod kernel;
pub mod knn;
pub mod krr;
pub mod linalg;
pub mod mlp;
pub mod oblivious;
pub mod spec;
pub mod svr;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use data::Matrix;
pub use error::ModelError;
pub use spec::{Activation, AdaLoss, Family, Kernel, KnnWeighting, ModelSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Inner {
    Knn(knn::KnnFit),
    Krr(krr::KrrFit),
    Mlp(mlp::MlpFit),
    AdaBoost(Vec<adaboost::AdaBoostFit>),
    Gbrt(Vec<gbrt::GbrtFit>),
    Oblivious(Vec<oblivious::ObliviousGbFit>),
    Svr(Vec<svr::SvrFit>),
}

/// An immutable trained model: the spec it came from plus learned state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    spec: ModelSpec,
    n_features: usize,
    n_outputs: usize,
    converged: bool,
    inner: Inner,
}

/// Trains `spec` on `x` (n x p) against `y` (n x q).
pub fn fit(spec: &ModelSpec, x: &Matrix, y: &Matrix) -> Result<FittedModel, ModelError> {
    spec.validate()?;
    if x.n_rows() != y.n_rows() {
        return Err(ModelError::Shape(format!(
            "x has {} rows but y has {}",
            x.n_rows(),
            y.n_rows()
        )));
    }
    if x.n_rows() < 2 {
        return Err(ModelError::TooFewSamples(x.n_rows()));
    }
    if y.n_cols() == 0 {
        return Err(ModelError::Shape("y must have at least one output".into()));
    }
    if !x.all_finite() || !y.all_finite() {
        return Err(ModelError::NonFinite);
    }

    let mut converged = true;
    let inner = match spec {
        ModelSpec::Knn { k, weighting } => Inner::Knn(knn::fit(*k, *weighting, x, y)?),
        ModelSpec::Krr { kernel, lambda } => Inner::Krr(krr::fit(kernel, *lambda, x, y)?),
        ModelSpec::Mlp {
            hidden_layers,
            activation,
            learning_rate,
            epochs,
            batch_size,
            init_seed,
        } => Inner::Mlp(mlp::fit(
            hidden_layers,
            *activation,
            *learning_rate,
            *epochs,
            *batch_size,
            *init_seed,
            x,
            y,
        )),
        ModelSpec::AdaBoostR2 {
            n_estimators,
            base_tree_depth,
            loss,
            ..
        } => Inner::AdaBoost(
            per_output(y, |col| adaboost::fit(*n_estimators, *base_tree_depth, *loss, x, col)),
        ),
        ModelSpec::Gbrt {
            n_estimators,
            learning_rate,
            max_depth,
            min_samples_leaf,
        } => Inner::Gbrt(per_output(y, |col| {
            gbrt::fit(*n_estimators, *learning_rate, *max_depth, *min_samples_leaf, x, col)
        })),
        ModelSpec::ObliviousGb {
            n_estimators,
            learning_rate,
            depth,
        } => Inner::Oblivious(per_output(y, |col| {
            oblivious::fit(*n_estimators, *learning_rate, *depth, x, col)
        })),
        ModelSpec::Svr {
            c,
            epsilon,
            kernel,
            tol,
            max_passes,
        } => {
            let fits = per_output(y, |col| {
                svr::fit(kernel, *c, *epsilon, *tol, *max_passes, x, col)
            });
            converged = fits.iter().all(|f| f.converged);
            Inner::Svr(fits)
        }
    };
    Ok(FittedModel {
        spec: spec.clone(),
        n_features: x.n_cols(),
        n_outputs: y.n_cols(),
        converged,
        inner,
    })
}

fn per_output<T>(y: &Matrix, mut f: impl FnMut(&[f64]) -> T) -> Vec<T> {
    (0..y.n_cols()).map(|j| f(&y.column(j))).collect()
}

impl FittedModel {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family()
    }

    /// False only when an iterative solver hit its pass budget; the
    /// model is still usable.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix, ModelError> {
        if x.n_cols() != self.n_features {
            return Err(ModelError::Shape(format!(
                "model trained on {} features, got {}",
                self.n_features,
                x.n_cols()
            )));
        }
        let out = match &self.inner {
            Inner::Knn(m) => m.predict(x),
            Inner::Krr(m) => m.predict(x),
            Inner::Mlp(m) => m.predict(x),
            Inner::AdaBoost(ms) => columns_to_matrix(x.n_rows(), ms, |m| m.predict(x)),
            Inner::Gbrt(ms) => columns_to_matrix(x.n_rows(), ms, |m| m.predict(x)),
            Inner::Oblivious(ms) => columns_to_matrix(x.n_rows(), ms, |m| m.predict(x)),
            Inner::Svr(ms) => columns_to_matrix(x.n_rows(), ms, |m| m.predict(x)),
        };
        debug_assert_eq!(out.n_cols(), self.n_outputs);
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        serde_json::to_string(self).map_err(|e| ModelError::Serialization(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<FittedModel, ModelError> {
        serde_json::from_str(json).map_err(|e| ModelError::Serialization(e.to_string()))
    }
}

fn columns_to_matrix<T>(n_rows: usize, models: &[T], predict: impl Fn(&T) -> Vec<f64>) -> Matrix {
    let mut out = Matrix::zeros(n_rows, models.len());
    for (j, model) in models.iter().enumerate() {
        for (i, v) in predict(model).into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    out
}
