//! Evaluation pipeline: zero-mean feature standardization, MAE/MSE,
//! deterministic k-fold planning, inner-loop grid search, and the two
//! evaluation schemes (nested 6x4 cross-validation and conventional
//! k-fold cross-validation) over all model families and all seven KPIs.

mod cv;
mod folds;
mod metrics;
mod report;
mod scaler;
mod search;

use thiserror::Error;

pub use cv::{
    dataset_matrices, nested_cv, nested_cv_grid, nonnested_cv, nonnested_cv_grid,
    family_uses_feature_scaling, fit_predict, GridOutcome, KPI_NAMES,
};
pub use folds::{kfold, FoldPlan};
pub use metrics::{mae, mse};
pub use report::{CvReport, FamilyResult, FoldSelection, MetricCell, Scheme};
pub use scaler::Scaler;
pub use search::{grid_search, GridSearchOutcome};

use railbench_models::ModelError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("fold count must satisfy 2 <= k <= n, got k={k}, n={n}")]
    BadFoldCount { k: usize, n: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("every candidate spec failed during grid search: {0}")]
    AllCandidatesFailed(String),

    #[error("report serialization: {0}")]
    Serialization(String),
}
