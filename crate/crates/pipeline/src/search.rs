//! Inner-loop grid search: the candidate minimizing mean validation MSE
//! across the inner folds wins; ties go to the earliest candidate in
//! grid order. A candidate that fails on any fold is disqualified, not
//! fatal, unless every candidate fails.

use rayon::prelude::*;

use railbench_models::{Matrix, ModelSpec};

use crate::cv::fit_predict;
use crate::folds::FoldPlan;
use crate::metrics::mse;
use crate::PipelineError;

#[derive(Debug, Clone)]
pub struct GridSearchOutcome {
    pub best_index: usize,
    pub best_spec: ModelSpec,
    /// Mean validation MSE per candidate; `None` marks a disqualified
    /// candidate.
    pub scores: Vec<Option<f64>>,
}

/// Scores one candidate: mean over folds of the aggregate (all outputs
/// pooled) validation MSE, with the scaler fitted inside each training
/// portion.
fn score_candidate(
    spec: &ModelSpec,
    x: &Matrix,
    y: &Matrix,
    plan: &FoldPlan,
) -> Result<f64, PipelineError> {
    let mut total = 0.0;
    for fold in 0..plan.k {
        let train = plan.train_indices(fold);
        let test = plan.test_fold(fold);
        let pred = fit_predict(
            spec,
            &x.select_rows(&train),
            &y.select_rows(&train),
            &x.select_rows(test),
        )?;
        let truth = y.select_rows(test);
        total += mse(truth.as_slice(), pred.as_slice())?;
    }
    Ok(total / plan.k as f64)
}

pub fn grid_search(
    grid: &[ModelSpec],
    x: &Matrix,
    y: &Matrix,
    inner_plan: &FoldPlan,
) -> Result<GridSearchOutcome, PipelineError> {
    if grid.is_empty() {
        return Err(PipelineError::Empty("grid search needs candidates".into()));
    }
    let results: Vec<Result<f64, PipelineError>> = grid
        .par_iter()
        .map(|spec| score_candidate(spec, x, y, inner_plan))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut scores = Vec::with_capacity(grid.len());
    let mut last_error = String::new();
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(score) => {
                scores.push(Some(score));
                match best {
                    Some((_, s)) if score >= s => {}
                    _ => best = Some((i, score)),
                }
            }
            Err(e) => {
                scores.push(None);
                last_error = e.to_string();
            }
        }
    }
    let (best_index, _) =
        best.ok_or_else(|| PipelineError::AllCandidatesFailed(last_error.clone()))?;
    Ok(GridSearchOutcome {
        best_index,
        best_spec: grid[best_index].clone(),
        scores,
    })
}
