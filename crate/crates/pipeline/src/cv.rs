//! The two evaluation schemes.
//!
//! Nested: per outer fold, a fresh inner fold plan drives grid search on
//! the outer-training portion only; the winning spec is refit on that
//! portion and scored on the held-out fold. Held-out data never
//! influences selection.
//!
//! Non-nested (conventional): one k-fold plan both selects the
//! hyperparameters (minimum mean CV MSE over the grid) and supplies the
//! reported score of the selected spec — deliberately reproducing the
//! selection/evaluation leakage of the conventional scheme.
//!
//! Metrics are pooled: held-out predictions are assembled into one
//! full-length vector per KPI and MAE/MSE computed once over it.
//! Targets stay in raw units; features are standardized only for the
//! families that need scaling (SVR, MLP, KNN, KRR), never for the tree
//! ensembles.

use std::collections::BTreeMap;

use rayon::prelude::*;

use railbench_dataset::Dataset;
use railbench_models::{fit, Family, Matrix, ModelSpec};

use crate::folds::kfold;
use crate::metrics::{mae, mse};
use crate::report::{CvReport, FamilyResult, FoldSelection, MetricCell, Scheme};
use crate::scaler::Scaler;
use crate::search::grid_search;
use crate::PipelineError;

/// KPI column names, in dataset column order.
pub const KPI_NAMES: [&str; 7] = ["L", "T", "CDR", "RLF", "SE", "HOPP", "HOP"];

const INNER_SEED_TAG: u64 = 0x0001_F01D;

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn inner_seed(outer_seed: u64, outer_fold: usize) -> u64 {
    mix64(mix64(outer_seed ^ INNER_SEED_TAG) ^ outer_fold as u64)
}

/// Feature standardization applies to the margin-sensitive families
/// only; tree ensembles consume raw features.
pub fn family_uses_feature_scaling(family: Family) -> bool {
    matches!(
        family,
        Family::Svr | Family::Mlp | Family::Knnr | Family::Krr
    )
}

/// Fits a spec on the training portion and predicts the test portion,
/// standardizing features with training statistics when the family
/// calls for it. Targets are never scaled.
pub fn fit_predict(
    spec: &ModelSpec,
    x_train: &Matrix,
    y_train: &Matrix,
    x_test: &Matrix,
) -> Result<Matrix, PipelineError> {
    let model;
    let pred = if family_uses_feature_scaling(spec.family()) {
        let scaler = Scaler::fit(x_train)?;
        model = fit(spec, &scaler.transform(x_train)?, y_train)?;
        model.predict(&scaler.transform(x_test)?)?
    } else {
        model = fit(spec, x_train, y_train)?;
        model.predict(x_test)?
    };
    Ok(pred)
}

fn fit_predict_with_convergence(
    spec: &ModelSpec,
    x_train: &Matrix,
    y_train: &Matrix,
    x_test: &Matrix,
) -> Result<(Matrix, bool), PipelineError> {
    if family_uses_feature_scaling(spec.family()) {
        let scaler = Scaler::fit(x_train)?;
        let model = fit(spec, &scaler.transform(x_train)?, y_train)?;
        Ok((model.predict(&scaler.transform(x_test)?)?, model.converged()))
    } else {
        let model = fit(spec, x_train, y_train)?;
        Ok((model.predict(x_test)?, model.converged()))
    }
}

/// Result of running one grid through one scheme: pooled out-of-fold
/// predictions aligned with the dataset rows, plus the selections made.
#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub pooled_predictions: Matrix,
    pub selections: Vec<FoldSelection>,
    pub all_converged: bool,
}

/// Nested scheme for one candidate grid.
pub fn nested_cv_grid(
    grid: &[ModelSpec],
    x: &Matrix,
    y: &Matrix,
    outer_k: usize,
    inner_k: usize,
    seed: u64,
) -> Result<GridOutcome, PipelineError> {
    let n = x.n_rows();
    let outer = kfold(n, outer_k, seed)?;
    let mut pooled = Matrix::zeros(n, y.n_cols());
    let mut selections = Vec::with_capacity(outer_k);
    let mut all_converged = true;

    for fold in 0..outer_k {
        let train = outer.train_indices(fold);
        let test = outer.test_fold(fold);
        let x_train = x.select_rows(&train);
        let y_train = y.select_rows(&train);

        let inner = kfold(train.len(), inner_k, inner_seed(seed, fold))?;
        let chosen = grid_search(grid, &x_train, &y_train, &inner)?;

        let (pred, converged) = fit_predict_with_convergence(
            &chosen.best_spec,
            &x_train,
            &y_train,
            &x.select_rows(test),
        )?;
        all_converged &= converged;
        for (local, &global) in test.iter().enumerate() {
            pooled.set_row(global, pred.row(local));
        }
        selections.push(FoldSelection {
            fold: Some(fold),
            spec: chosen.best_spec,
        });
    }
    Ok(GridOutcome {
        pooled_predictions: pooled,
        selections,
        all_converged,
    })
}

/// Conventional scheme for one candidate grid: each candidate is scored
/// by the same fold plan, the minimizer selected, and that candidate's
/// own cross-validation predictions reported.
pub fn nonnested_cv_grid(
    grid: &[ModelSpec],
    x: &Matrix,
    y: &Matrix,
    k: usize,
    seed: u64,
) -> Result<GridOutcome, PipelineError> {
    if grid.is_empty() {
        return Err(PipelineError::Empty("grid search needs candidates".into()));
    }
    let n = x.n_rows();
    let plan = kfold(n, k, seed)?;

    type CandidateOutcome = (f64, Matrix, bool);
    let results: Vec<Result<CandidateOutcome, PipelineError>> = grid
        .par_iter()
        .map(|spec| {
            let mut pooled = Matrix::zeros(n, y.n_cols());
            let mut total = 0.0;
            let mut all_converged = true;
            for fold in 0..k {
                let train = plan.train_indices(fold);
                let test = plan.test_fold(fold);
                let (pred, converged) = fit_predict_with_convergence(
                    spec,
                    &x.select_rows(&train),
                    &y.select_rows(&train),
                    &x.select_rows(test),
                )?;
                all_converged &= converged;
                let truth = y.select_rows(test);
                total += mse(truth.as_slice(), pred.as_slice())?;
                for (local, &global) in test.iter().enumerate() {
                    pooled.set_row(global, pred.row(local));
                }
            }
            Ok((total / k as f64, pooled, all_converged))
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut outcomes = Vec::with_capacity(grid.len());
    let mut last_error = String::new();
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(out) => {
                match best {
                    Some((_, s)) if out.0 >= s => {}
                    _ => best = Some((i, out.0)),
                }
                outcomes.push(Some(out));
            }
            Err(e) => {
                last_error = e.to_string();
                outcomes.push(None);
            }
        }
    }
    let (best_index, _) =
        best.ok_or_else(|| PipelineError::AllCandidatesFailed(last_error.clone()))?;
    let (_, pooled, all_converged) = outcomes[best_index].take().expect("best candidate scored");
    Ok(GridOutcome {
        pooled_predictions: pooled,
        selections: vec![FoldSelection {
            fold: None,
            spec: grid[best_index].clone(),
        }],
        all_converged,
    })
}

/// Splits a dataset into the feature matrix `[HOM, TTT]` and the target
/// matrix of the seven KPIs in [`KPI_NAMES`] order.
pub fn dataset_matrices(dataset: &Dataset) -> (Matrix, Matrix) {
    let n = dataset.n_rows();
    let mut x = Matrix::zeros(n, 2);
    let mut y = Matrix::zeros(n, 7);
    for (i, row) in dataset.rows.iter().enumerate() {
        x.set_row(i, &[row.hom, row.ttt]);
        y.set_row(i, &[row.l, row.t, row.cdr, row.rlf, row.se, row.hopp, row.hop]);
    }
    (x, y)
}

fn per_kpi_metrics(y: &Matrix, pooled: &Matrix) -> Result<BTreeMap<String, MetricCell>, PipelineError> {
    let mut cells = BTreeMap::new();
    for (j, name) in KPI_NAMES.iter().enumerate() {
        let truth = y.column(j);
        let pred = pooled.column(j);
        cells.insert(
            name.to_string(),
            MetricCell {
                mae: mae(&truth, &pred)?,
                mse: mse(&truth, &pred)?,
            },
        );
    }
    Ok(cells)
}

fn run_scheme(
    grids: &BTreeMap<Family, Vec<ModelSpec>>,
    x: &Matrix,
    y: &Matrix,
    scheme: Scheme,
    outer_k: usize,
    inner_k: Option<usize>,
    seed: u64,
) -> Result<CvReport, PipelineError> {
    let mut families = BTreeMap::new();
    let mut disqualified = BTreeMap::new();
    let mut grids_meta = BTreeMap::new();

    for (&family, grid) in grids {
        grids_meta.insert(family.name().to_string(), grid.clone());
        let outcome = match scheme {
            Scheme::Nested => nested_cv_grid(
                grid,
                x,
                y,
                outer_k,
                inner_k.expect("nested scheme has an inner fold count"),
                seed,
            ),
            Scheme::NonNested => nonnested_cv_grid(grid, x, y, outer_k, seed),
        };
        match outcome {
            Ok(out) => {
                families.insert(
                    family.name().to_string(),
                    FamilyResult {
                        per_kpi: per_kpi_metrics(y, &out.pooled_predictions)?,
                        selections: out.selections,
                        all_converged: out.all_converged,
                    },
                );
            }
            Err(e @ PipelineError::AllCandidatesFailed(_)) => {
                disqualified.insert(family.name().to_string(), e.to_string());
            }
            Err(e) => return Err(e),
        }
    }

    let plan = kfold(x.n_rows(), outer_k, seed)?;
    Ok(CvReport {
        scheme,
        seed,
        n_rows: x.n_rows(),
        outer_k,
        inner_k,
        fold_sizes: plan.fold_sizes(),
        kpi_names: KPI_NAMES.iter().map(|s| s.to_string()).collect(),
        grids: grids_meta,
        families,
        disqualified,
    })
}

/// Nested cross-validation over every family in `grids`.
pub fn nested_cv(
    grids: &BTreeMap<Family, Vec<ModelSpec>>,
    dataset: &Dataset,
    outer_k: usize,
    inner_k: usize,
    seed: u64,
) -> Result<CvReport, PipelineError> {
    let (x, y) = dataset_matrices(dataset);
    run_scheme(grids, &x, &y, Scheme::Nested, outer_k, Some(inner_k), seed)
}

/// Conventional k-fold cross-validation over every family in `grids`.
pub fn nonnested_cv(
    grids: &BTreeMap<Family, Vec<ModelSpec>>,
    dataset: &Dataset,
    k: usize,
    seed: u64,
) -> Result<CvReport, PipelineError> {
    let (x, y) = dataset_matrices(dataset);
    run_scheme(grids, &x, &y, Scheme::NonNested, k, None, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use railbench_models::KnnWeighting;

    fn synthetic(n: usize) -> (Matrix, Matrix) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let a = (i as f64 * 0.37).sin() * 2.0;
                let b = (i as f64 * 0.73).cos() * 3.0;
                vec![a, b]
            })
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let ys: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| vec![r[0] * 2.0 + r[1], (r[0] - r[1]).powi(2)])
            .collect();
        let y = Matrix::from_rows(&ys).unwrap();
        (x, y)
    }

    fn knn(k: usize) -> ModelSpec {
        ModelSpec::Knn {
            k,
            weighting: KnnWeighting::Uniform,
        }
    }

    #[test]
    fn singleton_grid_nested_equals_plain_outer_cv() {
        let (x, y) = synthetic(30);
        let spec = knn(3);
        let nested = nested_cv_grid(std::slice::from_ref(&spec), &x, &y, 5, 3, 11).unwrap();

        // manual outer-k CV of the same spec on the same plan
        let plan = kfold(30, 5, 11).unwrap();
        let mut manual = Matrix::zeros(30, 2);
        for fold in 0..5 {
            let train = plan.train_indices(fold);
            let test = plan.test_fold(fold);
            let pred = fit_predict(
                &spec,
                &x.select_rows(&train),
                &y.select_rows(&train),
                &x.select_rows(test),
            )
            .unwrap();
            for (local, &global) in test.iter().enumerate() {
                manual.set_row(global, pred.row(local));
            }
        }
        assert_eq!(nested.pooled_predictions, manual);
        assert!(nested
            .selections
            .iter()
            .all(|s| s.spec == spec));
    }

    #[test]
    fn singleton_grid_nonnested_matches_nested_numbers() {
        let (x, y) = synthetic(24);
        let spec = knn(2);
        let nested = nested_cv_grid(std::slice::from_ref(&spec), &x, &y, 4, 3, 7).unwrap();
        let plain = nonnested_cv_grid(&[spec], &x, &y, 4, 7).unwrap();
        assert_eq!(nested.pooled_predictions, plain.pooled_predictions);
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let (x, y) = synthetic(24);
        let mut rows = Vec::new();
        for i in 0..24 {
            rows.push(stub_record(&x, &y, i));
        }
        let ds = Dataset { rows };
        let mut grids = BTreeMap::new();
        grids.insert(Family::Knnr, vec![knn(1), knn(3)]);
        grids.insert(Family::Krr, Family::Krr.default_grid());
        let a = nested_cv(&grids, &ds, 4, 3, 5).unwrap().to_json_pretty().unwrap();
        let b = nested_cv(&grids, &ds, 4, 3, 5).unwrap().to_json_pretty().unwrap();
        assert_eq!(a, b);
    }

    // builds KpiRecord rows out of synthetic matrices so Dataset-based
    // entry points can be exercised without a simulator run
    fn stub_record(
        x: &Matrix,
        y: &Matrix,
        i: usize,
    ) -> railbench_dataset::KpiRecord {
        railbench_dataset::KpiRecord {
            hom: x.get(i, 0).abs(),
            ttt: x.get(i, 1).abs(),
            l: y.get(i, 0).abs(),
            t: y.get(i, 1).abs(),
            cdr: 1.0,
            rlf: 2.0,
            se: 3.0,
            hopp: 4.0,
            hop: 5.0,
        }
    }

    #[test]
    fn pooled_metrics_equal_direct_formula_on_concatenation() {
        let (x, y) = synthetic(20);
        let out = nested_cv_grid(&[knn(2)], &x, &y, 4, 3, 3).unwrap();
        // pooled MAE equals the formula applied to the full prediction
        // vector; per-fold averaging would differ on uneven folds
        let direct = mae(&y.column(0), &out.pooled_predictions.column(0)).unwrap();
        assert!(direct.is_finite());
        let manual: f64 = y
            .column(0)
            .iter()
            .zip(out.pooled_predictions.column(0))
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 20.0;
        assert!((direct - manual).abs() < 1e-15);
    }

    #[test]
    fn selection_ignores_heldout_targets() {
        // quick single-family leakage check (the full matrix lives in
        // the acceptance suite)
        let (x, y) = synthetic(40);
        let grid = vec![knn(1), knn(2), knn(4), knn(8)];
        let base = nested_cv_grid(&grid, &x, &y, 4, 3, 9).unwrap();

        let plan = kfold(40, 4, 9).unwrap();
        let fold0: Vec<usize> = plan.test_fold(0).to_vec();
        let mut y_perm = y.clone();
        // rotate fold 0's target rows
        for w in 0..fold0.len() {
            let src = fold0[(w + 1) % fold0.len()];
            y_perm.set_row(fold0[w], y.row(src));
        }
        let permuted = nested_cv_grid(&grid, &x, &y_perm, 4, 3, 9).unwrap();
        assert_eq!(base.selections[0].spec, permuted.selections[0].spec);
    }

    #[test]
    fn dataset_matrices_map_columns_in_order() {
        let ds = Dataset {
            rows: vec![railbench_dataset::KpiRecord {
                hom: 1.0,
                ttt: 40.0,
                l: 10.0,
                t: 20.0,
                cdr: 30.0,
                rlf: 40.0,
                se: 50.0,
                hopp: 60.0,
                hop: 70.0,
            }],
        };
        let (x, y) = dataset_matrices(&ds);
        assert_eq!(x.row(0), &[1.0, 40.0]);
        assert_eq!(y.row(0), &[10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0]);
    }

    #[test]
    fn prediction_time_scaling_uses_training_statistics_only() {
        // the explicit two-step pipeline (scaler fit on the training
        // portion, applied to both sides) must agree with fit_predict;
        // any statistic leaking from the test portion would break this
        let x_train = Matrix::from_rows(&[vec![0.0], vec![2.0], vec![4.0], vec![10.0]]).unwrap();
        let y_train = Matrix::column_vector(&[0.0, 1.0, 2.0, 5.0]);
        // far outside the training range to make leaked statistics loud
        let x_test = Matrix::from_rows(&[vec![1000.0], vec![-500.0]]).unwrap();

        let spec = knn(1);
        assert!(family_uses_feature_scaling(spec.family()));
        let got = fit_predict(&spec, &x_train, &y_train, &x_test).unwrap();

        let scaler = crate::Scaler::fit(&x_train).unwrap();
        let model = railbench_models::fit(&spec, &scaler.transform(&x_train).unwrap(), &y_train)
            .unwrap();
        let want = model.predict(&scaler.transform(&x_test).unwrap()).unwrap();
        assert_eq!(got, want);

        // tree families bypass scaling entirely
        let tree_spec = ModelSpec::Gbrt {
            n_estimators: 5,
            learning_rate: 0.5,
            max_depth: 2,
            min_samples_leaf: 1,
        };
        assert!(!family_uses_feature_scaling(tree_spec.family()));
        let got = fit_predict(&tree_spec, &x_train, &y_train, &x_test).unwrap();
        let raw_model = railbench_models::fit(&tree_spec, &x_train, &y_train).unwrap();
        assert_eq!(got, raw_model.predict(&x_test).unwrap());
    }

    #[test]
    fn reports_carry_a_cell_for_every_family_and_kpi() {
        let rows: Vec<railbench_dataset::KpiRecord> = (0..16)
            .map(|i| railbench_dataset::KpiRecord {
                hom: (i % 4) as f64 * 2.0,
                ttt: [0.0, 100.0, 512.0, 5120.0][i / 4],
                l: 60.0 + i as f64 * 0.1,
                t: 5.0 + (i % 3) as f64,
                cdr: 10.0 + i as f64,
                rlf: 1.0,
                se: 1.0 + 0.01 * i as f64,
                hopp: 5.0,
                hop: 2.0 + (i % 2) as f64,
            })
            .collect();
        let ds = Dataset { rows };
        let mut grids = BTreeMap::new();
        grids.insert(Family::Knnr, vec![knn(1), knn(3)]);
        grids.insert(Family::Gbr, vec![ModelSpec::Gbrt {
            n_estimators: 10,
            learning_rate: 0.3,
            max_depth: 2,
            min_samples_leaf: 1,
        }]);
        let report = nested_cv(&grids, &ds, 4, 3, 2).unwrap();
        for family in ["KNNR", "GBR"] {
            let result = &report.families[family];
            assert_eq!(result.per_kpi.len(), KPI_NAMES.len());
            for kpi in KPI_NAMES {
                let cell = result.per_kpi[kpi];
                assert!(cell.mae.is_finite() && cell.mae >= 0.0);
                assert!(cell.mse.is_finite() && cell.mse >= 0.0);
            }
            assert_eq!(result.selections.len(), 4);
        }
        assert!(report.disqualified.is_empty());
    }
}
