//! Hyperparameter descriptions of the seven regressor families and the
//! default candidate grids used by cross-validated model selection.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnnWeighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Relu,
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdaLoss {
    Linear,
    Square,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

/// One fully specified model candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ModelSpec {
    Knn {
        k: usize,
        weighting: KnnWeighting,
    },
    Krr {
        kernel: Kernel,
        lambda: f64,
    },
    Mlp {
        hidden_layers: Vec<usize>,
        activation: Activation,
        learning_rate: f64,
        epochs: usize,
        batch_size: usize,
        init_seed: u64,
    },
    AdaBoostR2 {
        n_estimators: usize,
        base_tree_depth: usize,
        loss: AdaLoss,
        /// Reserved for resampling variants; the weighted fit used here is
        /// already deterministic and does not consume it.
        seed: u64,
    },
    Gbrt {
        n_estimators: usize,
        learning_rate: f64,
        max_depth: usize,
        min_samples_leaf: usize,
    },
    /// CatBoost-style symmetric trees: one split per level shared by
    /// every node of that level.
    ObliviousGb {
        n_estimators: usize,
        learning_rate: f64,
        depth: usize,
    },
    Svr {
        c: f64,
        epsilon: f64,
        kernel: Kernel,
        tol: f64,
        max_passes: usize,
    },
}

/// The seven method families, in the row order used by result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    Abr,
    Gbr,
    Cbr,
    Svr,
    Mlp,
    Knnr,
    Krr,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Abr,
        Family::Gbr,
        Family::Cbr,
        Family::Svr,
        Family::Mlp,
        Family::Knnr,
        Family::Krr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Abr => "ABR",
            Family::Gbr => "GBR",
            Family::Cbr => "CBR",
            Family::Svr => "SVR",
            Family::Mlp => "MLP",
            Family::Knnr => "KNNR",
            Family::Krr => "KRR",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_uppercase().as_str() {
            "ABR" | "ADABOOST" => Some(Family::Abr),
            "GBR" | "GBRT" => Some(Family::Gbr),
            "CBR" | "CATBOOST" => Some(Family::Cbr),
            "SVR" => Some(Family::Svr),
            "MLP" | "ANN" => Some(Family::Mlp),
            "KNNR" | "KNN" => Some(Family::Knnr),
            "KRR" => Some(Family::Krr),
            _ => None,
        }
    }

    /// Default hyperparameter grid searched by the evaluation pipeline.
    pub fn default_grid(&self) -> Vec<ModelSpec> {
        match self {
            Family::Abr => {
                let mut grid = Vec::new();
                for &n_estimators in &[50, 100] {
                    for &base_tree_depth in &[2, 3] {
                        grid.push(ModelSpec::AdaBoostR2 {
                            n_estimators,
                            base_tree_depth,
                            loss: AdaLoss::Linear,
                            seed: 0,
                        });
                    }
                }
                grid
            }
            Family::Gbr => {
                let mut grid = Vec::new();
                for &n_estimators in &[50, 100, 200] {
                    for &max_depth in &[2, 3] {
                        for &learning_rate in &[0.05, 0.1] {
                            grid.push(ModelSpec::Gbrt {
                                n_estimators,
                                learning_rate,
                                max_depth,
                                min_samples_leaf: 1,
                            });
                        }
                    }
                }
                grid
            }
            Family::Cbr => {
                let mut grid = Vec::new();
                for &n_estimators in &[50, 100, 200] {
                    for &depth in &[2, 4] {
                        for &learning_rate in &[0.05, 0.1] {
                            grid.push(ModelSpec::ObliviousGb {
                                n_estimators,
                                learning_rate,
                                depth,
                            });
                        }
                    }
                }
                grid
            }
            Family::Svr => {
                let mut grid = Vec::new();
                for &c in &[1.0, 10.0, 100.0] {
                    for &epsilon in &[0.01, 0.1] {
                        grid.push(ModelSpec::Svr {
                            c,
                            epsilon,
                            kernel: Kernel::Rbf { gamma: 1.0 },
                            tol: 1e-3,
                            max_passes: 60,
                        });
                    }
                }
                grid
            }
            Family::Mlp => {
                let mut grid = Vec::new();
                for hidden in [vec![16], vec![32, 16]] {
                    for &learning_rate in &[0.003, 0.01] {
                        grid.push(ModelSpec::Mlp {
                            hidden_layers: hidden.clone(),
                            activation: Activation::Relu,
                            learning_rate,
                            epochs: 300,
                            batch_size: 32,
                            init_seed: 7,
                        });
                    }
                }
                grid
            }
            Family::Knnr => [1usize, 3, 5, 7]
                .iter()
                .map(|&k| ModelSpec::Knn {
                    k,
                    weighting: KnnWeighting::Uniform,
                })
                .collect(),
            Family::Krr => [1e-3, 1e-2, 1e-1, 1.0]
                .iter()
                .map(|&lambda| ModelSpec::Krr {
                    kernel: Kernel::Rbf { gamma: 1.0 },
                    lambda,
                })
                .collect(),
        }
    }
}

impl ModelSpec {
    pub fn family(&self) -> Family {
        match self {
            ModelSpec::Knn { .. } => Family::Knnr,
            ModelSpec::Krr { .. } => Family::Krr,
            ModelSpec::Mlp { .. } => Family::Mlp,
            ModelSpec::AdaBoostR2 { .. } => Family::Abr,
            ModelSpec::Gbrt { .. } => Family::Gbr,
            ModelSpec::ObliviousGb { .. } => Family::Cbr,
            ModelSpec::Svr { .. } => Family::Svr,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidSpec(msg));
        let check_kernel = |kernel: &Kernel| match kernel {
            Kernel::Rbf { gamma } if !(gamma.is_finite() && *gamma > 0.0) => {
                bad(format!("rbf gamma must be positive, got {gamma}"))
            }
            _ => Ok(()),
        };
        match self {
            ModelSpec::Knn { k, .. } => {
                if *k == 0 {
                    return bad("k must be at least 1".into());
                }
            }
            ModelSpec::Krr { kernel, lambda } => {
                check_kernel(kernel)?;
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    return bad(format!("lambda must be non-negative, got {lambda}"));
                }
            }
            ModelSpec::Mlp {
                hidden_layers,
                learning_rate,
                epochs,
                batch_size,
                ..
            } => {
                if hidden_layers.contains(&0) {
                    return bad("hidden layer widths must be positive".into());
                }
                if !(learning_rate.is_finite() && *learning_rate > 0.0) {
                    return bad(format!("learning rate must be positive, got {learning_rate}"));
                }
                if *epochs == 0 || *batch_size == 0 {
                    return bad("epochs and batch size must be at least 1".into());
                }
            }
            ModelSpec::AdaBoostR2 {
                n_estimators,
                base_tree_depth,
                ..
            } => {
                if *n_estimators == 0 {
                    return bad("n_estimators must be at least 1".into());
                }
                if *base_tree_depth == 0 {
                    return bad("base tree depth must be at least 1".into());
                }
            }
            ModelSpec::Gbrt {
                n_estimators,
                learning_rate,
                min_samples_leaf,
                ..
            } => {
                if *n_estimators == 0 {
                    return bad("n_estimators must be at least 1".into());
                }
                if !(learning_rate.is_finite() && *learning_rate > 0.0 && *learning_rate <= 1.0) {
                    return bad(format!("learning rate must lie in (0, 1], got {learning_rate}"));
                }
                if *min_samples_leaf == 0 {
                    return bad("min_samples_leaf must be at least 1".into());
                }
            }
            ModelSpec::ObliviousGb {
                n_estimators,
                learning_rate,
                depth,
            } => {
                if *n_estimators == 0 || *depth == 0 {
                    return bad("n_estimators and depth must be at least 1".into());
                }
                if !(learning_rate.is_finite() && *learning_rate > 0.0 && *learning_rate <= 1.0) {
                    return bad(format!("learning rate must lie in (0, 1], got {learning_rate}"));
                }
            }
            ModelSpec::Svr {
                c,
                epsilon,
                kernel,
                tol,
                max_passes,
            } => {
                check_kernel(kernel)?;
                if !(c.is_finite() && *c > 0.0) {
                    return bad(format!("C must be positive, got {c}"));
                }
                if !(epsilon.is_finite() && *epsilon >= 0.0) {
                    return bad(format!("epsilon must be non-negative, got {epsilon}"));
                }
                if !(tol.is_finite() && *tol > 0.0) {
                    return bad(format!("tol must be positive, got {tol}"));
                }
                if *max_passes == 0 {
                    return bad("max_passes must be at least 1".into());
                }
            }
        }
        Ok(())
    }
}
