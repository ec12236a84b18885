//! Serializable cross-validation report.
//!
//! Map keys are `BTreeMap`s and every field has a fixed order, so a
//! report serializes to byte-identical JSON across reruns of the same
//! evaluation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use railbench_models::ModelSpec;

use crate::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Nested,
    NonNested,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Nested => "nested",
            Scheme::NonNested => "non-nested",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricCell {
    pub mae: f64,
    pub mse: f64,
}

/// Hyperparameters chosen for one outer fold (nested scheme) or for the
/// whole plan (non-nested scheme, `fold` absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSelection {
    pub fold: Option<usize>,
    pub spec: ModelSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyResult {
    /// KPI name -> pooled MAE/MSE over held-out predictions.
    pub per_kpi: BTreeMap<String, MetricCell>,
    pub selections: Vec<FoldSelection>,
    /// False when some refit hit an iteration budget without converging.
    pub all_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub scheme: Scheme,
    pub seed: u64,
    pub n_rows: usize,
    pub outer_k: usize,
    /// Present only for the nested scheme.
    pub inner_k: Option<usize>,
    pub fold_sizes: Vec<usize>,
    pub kpi_names: Vec<String>,
    /// Family name -> candidate grid that was searched.
    pub grids: BTreeMap<String, Vec<ModelSpec>>,
    pub families: BTreeMap<String, FamilyResult>,
    /// Families whose every candidate failed, with the failure text.
    pub disqualified: BTreeMap<String, String>,
}

impl CvReport {
    pub fn to_json_pretty(&self) -> Result<String, PipelineError> {
        serde_json::to_string_pretty(self).map_err(|e| PipelineError::Serialization(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<CvReport, PipelineError> {
        serde_json::from_str(json).map_err(|e| PipelineError::Serialization(e.to_string()))
    }

    pub fn cell(&self, family: &str, kpi: &str) -> Option<MetricCell> {
        self.families
            .get(family)
            .and_then(|f| f.per_kpi.get(kpi))
            .copied()
    }
}
