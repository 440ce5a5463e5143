//! Serializable result bundle written by `fit` and `baseline`.
//!
//! `results.json` carries the full hyperparameter configuration alongside the
//! numbers, so a later `fit --config results.json` run reproduces the same
//! factorization bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use wmnmf::clustering::ClusteringReport;
use wmnmf::params::HyperParams;
use wmnmf::updates::ObjectiveBreakdown;

use crate::{input_error, CliError};

/// Outcome of one solver run (one seed).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub converged: bool,
    pub outer_iterations: usize,
    pub final_objective: f64,
    pub breakdown: ObjectiveBreakdown,
    /// Learned view weights, one entry per view.
    pub alpha: Vec<f64>,
    /// Objective after initialization and after each outer iteration.
    pub objective_trace: Vec<f64>,
    /// Agreement with ground truth; absent when the dataset has no labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<ClusteringReport>,
    pub seconds: f64,
}

/// Mean and sample standard deviation of a quantity across replications.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Aggregate { mean, std }
    }
}

/// Cross-replication aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub final_objective: Aggregate,
    pub outer_iterations: Aggregate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acc: Option<Aggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmi: Option<Aggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adj_ri: Option<Aggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fscore: Option<Aggregate>,
}

/// Shape information for the dataset a bundle was produced from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub n_obs: usize,
    pub n_views: usize,
    /// Feature count per view.
    pub view_dims: Vec<usize>,
}

/// Top-level contents of `results.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultBundle {
    /// Hyperparameters of the first (base-seed) run; feeding this object back
    /// through `--config` reproduces that run exactly.
    pub config: HyperParams,
    /// Cluster-assignment rule used on the consensus matrix.
    pub assign: String,
    pub dataset: DatasetInfo,
    /// One record per replication, base seed first.
    pub runs: Vec<RunRecord>,
    pub summary: Summary,
    pub total_seconds: f64,
}

impl ResultBundle {
    /// Builds the summary block from the attached runs.
    pub fn summarize(runs: &[RunRecord]) -> Summary {
        let objectives: Vec<f64> = runs.iter().map(|r| r.final_objective).collect();
        let outers: Vec<f64> = runs.iter().map(|r| r.outer_iterations as f64).collect();
        let metric = |pick: fn(&ClusteringReport) -> f64| -> Option<Aggregate> {
            let values: Vec<f64> = runs.iter().filter_map(|r| r.metrics.as_ref().map(pick)).collect();
            (values.len() == runs.len()).then(|| Aggregate::of(&values))
        };
        Summary {
            final_objective: Aggregate::of(&objectives),
            outer_iterations: Aggregate::of(&outers),
            acc: metric(|m| m.acc),
            nmi: metric(|m| m.nmi),
            adj_ri: metric(|m| m.adj_ri),
            fscore: metric(|m| m.fscore),
        }
    }

    /// Writes the bundle as pretty JSON.
    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| input_error(format!("cannot serialize results: {e}")))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
    }
}

/// Reads a hyperparameter configuration from `path`. Accepts either a bare
/// configuration object or a full `results.json` bundle (its `config` field
/// is used), so result files can be replayed directly.
pub fn load_config(path: &Path) -> Result<HyperParams, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| input_error(format!("malformed config {}: {e}", path.display())))?;
    let config_value = match value.get("config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(config_value)
        .map_err(|e| input_error(format!("config {}: {e}", path.display())))
}
