//! Unsupervised reference models.
//!
//! Each model turns one release into a [`ModelOutput`]: a ranking over the
//! modules, optional intrinsic defective/clean labels for models that
//! cluster rather than merely order, and run diagnostics. None of them
//! look at the defect labels.

mod cla;
mod fcm;
mod spectral;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dataset::ReleaseDataset;
use crate::error::{Error, Result};
use crate::ranking::Ranking;

pub use cla::cla;
pub use fcm::{fcm, FcmParams};
pub use spectral::{spectral_cluster, ScParams};

/// What a model produced on one release.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutput {
    /// The ranking to evaluate.
    pub ranking: Ranking,
    /// Intrinsic defective-class decisions for clustering models, keyed by
    /// module id; `None` for pure ranking models.
    pub intrinsic_labels: Option<BTreeMap<String, bool>>,
    /// Model-specific run report.
    pub diagnostics: Diagnostics,
}

/// Model-specific run report; fields that do not apply stay empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    /// Iterations an iterative model actually ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Zero-variance metric columns dropped before clustering.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dropped_metrics: Vec<String>,
    /// Cluster sizes, largest-K or cluster-index order depending on the model.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cluster_sizes: Vec<usize>,
    /// Objective value after every iteration (fuzzy clustering).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub objective_trace: Vec<f64>,
    /// Final eigenvector residual (spectral clustering).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigen_residual: Option<f64>,
}

/// Ranks modules by descending SLOC (largest first), ties by ascending id.
/// The score is the SLOC count itself.
pub fn manual_down(dataset: &ReleaseDataset) -> ModelOutput {
    let pairs = dataset
        .modules()
        .iter()
        .map(|m| (m.id.clone(), m.sloc as f64))
        .collect();
    let ranking = Ranking::from_scores(dataset, "manualdown", pairs)
        .expect("sloc scores are finite and cover every module");
    ModelOutput {
        ranking,
        intrinsic_labels: None,
        diagnostics: Diagnostics::default(),
    }
}

/// Ranks modules by ascending SLOC (smallest first), ties by ascending id.
/// The score is the reciprocal SLOC count.
pub fn manual_up(dataset: &ReleaseDataset) -> ModelOutput {
    let pairs = dataset
        .modules()
        .iter()
        .map(|m| (m.id.clone(), 1.0 / m.sloc as f64))
        .collect();
    let ranking = Ranking::from_scores(dataset, "manualup", pairs)
        .expect("reciprocal sloc scores are finite and cover every module");
    ModelOutput {
        ranking,
        intrinsic_labels: None,
        diagnostics: Diagnostics::default(),
    }
}

/// Metric matrix of a release in canonical (id-sorted) module order,
/// z-scored column by column. Clustering models iterate in this order so
/// that their arithmetic — and therefore their output — does not depend on
/// the order modules appeared in the input file.
#[derive(Debug)]
pub(crate) struct CanonicalView {
    /// Module ids in ascending order.
    pub ids: Vec<String>,
    /// SLOC per module, aligned with `ids`.
    /// Z-scored metric rows, aligned with `ids`.
    pub rows: Vec<Vec<f64>>,
    /// Dropped zero-variance metric columns.
    pub dropped: Vec<String>,
}

pub(crate) fn canonical_view(dataset: &ReleaseDataset) -> Result<CanonicalView> {
    let k = dataset.module_count();
    if k < 2 {
        return Err(Error::model(format!(
            "release {} has fewer than 2 modules; nothing to cluster",
            dataset.release_key()
        )));
    }
    let mut sorted: Vec<&crate::dataset::ModuleRecord> = dataset.modules().iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let names = dataset.metric_names();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut dropped = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let values: Vec<f64> = sorted.iter().map(|m| m.metrics[j]).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min == max {
            dropped.push(name.to_string());
            continue;
        }
        let mean = values.iter().sum::<f64>() / k as f64;
        let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k as f64).sqrt();
        columns.push(values.iter().map(|v| (v - mean) / std).collect());
    }
    if columns.is_empty() {
        return Err(Error::model(format!(
            "release {} has no usable metrics (all columns constant)",
            dataset.release_key()
        )));
    }

    let rows = (0..k)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    Ok(CanonicalView {
        ids: sorted.iter().map(|m| m.id.clone()).collect(),
        rows,
        dropped,
    })
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
