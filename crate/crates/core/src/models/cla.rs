//! CLA: clustering by median-exceedance counts.
//!
//! For every module, count how many of its metrics strictly exceed that
//! metric's release-wide median. Modules with equal counts form a cluster;
//! the clusters with the larger counts — the top half, rounded up — are
//! labeled defective. The intuition: modules extreme on many metrics are
//! the risky ones.

use std::collections::BTreeMap;

use crate::dataset::ReleaseDataset;
use crate::error::{Error, Result};
use crate::ranking::Ranking;

use super::{Diagnostics, ModelOutput};

/// Runs CLA on a release. Uses raw (un-standardized) metrics: the
/// exceedance count is invariant under any monotone per-metric transform.
pub fn cla(dataset: &ReleaseDataset) -> Result<ModelOutput> {
    let names = dataset.metric_names();
    if names.is_empty() {
        return Err(Error::model(format!(
            "release {} has no metric columns; cla needs at least one",
            dataset.release_key()
        )));
    }

    let medians: Vec<f64> = (0..names.len())
        .map(|j| {
            let mut values: Vec<f64> = dataset.modules().iter().map(|m| m.metrics[j]).collect();
            values.sort_by(f64::total_cmp);
            let k = values.len();
            if k % 2 == 1 {
                values[k / 2]
            } else {
                (values[k / 2 - 1] + values[k / 2]) / 2.0
            }
        })
        .collect();

    let counts: Vec<usize> = dataset
        .modules()
        .iter()
        .map(|m| {
            m.metrics
                .values()
                .zip(&medians)
                .filter(|(v, median)| *v > median)
                .count()
        })
        .collect();

    // Distinct exceedance counts, largest first; the top half (rounded up)
    // of these cluster levels is the defective side.
    let mut levels: Vec<usize> = counts.clone();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let defective_levels = levels.len().div_ceil(2);
    let threshold = levels[defective_levels - 1];

    let cluster_sizes: Vec<usize> = levels
        .iter()
        .map(|level| counts.iter().filter(|c| **c == *level).count())
        .collect();

    let intrinsic: BTreeMap<String, bool> = dataset
        .modules()
        .iter()
        .zip(&counts)
        .map(|(m, c)| (m.id.clone(), *c >= threshold))
        .collect();

    let mut ordered: Vec<(usize, &str, u64)> = dataset
        .modules()
        .iter()
        .zip(&counts)
        .map(|(m, c)| (*c, m.id.as_str(), m.sloc))
        .collect();
    ordered.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then_with(|| b.2.cmp(&a.2))
            .then_with(|| a.1.cmp(b.1))
    });
    let pairs = ordered
        .iter()
        .map(|(c, id, _)| (id.to_string(), *c as f64))
        .collect();
    let ranking = Ranking::from_order_with_scores(dataset, "cla", pairs)
        .expect("exceedance counts are non-increasing along the sort");

    Ok(ModelOutput {
        ranking,
        intrinsic_labels: Some(intrinsic),
        diagnostics: Diagnostics {
            cluster_sizes,
            ..Diagnostics::default()
        },
    })
}
