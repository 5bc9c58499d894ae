//! The ONE baseline ranking.
//!
//! ONE reads nothing but module size. It ranks modules in descending SLOC
//! order, except that the very largest modules — a greedy prefix of the
//! descending order whose cumulative SLOC stays within a configurable
//! share of the release total — are deferred to the tail of the ranking in
//! ascending SLOC order. Deferring the giants keeps the inspected prefix
//! cheap under code-based budgets while preserving the size signal.

use serde::{Deserialize, Serialize};

use crate::dataset::ReleaseDataset;
use crate::error::{Error, Result};
use crate::ranking::{cut_snm, cut_ssc, BudgetKind, EffortBudget, InspectionResult, Ranking};

/// Name ONE rankings carry as their producer.
pub const PRODUCER: &str = "one";

/// Configuration of the ONE baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOneConfig", into = "RawOneConfig")]
pub struct OneConfig {
    excluded: f64,
}

#[derive(Serialize, Deserialize)]
struct RawOneConfig {
    excluded: f64,
}

impl TryFrom<RawOneConfig> for OneConfig {
    type Error = Error;

    fn try_from(raw: RawOneConfig) -> Result<Self> {
        OneConfig::new(raw.excluded)
    }
}

impl From<OneConfig> for RawOneConfig {
    fn from(c: OneConfig) -> Self {
        RawOneConfig {
            excluded: c.excluded,
        }
    }
}

impl OneConfig {
    /// Builds a configuration; the excluded code-size share must be finite
    /// and in [0, 1). At 0 nothing is deferred and ONE coincides with
    /// ranking purely by descending SLOC.
    pub fn new(excluded: f64) -> Result<Self> {
        if !excluded.is_finite() || !(0.0..1.0).contains(&excluded) {
            return Err(Error::data(format!(
                "excluded code-size share must be in [0, 1), got {excluded}"
            )));
        }
        Ok(Self { excluded })
    }

    /// Share of the total SLOC the deferred giants may occupy.
    pub fn excluded(&self) -> f64 {
        self.excluded
    }
}

impl Default for OneConfig {
    fn default() -> Self {
        Self { excluded: 0.20 }
    }
}

/// Produces the ONE ranking of a release.
///
/// Let `desc` be the modules sorted by descending SLOC (ties by ascending
/// id) and `s` the release total. The deferred set E is the maximal prefix
/// of `desc` whose cumulative SLOC share stays at or below the configured
/// `excluded` fraction — greedy from the largest module down, stopping at
/// the first module that would overshoot; if the single largest module
/// alone overshoots, E is empty. The ranking is the remainder R in
/// descending order followed by E re-sorted in ascending SLOC order (ties
/// by ascending id). Scores are strictly decreasing ordinals.
pub fn one_ranking(dataset: &ReleaseDataset, config: &OneConfig) -> Ranking {
    let mut desc: Vec<(&str, u64)> = dataset
        .modules()
        .iter()
        .map(|m| (m.id.as_str(), m.sloc))
        .collect();
    desc.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let s = dataset.total_sloc() as f64;
    let mut cum = 0u64;
    let mut e_len = 0usize;
    for &(_, sloc) in &desc {
        if (cum + sloc) as f64 / s <= config.excluded {
            cum += sloc;
            e_len += 1;
        } else {
            break;
        }
    }

    let rest = desc.split_off(e_len);
    let mut deferred = desc;
    deferred.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));

    let order: Vec<String> = rest
        .iter()
        .chain(deferred.iter())
        .map(|(id, _)| id.to_string())
        .collect();
    Ranking::from_order(dataset, PRODUCER, order).expect("order is a permutation by construction")
}

/// Ranks with ONE and cuts at the given budget in one step.
pub fn one_classify(
    dataset: &ReleaseDataset,
    config: &OneConfig,
    budget: EffortBudget,
) -> Result<InspectionResult> {
    let ranking = one_ranking(dataset, config);
    match budget.kind() {
        BudgetKind::Snm => cut_snm(&ranking, dataset, budget.fraction()),
        BudgetKind::Ssc => cut_ssc(&ranking, dataset, budget.fraction()),
    }
}
