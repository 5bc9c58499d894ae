//! Rankings over a release and SQA-effort-aligned inspection cuts.
//!
//! Every model under evaluation reduces to a total order over the modules
//! of one release. A cut takes the longest ranked prefix whose inspection
//! effort stays within a budget, expressed either as a fraction of the
//! module count (SNM: supervised-number-of-modules style) or of the total
//! SLOC (SSC: supervised-source-code style), and scores the prefix against
//! the defect labels.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::ReleaseDataset;
use crate::error::{Error, Result};

/// How an effort budget is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetKind {
    /// Fraction of the number of modules.
    Snm,
    /// Fraction of the total SLOC.
    Ssc,
}

impl std::fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BudgetKind::Snm => "snm",
            BudgetKind::Ssc => "ssc",
        })
    }
}

impl std::str::FromStr for BudgetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "snm" => Ok(BudgetKind::Snm),
            "ssc" => Ok(BudgetKind::Ssc),
            other => Err(Error::data(format!(
                "unknown budget kind \"{other}\" (expected snm or ssc)"
            ))),
        }
    }
}

/// A validated inspection budget: a kind plus a fraction in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBudget", into = "RawBudget")]
pub struct EffortBudget {
    kind: BudgetKind,
    fraction: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBudget {
    #[serde(rename = "budget_kind")]
    kind: BudgetKind,
    #[serde(rename = "budget_fraction")]
    fraction: f64,
}

impl TryFrom<RawBudget> for EffortBudget {
    type Error = Error;

    fn try_from(raw: RawBudget) -> Result<Self> {
        EffortBudget::new(raw.kind, raw.fraction)
    }
}

impl From<EffortBudget> for RawBudget {
    fn from(b: EffortBudget) -> Self {
        RawBudget {
            kind: b.kind,
            fraction: b.fraction,
        }
    }
}

impl EffortBudget {
    /// Builds a budget; the fraction must be finite and in (0, 1].
    pub fn new(kind: BudgetKind, fraction: f64) -> Result<Self> {
        if !fraction.is_finite() || fraction <= 0.0 || fraction > 1.0 {
            return Err(Error::data(format!(
                "budget fraction must be in (0, 1], got {fraction}"
            )));
        }
        Ok(Self { kind, fraction })
    }

    /// How the budget is measured.
    pub fn kind(&self) -> BudgetKind {
        self.kind
    }

    /// Budget fraction in (0, 1].
    pub fn fraction(&self) -> f64 {
        self.fraction
    }
}

/// A total order over the modules of one release, highest priority first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    dataset_ref: String,
    producer: String,
    order: Vec<String>,
    scores: Vec<f64>,
}

impl Ranking {
    /// Ranks modules by score, descending, with ties broken by ascending
    /// module id. The scores must cover every module of the dataset exactly
    /// once and be finite.
    pub fn from_scores(
        dataset: &ReleaseDataset,
        producer: impl Into<String>,
        mut pairs: Vec<(String, f64)>,
    ) -> Result<Self> {
        let producer = producer.into();
        validate_coverage(dataset, pairs.iter().map(|(id, _)| id.as_str()), &producer)?;
        if let Some((id, score)) = pairs.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::data(format!(
                "non-finite score {score} for module \"{id}\" in {producer} ranking"
            )));
        }
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (order, scores) = pairs.into_iter().unzip();
        Ok(Self {
            dataset_ref: dataset.release_key(),
            producer,
            order,
            scores,
        })
    }

    /// Wraps an explicit order, assigning strictly decreasing ordinal
    /// scores (k, k-1, ..., 1). The order must be a permutation of the
    /// dataset's module ids.
    pub fn from_order(
        dataset: &ReleaseDataset,
        producer: impl Into<String>,
        order: Vec<String>,
    ) -> Result<Self> {
        let producer = producer.into();
        validate_coverage(dataset, order.iter().map(|s| s.as_str()), &producer)?;
        let k = order.len();
        let scores = (0..k).map(|i| (k - i) as f64).collect();
        Ok(Self {
            dataset_ref: dataset.release_key(),
            producer,
            order,
            scores,
        })
    }

    /// Wraps an explicit order together with its scores. The scores must be
    /// finite and non-increasing along the order.
    pub fn from_order_with_scores(
        dataset: &ReleaseDataset,
        producer: impl Into<String>,
        pairs: Vec<(String, f64)>,
    ) -> Result<Self> {
        let producer = producer.into();
        validate_coverage(dataset, pairs.iter().map(|(id, _)| id.as_str()), &producer)?;
        if let Some((id, score)) = pairs.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::data(format!(
                "non-finite score {score} for module \"{id}\" in {producer} ranking"
            )));
        }
        if pairs.windows(2).any(|w| w[0].1 < w[1].1) {
            return Err(Error::data(format!(
                "scores must be non-increasing along the {producer} ranking"
            )));
        }
        let (order, scores) = pairs.into_iter().unzip();
        Ok(Self {
            dataset_ref: dataset.release_key(),
            producer,
            order,
            scores,
        })
    }

    /// Release key of the dataset this ranking belongs to.
    pub fn dataset_ref(&self) -> &str {
        &self.dataset_ref
    }

    /// Name of the model that produced the ranking.
    pub fn producer(&self) -> &str {
        &self.producer
    }

    /// Module ids, highest priority first.
    pub fn order(&self) -> &[String] {
        &self.order
    }

    /// Scores aligned with [`order`](Self::order); non-increasing.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Number of ranked modules.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    /// Whether the ranking is empty (never true for a valid ranking).
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

fn validate_coverage<'a>(
    dataset: &ReleaseDataset,
    ids: impl Iterator<Item = &'a str>,
    producer: &str,
) -> Result<()> {
    let mut seen: HashSet<&str> = HashSet::with_capacity(dataset.module_count());
    let mut unknown = Vec::new();
    let mut duplicates = Vec::new();
    let mut count = 0usize;
    for id in ids {
        count += 1;
        if dataset.module_by_id(id).is_none() {
            unknown.push(id.to_string());
        } else if !seen.insert(id) {
            duplicates.push(id.to_string());
        }
    }
    if !unknown.is_empty() {
        unknown.sort();
        return Err(Error::data(format!(
            "{producer} ranking names unknown module ids: {}",
            preview(&unknown)
        )));
    }
    if !duplicates.is_empty() {
        duplicates.sort();
        return Err(Error::data(format!(
            "{producer} ranking repeats module ids: {}",
            preview(&duplicates)
        )));
    }
    if count != dataset.module_count() {
        let missing: Vec<String> = dataset
            .modules()
            .iter()
            .filter(|m| !seen.contains(m.id.as_str()))
            .map(|m| m.id.clone())
            .collect();
        return Err(Error::data(format!(
            "{producer} ranking misses module ids: {}",
            preview(&missing)
        )));
    }
    Ok(())
}

fn preview(ids: &[String]) -> String {
    const LIMIT: usize = 5;
    let shown: Vec<&str> = ids.iter().take(LIMIT).map(|s| s.as_str()).collect();
    if ids.len() > LIMIT {
        format!("{} (+{} more)", shown.join(", "), ids.len() - LIMIT)
    } else {
        shown.join(", ")
    }
}

/// Counts of a binary classification against defect labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Defective modules inside the inspected prefix.
    #[serde(rename = "tp")]
    pub true_pos: usize,
    /// Clean modules inside the inspected prefix.
    #[serde(rename = "fp")]
    pub false_pos: usize,
    /// Clean modules outside the prefix.
    #[serde(rename = "tn")]
    pub true_neg: usize,
    /// Defective modules outside the prefix.
    #[serde(rename = "fn")]
    pub false_neg: usize,
}

impl ConfusionMatrix {
    /// Total number of modules (k).
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    /// Number of defective modules (n).
    pub fn positives(&self) -> usize {
        self.true_pos + self.false_neg
    }

    /// Number of clean modules (k - n).
    pub fn negatives(&self) -> usize {
        self.false_pos + self.true_neg
    }

    /// Size of the inspected prefix (x).
    pub fn predicted_positives(&self) -> usize {
        self.true_pos + self.false_pos
    }

    /// Whether any of the four marginal sums is zero.
    pub fn has_zero_marginal(&self) -> bool {
        self.positives() == 0
            || self.negatives() == 0
            || self.predicted_positives() == 0
            || self.true_neg + self.false_neg == 0
    }
}

/// Outcome of cutting a ranking at an effort budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectionResult {
    /// Model that produced the ranking.
    pub model: String,
    /// Release key the cut was taken on.
    pub release: String,
    /// Budget that determined the prefix.
    #[serde(flatten)]
    pub budget: EffortBudget,
    /// Number of inspected modules (prefix length).
    pub x: usize,
    /// Proportion of inspected modules, x / k.
    pub pii: f64,
    /// Proportion of inspected code, prefix SLOC / s.
    pub pci: f64,
    /// Classification counts of the prefix against the labels.
    #[serde(flatten)]
    pub confusion: ConfusionMatrix,
    /// True when the budget admits no module at all (x = 0); the cut is
    /// still well-defined but every prefix-based indicator degenerates.
    pub degenerate: bool,
}

/// Cuts a ranking at the largest prefix whose share of the module count
/// does not exceed `fraction` (never-exceed semantics: x = floor(fraction * k)).
pub fn cut_snm(
    ranking: &Ranking,
    dataset: &ReleaseDataset,
    fraction: f64,
) -> Result<InspectionResult> {
    let budget = EffortBudget::new(BudgetKind::Snm, fraction)?;
    check_ranking_matches(ranking, dataset)?;
    let k = dataset.module_count();

    // Largest x with x/k <= fraction, compared exactly as pii is computed.
    let ratio = |x: usize| x as f64 / k as f64;
    let mut x = ((fraction * k as f64).floor() as usize).min(k);
    while x < k && ratio(x + 1) <= fraction {
        x += 1;
    }
    while x > 0 && ratio(x) > fraction {
        x -= 1;
    }

    build_result(ranking, dataset, budget, x)
}

/// Cuts a ranking at the longest prefix whose share of the total SLOC does
/// not exceed `fraction` (never-exceed semantics).
pub fn cut_ssc(
    ranking: &Ranking,
    dataset: &ReleaseDataset,
    fraction: f64,
) -> Result<InspectionResult> {
    let budget = EffortBudget::new(BudgetKind::Ssc, fraction)?;
    check_ranking_matches(ranking, dataset)?;
    let s = dataset.total_sloc() as f64;

    let mut x = 0usize;
    let mut cum = 0u64;
    for id in ranking.order() {
        let sloc = dataset.module_by_id(id).expect("validated coverage").sloc;
        if (cum + sloc) as f64 / s <= fraction {
            cum += sloc;
            x += 1;
        } else {
            break;
        }
    }

    build_result(ranking, dataset, budget, x)
}

fn build_result(
    ranking: &Ranking,
    dataset: &ReleaseDataset,
    budget: EffortBudget,
    x: usize,
) -> Result<InspectionResult> {
    let confusion = confusion_of_prefix(ranking, dataset, x)?;
    let k = dataset.module_count();
    let prefix_sloc: u64 = ranking.order()[..x]
        .iter()
        .map(|id| dataset.module_by_id(id).expect("validated coverage").sloc)
        .sum();
    Ok(InspectionResult {
        model: ranking.producer().to_string(),
        release: dataset.release_key(),
        budget,
        x,
        pii: x as f64 / k as f64,
        pci: prefix_sloc as f64 / dataset.total_sloc() as f64,
        confusion,
        degenerate: x == 0,
    })
}

/// Classifies the first `x` ranked modules as predicted-defective and the
/// rest as predicted-clean, and scores that against the labels.
pub fn confusion_of_prefix(
    ranking: &Ranking,
    dataset: &ReleaseDataset,
    x: usize,
) -> Result<ConfusionMatrix> {
    check_ranking_matches(ranking, dataset)?;
    let k = dataset.module_count();
    if x > k {
        return Err(Error::data(format!(
            "prefix length {x} exceeds module count {k}"
        )));
    }
    let n = dataset.defective_count().ok_or_else(|| {
        Error::data(format!(
            "release {} has no defect labels; cannot score a prefix",
            dataset.release_key()
        ))
    })?;

    let true_pos = ranking.order()[..x]
        .iter()
        .filter(|id| dataset.module_by_id(id).expect("validated coverage").label == Some(true))
        .count();
    let false_pos = x - true_pos;
    let false_neg = n - true_pos;
    let true_neg = k - x - false_neg;
    Ok(ConfusionMatrix {
        true_pos,
        false_pos,
        true_neg,
        false_neg,
    })
}

pub(crate) fn check_ranking_matches(ranking: &Ranking, dataset: &ReleaseDataset) -> Result<()> {
    let key = dataset.release_key();
    if ranking.dataset_ref() != key {
        return Err(Error::data(format!(
            "ranking belongs to release {} but was applied to {key}",
            ranking.dataset_ref()
        )));
    }
    if ranking.len() != dataset.module_count() {
        return Err(Error::data(format!(
            "ranking covers {} modules but release {key} has {}",
            ranking.len(),
            dataset.module_count()
        )));
    }
    Ok(())
}

/// Imports an externally produced ranking from a CSV score file with
/// columns `id,score`. Scores must be finite and cover every module of the
/// release exactly once; higher scores rank earlier, ties break by
/// ascending id. The producing model is named `external:<path>`.
pub fn import_external_ranking(path: &Path, dataset: &ReleaseDataset) -> Result<Ranking> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| crate::dataset::csv_error(path, e))?;
    let display = path.display();

    let headers = reader
        .headers()
        .map_err(|e| crate::dataset::csv_error(path, e))?;
    let id_idx = headers
        .iter()
        .position(|h| h == "id")
        .ok_or_else(|| Error::data(format!("{display}: score file must have an \"id\" column")))?;
    let score_idx = headers.iter().position(|h| h == "score").ok_or_else(|| {
        Error::data(format!(
            "{display}: score file must have a \"score\" column"
        ))
    })?;

    let mut pairs = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| crate::dataset::csv_error(path, e))?;
        let id = record.get(id_idx).unwrap_or("").trim().to_string();
        let raw = record.get(score_idx).unwrap_or("").trim();
        let score: f64 = raw.parse().map_err(|_| {
            Error::data(format!(
                "{display}: non-numeric score \"{raw}\" at row {row}"
            ))
        })?;
        if !score.is_finite() {
            return Err(Error::data(format!(
                "{display}: non-finite score \"{raw}\" at row {row}"
            )));
        }
        pairs.push((id, score));
    }

    let producer = format!("external:{display}");
    Ranking::from_scores(dataset, producer, pairs)
        .map_err(|e| Error::data(format!("{display}: {e}")))
}
