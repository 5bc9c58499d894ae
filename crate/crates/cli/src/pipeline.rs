//! End-to-end evaluation: load the corpus, run every model, cut at every
//! budget, and gather indicator rows in a deterministic order.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use matter_core::{
    cla, evaluate, fcm, import_external_ranking, load_release, manual_down, manual_up, one_ranking,
    spectral_cluster, EffortBudget, Error, EvalParams, IndicatorReport, Ranking, ReleaseDataset,
    Result,
};
use rayon::prelude::*;

use crate::config::{resolve, ModelKind, ModelParams, ModelSpec, RunConfig};

/// Loads every corpus entry, resolving paths against the config directory and
/// rejecting duplicate release keys.
pub fn load_corpus(config: &RunConfig, base: &Path) -> Result<Vec<ReleaseDataset>> {
    let mut releases = Vec::with_capacity(config.corpus.len());
    let mut seen = BTreeSet::new();
    for entry in &config.corpus {
        let path = resolve(base, &entry.path);
        let columns = entry
            .columns
            .clone()
            .unwrap_or_else(|| matter_core::canonical_columns(true));
        let release = load_release(&path, &columns)?;
        let key = release.release_key();
        if !seen.insert(key.clone()) {
            return Err(Error::data(format!("corpus contains release {key} twice")));
        }
        releases.push(release);
    }
    Ok(releases)
}

/// Runs one model on one release and returns its ranking under the model's
/// config name (external rankings are renamed from their file path to the
/// config name so result rows stay stable).
pub fn run_model(
    model: &ModelSpec,
    dataset: &ReleaseDataset,
    params: &ModelParams,
    base: &Path,
) -> Result<Ranking> {
    let ranking = match &model.kind {
        ModelKind::One => one_ranking(dataset, &params.one),
        ModelKind::ManualDown => manual_down(dataset).ranking,
        ModelKind::ManualUp => manual_up(dataset).ranking,
        ModelKind::Cla => cla(dataset)?.ranking,
        ModelKind::Fcm => fcm(dataset, &params.fcm)?.ranking,
        ModelKind::Sc => spectral_cluster(dataset, &params.sc)?.ranking,
        ModelKind::External(path) => {
            let file = external_score_file(base, path, dataset);
            import_external_ranking(&file, dataset)?
        }
    };
    let pairs = ranking
        .order()
        .iter()
        .cloned()
        .zip(ranking.scores().iter().copied())
        .collect();
    Ranking::from_order_with_scores(dataset, model.name.clone(), pairs)
}

/// An `external:<path>` entry may point at a single score file or at a
/// directory holding one `<release_key>.csv` per release.
fn external_score_file(base: &Path, path: &Path, dataset: &ReleaseDataset) -> PathBuf {
    let resolved = resolve(base, path);
    if resolved.is_dir() {
        resolved.join(format!("{}.csv", dataset.release_key()))
    } else {
        resolved
    }
}

/// The outcome of running the full grid: rows for every triple that
/// succeeded, in (model, release, budget) config order, plus the first
/// failure if any triple failed.
pub struct GridOutcome {
    pub rows: Vec<IndicatorReport>,
    pub failure: Option<TripleFailure>,
}

/// A failed (model, release) pair; budgets share the ranking, so the pair is
/// the natural unit of failure.
pub struct TripleFailure {
    pub model: String,
    pub release: String,
    pub error: Error,
}

/// Evaluates every (model, release, budget) triple. Work runs on the rayon
/// pool; rows are gathered and emitted in config order, so the output is
/// identical regardless of worker count.
pub fn run_grid(
    models: &[ModelSpec],
    releases: &[ReleaseDataset],
    budgets: &[EffortBudget],
    params: &ModelParams,
    base: &Path,
) -> GridOutcome {
    let pairs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..releases.len()).map(move |r| (m, r)))
        .collect();

    let ranked: Vec<Result<Ranking>> = pairs
        .par_iter()
        .map(|&(m, r)| run_model(&models[m], &releases[r], params, base))
        .collect();

    let mut rows = Vec::new();
    let mut failure = None;
    for ((m, r), ranking) in pairs.into_iter().zip(ranked) {
        let outcome = ranking.and_then(|ranking| {
            budgets
                .iter()
                .map(|&budget| evaluate(&ranking, &releases[r], budget, &EvalParams::default()))
                .collect::<Result<Vec<_>>>()
        });
        match outcome {
            Ok(reports) => rows.push(((m, r), reports)),
            Err(error) => {
                if failure.is_none() {
                    failure = Some(TripleFailure {
                        model: models[m].name.clone(),
                        release: releases[r].release_key(),
                        error,
                    });
                }
            }
        }
    }

    rows.sort_by_key(|&((m, r), _)| (m, r));
    GridOutcome {
        rows: rows.into_iter().flat_map(|(_, reports)| reports).collect(),
        failure,
    }
}
