//! The five subcommand implementations.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use matter_core::report::indicator_value;
use matter_core::{
    filter_corpus, load_release, one_ranking, pairwise_delta_matrix, rank_transform,
    scott_knott_esd, BudgetKind, EffortBudget, Error, FilterThresholds, IndicatorReport,
    PerformanceMatrix, Polarity, Result,
};
use serde::Serialize;

use crate::config::{parse_model, resolve, ModelParams, RunConfig};
use crate::output::{
    csv_text, read_results_csv, write_json, write_results_csv, write_results_json, Provenance,
    ResultRow,
};
use crate::pipeline::{load_corpus, run_grid, GridOutcome, TripleFailure};

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::data(format!("cannot create {}: {e}", dir.display())))
}

fn fail_triple(failure: TripleFailure) -> Error {
    let TripleFailure {
        model,
        release,
        error,
    } = failure;
    match error.kind() {
        matter_core::ErrorKind::Model => Error::model(format!(
            "model {model} failed on release {release}: {error}"
        )),
        matter_core::ErrorKind::Data => Error::data(format!(
            "model {model} failed on release {release}: {error}"
        )),
    }
}

/// Runs every (model, release, budget) triple and writes `results.csv` and
/// `results.json` into the output directory. Completed rows are flushed even
/// when a triple fails; the failure is then reported with its (model,
/// release) pair named.
pub fn cmd_evaluate(config: &RunConfig, base: &Path, out_dir: &Path) -> Result<usize> {
    config.validate_for_run()?;
    let params = config.model_params()?;
    let models: Vec<_> = config
        .models
        .iter()
        .map(|name| parse_model(name))
        .collect::<Result<_>>()?;
    let releases = load_corpus(config, base)?;

    let GridOutcome { rows, failure } =
        run_grid(&models, &releases, &config.budgets, &params, base);

    ensure_dir(out_dir)?;
    let provenance = Provenance::new(config.seed, config.hash());
    write_results_csv(&out_dir.join("results.csv"), &provenance, &rows)?;
    write_results_json(&out_dir.join("results.json"), &provenance, &rows)?;

    match failure {
        Some(failure) => Err(fail_triple(failure)),
        None => Ok(rows.len()),
    }
}

/// How `compare` selects and orients one indicator column.
pub struct CompareSpec {
    pub indicator: String,
    pub polarity: Polarity,
    pub budget_kind: Option<BudgetKind>,
    pub budget_fraction: Option<f64>,
    pub force: bool,
}

#[derive(Serialize)]
struct GroupingDoc<'a> {
    indicator: &'a str,
    polarity: Polarity,
    grouping: &'a matter_core::SkGrouping,
    /// (model, release) cells whose indicator was undefined and therefore
    /// ranked worst.
    undefined_cells: &'a [(String, String)],
}

/// Reads results files, builds the model × release matrix for one indicator,
/// and writes the Scott-Knott ESD grouping plus the pairwise-δ heatmap.
pub fn cmd_compare(results: &[PathBuf], spec: &CompareSpec, out_dir: &Path) -> Result<()> {
    if results.is_empty() {
        return Err(Error::data("no results files given"));
    }

    let mut hashes = BTreeSet::new();
    let mut rows: Vec<ResultRow> = Vec::new();
    for path in results {
        let file = read_results_csv(path)?;
        hashes.insert(file.config_hash);
        rows.extend(file.rows);
    }
    if hashes.len() > 1 && !spec.force {
        return Err(Error::data(format!(
            "results files carry {} different config hashes; rerun under one config or pass \
             --force to compare anyway",
            hashes.len()
        )));
    }

    rows.retain(|row| {
        spec.budget_kind
            .map_or(true, |kind| row.budget_kind == budget_kind_name(kind))
            && spec
                .budget_fraction
                .map_or(true, |fraction| row.budget_fraction == fraction)
    });
    if rows.is_empty() {
        return Err(Error::data("no result rows match the budget selection"));
    }
    let budgets: BTreeSet<(String, u64)> = rows
        .iter()
        .map(|row| (row.budget_kind.clone(), row.budget_fraction.to_bits()))
        .collect();
    if budgets.len() > 1 {
        return Err(Error::data(format!(
            "result rows span {} budget settings; select one with --budget-kind/--budget",
            budgets.len()
        )));
    }

    let mut cells: BTreeMap<(String, String), Option<f64>> = BTreeMap::new();
    for row in &rows {
        let value = *row
            .values
            .get(&spec.indicator)
            .ok_or_else(|| Error::data(format!("results lack the {} column", spec.indicator)))?;
        let key = (row.model.clone(), row.release.clone());
        if cells.insert(key, value).is_some() {
            return Err(Error::data(format!(
                "duplicate result row for model {} on release {}",
                row.model, row.release
            )));
        }
    }

    let models: Vec<String> = cells
        .keys()
        .map(|(m, _)| m.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let shared: Vec<String> = cells
        .keys()
        .map(|(_, r)| r.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|release| {
            models
                .iter()
                .all(|model| cells.contains_key(&(model.clone(), release.clone())))
        })
        .collect();
    if models.len() < 2 {
        return Err(Error::data(format!(
            "results contain {} model(s); need at least 2 to compare",
            models.len()
        )));
    }
    if shared.len() < 2 {
        return Err(Error::data(format!(
            "the {} models share only {} release(s); need at least 2",
            models.len(),
            shared.len()
        )));
    }

    let values: Vec<Vec<Option<f64>>> = models
        .iter()
        .map(|model| {
            shared
                .iter()
                .map(|release| cells[&(model.clone(), release.clone())])
                .collect()
        })
        .collect();
    let matrix = PerformanceMatrix::new(models, shared, values, spec.polarity)?;
    let grouping = scott_knott_esd(&matrix)?;
    let ranks = rank_transform(&matrix)?;
    let deltas = pairwise_delta_matrix(&ranks);

    ensure_dir(out_dir)?;
    let hash = hashes.into_iter().collect::<Vec<_>>().join("+");
    let provenance = Provenance::derived(hash);

    let grouping_csv = csv_text(
        &provenance,
        &["model", "mean_rank", "group"],
        grouping.entries.iter().map(|entry| {
            vec![
                entry.model.clone(),
                entry.mean_rank.to_string(),
                entry.group.to_string(),
            ]
        }),
    );
    fs::write(out_dir.join("grouping.csv"), grouping_csv)
        .map_err(|e| Error::data(format!("cannot write grouping.csv: {e}")))?;

    write_json(
        &out_dir.join("grouping.json"),
        &provenance,
        &GroupingDoc {
            indicator: &spec.indicator,
            polarity: spec.polarity,
            grouping: &grouping,
            undefined_cells: ranks.undefined_cells(),
        },
    )?;

    let mut header = vec!["model"];
    header.extend(ranks.models().iter().map(String::as_str));
    let heatmap_csv = csv_text(
        &provenance,
        &header,
        ranks.models().iter().enumerate().map(|(i, model)| {
            let mut record = vec![model.clone()];
            record.extend(deltas[i].iter().map(f64::to_string));
            record
        }),
    );
    fs::write(out_dir.join("pairwise_delta.csv"), heatmap_csv)
        .map_err(|e| Error::data(format!("cannot write pairwise_delta.csv: {e}")))?;
    Ok(())
}

/// The quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Vary the budget fraction; the budget kind is fixed.
    BudgetFraction(BudgetKind),
    /// Vary ONE's excluded-code share; budgets come from the config.
    ExcludedShare,
}

impl SweepAxis {
    fn name(&self) -> &'static str {
        match self {
            SweepAxis::BudgetFraction(_) => "budget-fraction",
            SweepAxis::ExcludedShare => "excluded-pct",
        }
    }

    /// Checks one grid point against the axis domain.
    pub fn check_point(&self, point: f64) -> Result<()> {
        let ok = match self {
            SweepAxis::BudgetFraction(_) => point.is_finite() && point > 0.0 && point <= 1.0,
            SweepAxis::ExcludedShare => point.is_finite() && (0.0..1.0).contains(&point),
        };
        if ok {
            Ok(())
        } else {
            let domain = match self {
                SweepAxis::BudgetFraction(_) => "(0, 1]",
                SweepAxis::ExcludedShare => "[0, 1)",
            };
            Err(Error::data(format!(
                "grid point {point} is outside {domain} for axis {}",
                self.name()
            )))
        }
    }
}

fn budget_kind_name(kind: BudgetKind) -> &'static str {
    match kind {
        BudgetKind::Snm => "snm",
        BudgetKind::Ssc => "ssc",
    }
}

/// Values a sweep row may report: any indicator column plus the raw prefix
/// size `x` and hit count `tp`.
fn sweep_value(report: &IndicatorReport, name: &str) -> Result<Option<f64>> {
    match name {
        "x" => Ok(Some(report.inspection.x as f64)),
        "tp" => Ok(Some(report.inspection.confusion.true_pos as f64)),
        _ => indicator_value(report, name),
    }
}

/// Runs one evaluate pass per grid point and writes `sweep.csv` in long
/// format: one row per (point, model, release, budget, indicator).
pub fn cmd_sweep(
    config: &RunConfig,
    base: &Path,
    out_dir: &Path,
    axis: SweepAxis,
    grid: &[f64],
) -> Result<usize> {
    config.validate_for_run()?;
    if grid.is_empty() {
        return Err(Error::data("sweep grid is empty"));
    }
    for &point in grid {
        axis.check_point(point)?;
    }
    let params = config.model_params()?;
    let models: Vec<_> = config
        .models
        .iter()
        .map(|name| parse_model(name))
        .collect::<Result<_>>()?;
    let releases = load_corpus(config, base)?;

    let mut records: Vec<Vec<String>> = Vec::new();
    let mut failure = None;
    'points: for &point in grid {
        let (budgets, point_params): (Vec<EffortBudget>, ModelParams) = match axis {
            SweepAxis::BudgetFraction(kind) => {
                (vec![EffortBudget::new(kind, point)?], params.clone())
            }
            SweepAxis::ExcludedShare => {
                let mut adjusted = params.clone();
                adjusted.one = matter_core::OneConfig::new(point)?;
                (config.budgets.clone(), adjusted)
            }
        };
        let outcome = run_grid(&models, &releases, &budgets, &point_params, base);
        for report in &outcome.rows {
            for indicator in &config.indicators {
                let value = sweep_value(report, indicator)?;
                records.push(vec![
                    axis.name().to_string(),
                    point.to_string(),
                    budget_kind_name(report.inspection.budget.kind()).to_string(),
                    report.inspection.budget.fraction().to_string(),
                    report.model().to_string(),
                    report.release().to_string(),
                    indicator.clone(),
                    matter_core::report::cell(value),
                ]);
            }
        }
        if let Some(f) = outcome.failure {
            failure = Some(f);
            break 'points;
        }
    }

    ensure_dir(out_dir)?;
    let provenance = Provenance::new(config.seed, config.hash());
    let text = csv_text(
        &provenance,
        &[
            "axis",
            "point",
            "budget_kind",
            "budget_fraction",
            "model",
            "release",
            "indicator",
            "value",
        ],
        records.iter().cloned(),
    );
    fs::write(out_dir.join("sweep.csv"), text)
        .map_err(|e| Error::data(format!("cannot write sweep.csv: {e}")))?;

    match failure {
        Some(failure) => Err(fail_triple(failure)),
        None => Ok(records.len()),
    }
}

/// Outcome of checking one corpus entry.
pub struct ValidationLine {
    pub label: String,
    pub reasons: Vec<String>,
}

/// Loads every corpus release and applies the admission rules; returns one
/// line per release (empty `reasons` = pass).
pub fn cmd_validate(config: &RunConfig, base: &Path) -> Result<Vec<ValidationLine>> {
    if config.corpus.is_empty() {
        return Err(Error::data("config lists no corpus releases"));
    }
    let thresholds = FilterThresholds::default();
    let mut lines = Vec::new();
    for entry in &config.corpus {
        let path = resolve(base, &entry.path);
        let columns = entry
            .columns
            .clone()
            .unwrap_or_else(|| matter_core::canonical_columns(true));
        let line = match load_release(&path, &columns) {
            Err(error) => ValidationLine {
                label: path.display().to_string(),
                reasons: vec![error.to_string()],
            },
            Ok(release) => {
                let label = release.release_key();
                match filter_corpus(vec![release], &thresholds) {
                    Err(error) => ValidationLine {
                        label,
                        reasons: vec![error.to_string()],
                    },
                    Ok(report) => {
                        let reasons = report
                            .excluded
                            .into_iter()
                            .flat_map(|excluded| excluded.reasons)
                            .collect();
                        ValidationLine { label, reasons }
                    }
                }
            }
        };
        lines.push(line);
    }
    Ok(lines)
}

/// Emits the ONE baseline ranking for a single release as CSV rows of
/// (rank, id, sloc). Releases without a `label` column are accepted.
pub fn cmd_one_rank(input: &Path, excluded: f64, out: Option<&Path>) -> Result<()> {
    let labeled = csv_has_label_column(input)?;
    let dataset = load_release(input, &matter_core::canonical_columns(labeled))?;
    let config = matter_core::OneConfig::new(excluded)?;
    let ranking = one_ranking(&dataset, &config);

    let sloc: BTreeMap<&str, u64> = dataset
        .modules()
        .iter()
        .map(|module| (module.id.as_str(), module.sloc))
        .collect();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["rank", "id", "sloc"])
        .expect("in-memory csv");
    for (position, id) in ranking.order().iter().enumerate() {
        writer
            .write_record([
                (position + 1).to_string(),
                id.clone(),
                sloc[id.as_str()].to_string(),
            ])
            .expect("in-memory csv");
    }
    let text = String::from_utf8(writer.into_inner().expect("in-memory csv"))
        .expect("csv output is utf-8");

    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::data(format!("cannot write to stdout: {e}")))
        }
    }
}

fn csv_has_label_column(path: &Path) -> Result<bool> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))?;
    Ok(headers.iter().any(|h| h == "label"))
}
