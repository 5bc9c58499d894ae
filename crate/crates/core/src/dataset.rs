//! Release datasets: loading, validation, corpus filtering, and metric
//! standardization.
//!
//! A release is a set of software modules (files/classes), each with a
//! unique id, a positive SLOC count, optional defect labels, and a fixed
//! set of numeric metrics. Bug-count label columns are binarized on load:
//! a module is defective iff its count is greater than zero.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One software module of a release.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleRecord {
    /// Unique module identifier within its release.
    pub id: String,
    /// Source lines of code; always at least 1.
    pub sloc: u64,
    /// Defect label, if the release is labeled (`true` = defective).
    pub label: Option<bool>,
    /// Metric name -> finite value, same names in the same order for every
    /// module of a release.
    pub metrics: IndexMap<String, f64>,
}

/// A validated software release.
///
/// Invariants enforced at construction:
/// - at least one module, with unique ids;
/// - every `sloc >= 1`;
/// - every metric value finite, with an identical metric-name sequence
///   across modules;
/// - labels are present on all modules or on none.
#[derive(Debug, Clone)]
pub struct ReleaseDataset {
    project: String,
    version: String,
    modules: Vec<ModuleRecord>,
    index: HashMap<String, usize>,
}

impl PartialEq for ReleaseDataset {
    fn eq(&self, other: &Self) -> bool {
        self.project == other.project
            && self.version == other.version
            && self.modules == other.modules
    }
}

impl ReleaseDataset {
    /// Validates and builds a release from raw module records.
    pub fn new(
        project: impl Into<String>,
        version: impl Into<String>,
        modules: Vec<ModuleRecord>,
    ) -> Result<Self> {
        let project = project.into();
        let version = version.into();
        if modules.is_empty() {
            return Err(Error::data(format!(
                "release {project} contains no modules"
            )));
        }

        let mut index = HashMap::with_capacity(modules.len());
        let labeled = modules[0].label.is_some();
        let metric_names: Vec<&String> = modules[0].metrics.keys().collect();
        for (i, m) in modules.iter().enumerate() {
            if m.id.is_empty() {
                return Err(Error::data(format!("empty module id at position {i}")));
            }
            if index.insert(m.id.clone(), i).is_some() {
                return Err(Error::data(format!("duplicate module id \"{}\"", m.id)));
            }
            if m.sloc == 0 {
                return Err(Error::data(format!(
                    "non-positive sloc for module \"{}\"",
                    m.id
                )));
            }
            if m.label.is_some() != labeled {
                return Err(Error::data(format!(
                    "labels must be present on all modules or none; module \"{}\" differs",
                    m.id
                )));
            }
            if !m.metrics.keys().eq(metric_names.iter().copied()) {
                return Err(Error::data(format!(
                    "metric columns of module \"{}\" differ from the first module",
                    m.id
                )));
            }
            if let Some((name, value)) = m.metrics.iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::data(format!(
                    "non-finite metric \"{name}\" = {value} for module \"{}\"",
                    m.id
                )));
            }
        }

        Ok(Self {
            project,
            version,
            modules,
            index,
        })
    }

    /// Project name (for releases loaded from disk: the file stem, unless
    /// renamed via [`set_identity`](Self::set_identity)).
    pub fn project(&self) -> &str {
        &self.project
    }

    /// Version string; may be empty.
    pub fn version(&self) -> &str {
        &self.version
    }

    /// Replaces the project/version identity.
    pub fn set_identity(&mut self, project: impl Into<String>, version: impl Into<String>) {
        self.project = project.into();
        self.version = version.into();
    }

    /// Canonical release name: `project` or `project-version`.
    pub fn release_key(&self) -> String {
        if self.version.is_empty() {
            self.project.clone()
        } else {
            format!("{}-{}", self.project, self.version)
        }
    }

    /// All modules in load order.
    pub fn modules(&self) -> &[ModuleRecord] {
        &self.modules
    }

    /// Looks a module up by id.
    pub fn module_by_id(&self, id: &str) -> Option<&ModuleRecord> {
        self.index.get(id).map(|&i| &self.modules[i])
    }

    /// Number of modules (k).
    pub fn module_count(&self) -> usize {
        self.modules.len()
    }

    /// Whether defect labels are present.
    pub fn has_labels(&self) -> bool {
        self.modules[0].label.is_some()
    }

    /// Number of defective modules (n), if labeled.
    pub fn defective_count(&self) -> Option<usize> {
        if !self.has_labels() {
            return None;
        }
        Some(
            self.modules
                .iter()
                .filter(|m| m.label == Some(true))
                .count(),
        )
    }

    /// Total SLOC of the release (s).
    pub fn total_sloc(&self) -> u64 {
        self.modules.iter().map(|m| m.sloc).sum()
    }

    /// Metric column names (empty if the release has no metrics).
    pub fn metric_names(&self) -> Vec<&str> {
        self.modules[0].metrics.keys().map(|s| s.as_str()).collect()
    }
}

/// Which CSV columns hold the module id, SLOC, labels, and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    /// Column with the unique module id.
    pub id_column: String,
    /// Column with the SLOC count.
    pub sloc_column: String,
    /// Column with the defect label or bug count, if labeled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    /// Which columns are metrics.
    #[serde(default)]
    pub metric_columns: MetricColumns,
}

/// Metric column selection: an explicit list, or every column that is not
/// the id, SLOC, or label column.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum MetricColumns {
    /// Use all remaining columns, in header order.
    #[default]
    AllRemaining,
    /// Use exactly these columns, in the given order.
    Named(Vec<String>),
}

const ALL_REMAINING: &str = "all-remaining";

impl Serialize for MetricColumns {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MetricColumns::AllRemaining => serializer.serialize_str(ALL_REMAINING),
            MetricColumns::Named(names) => names.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for MetricColumns {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Sentinel(String),
            Named(Vec<String>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Sentinel(s) if s == ALL_REMAINING => Ok(MetricColumns::AllRemaining),
            Raw::Sentinel(s) => Err(serde::de::Error::custom(format!(
                "metric_columns must be \"{ALL_REMAINING}\" or a list of column names, got \"{s}\""
            ))),
            Raw::Named(names) => Ok(MetricColumns::Named(names)),
        }
    }
}

/// Loads and validates one release from a CSV file with a header row.
///
/// The project name defaults to the file stem and the version to empty;
/// use [`ReleaseDataset::set_identity`] to rename. Bug counts in the label
/// column are binarized: defective iff the count is greater than zero
/// (`true`/`false` literals are also accepted). Row numbers in error
/// messages are 1-based over data rows, excluding the header.
pub fn load_release(path: &Path, spec: &ColumnSpec) -> Result<ReleaseDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let display = path.display();

    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        if let Some(first) = seen.insert(name, i) {
            return Err(Error::data(format!(
                "{display}: duplicate column \"{name}\" (positions {first} and {i})"
            )));
        }
    }
    let column = |name: &str| -> Result<usize> {
        seen.get(name)
            .copied()
            .ok_or_else(|| Error::data(format!("{display}: column \"{name}\" not found in header")))
    };

    let id_idx = column(&spec.id_column)?;
    let sloc_idx = column(&spec.sloc_column)?;
    let label_idx = spec.label_column.as_deref().map(column).transpose()?;

    let metric_idx: Vec<(usize, String)> = match &spec.metric_columns {
        MetricColumns::Named(names) => names
            .iter()
            .map(|n| Ok((column(n)?, n.clone())))
            .collect::<Result<_>>()?,
        MetricColumns::AllRemaining => headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != id_idx && *i != sloc_idx && Some(*i) != label_idx)
            .map(|(i, n)| (i, n.to_string()))
            .collect(),
    };

    let mut modules = Vec::new();
    let mut seen_ids: HashMap<String, usize> = HashMap::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record.map_err(|e| csv_error(path, e))?;

        let id = record.get(id_idx).unwrap_or("").trim().to_string();
        if id.is_empty() {
            return Err(Error::data(format!(
                "{display}: empty module id at row {row}"
            )));
        }

        let sloc_raw = record.get(sloc_idx).unwrap_or("").trim();
        let sloc = parse_sloc(sloc_raw).map_err(|why| {
            Error::data(format!(
                "{display}: {why} sloc \"{sloc_raw}\" at row {row} (column \"{}\")",
                spec.sloc_column
            ))
        })?;

        let label = match label_idx {
            None => None,
            Some(idx) => {
                let raw = record.get(idx).unwrap_or("").trim();
                Some(parse_label(raw).map_err(|why| {
                    Error::data(format!(
                        "{display}: {why} label \"{raw}\" at row {row} (column \"{}\")",
                        spec.label_column.as_deref().unwrap_or_default()
                    ))
                })?)
            }
        };

        let mut metrics = IndexMap::with_capacity(metric_idx.len());
        for (idx, name) in &metric_idx {
            let raw = record.get(*idx).unwrap_or("").trim();
            let value: f64 = raw.parse().map_err(|_| {
                Error::data(format!(
                    "{display}: non-numeric metric \"{raw}\" at row {row} (column \"{name}\")"
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::data(format!(
                    "{display}: non-finite metric \"{raw}\" at row {row} (column \"{name}\")"
                )));
            }
            metrics.insert(name.clone(), value);
        }

        if let Some(first_row) = seen_ids.insert(id.clone(), row) {
            return Err(Error::data(format!(
                "{display}: duplicate module id \"{id}\" at row {row} (first at row {first_row})"
            )));
        }
        modules.push(ModuleRecord {
            id,
            sloc,
            label,
            metrics,
        });
    }

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| display.to_string());
    ReleaseDataset::new(stem, "", modules).map_err(|e| Error::data(format!("{display}: {e}")))
}

/// Writes a release back to CSV in the canonical schema
/// `id,sloc[,label],<metrics...>`; labels are written as 0/1 counts.
/// Loading the written file with the matching [`ColumnSpec`] reproduces
/// the dataset exactly.
pub fn save_release(dataset: &ReleaseDataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;

    let mut header = vec!["id".to_string(), "sloc".to_string()];
    if dataset.has_labels() {
        header.push("label".to_string());
    }
    header.extend(dataset.metric_names().iter().map(|s| s.to_string()));
    writer
        .write_record(&header)
        .map_err(|e| csv_error(path, e))?;

    for m in dataset.modules() {
        let mut record = vec![m.id.clone(), m.sloc.to_string()];
        if let Some(label) = m.label {
            record.push(if label { "1" } else { "0" }.to_string());
        }
        record.extend(m.metrics.values().map(|v| v.to_string()));
        writer
            .write_record(&record)
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

/// The canonical column mapping written by [`save_release`].
pub fn canonical_columns(labeled: bool) -> ColumnSpec {
    ColumnSpec {
        id_column: "id".into(),
        sloc_column: "sloc".into(),
        label_column: labeled.then(|| "label".into()),
        metric_columns: MetricColumns::AllRemaining,
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io {
                path: path.to_path_buf(),
                source: io,
            },
            _ => unreachable!(),
        },
        _ => Error::Csv {
            path: path.to_path_buf(),
            source: e,
        },
    }
}

fn parse_sloc(raw: &str) -> std::result::Result<u64, &'static str> {
    if let Ok(v) = raw.parse::<u64>() {
        return if v == 0 { Err("non-positive") } else { Ok(v) };
    }
    let v: f64 = raw.parse().map_err(|_| "non-numeric")?;
    if !v.is_finite() {
        return Err("non-numeric");
    }
    if v <= 0.0 {
        return Err("non-positive");
    }
    if v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err("non-integer");
    }
    Ok(v as u64)
}

fn parse_label(raw: &str) -> std::result::Result<bool, &'static str> {
    match raw.to_ascii_lowercase().as_str() {
        "true" => return Ok(true),
        "false" => return Ok(false),
        _ => {}
    }
    let v: f64 = raw.parse().map_err(|_| "unparseable")?;
    if !v.is_finite() {
        return Err("unparseable");
    }
    if v < 0.0 {
        return Err("negative bug-count");
    }
    Ok(v > 0.0)
}

/// Corpus admission thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterThresholds {
    /// Minimum number of modules per release.
    pub min_instances: usize,
    /// Minimum fraction of defective modules.
    pub min_defect_ratio: f64,
    /// Minimum absolute number of defective modules.
    pub min_defective: usize,
}

impl Default for FilterThresholds {
    fn default() -> Self {
        Self {
            min_instances: 100,
            min_defect_ratio: 0.05,
            min_defective: 10,
        }
    }
}

/// Why a release was excluded, alongside which one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedRelease {
    /// Release key of the excluded release.
    pub release: String,
    /// Human-readable reasons, one per violated threshold.
    pub reasons: Vec<String>,
}

/// Outcome of [`filter_corpus`]: admitted releases plus an exclusion report.
#[derive(Debug)]
pub struct FilterReport {
    /// Admitted releases, in input order.
    pub kept: Vec<ReleaseDataset>,
    /// Excluded releases with reasons, in input order.
    pub excluded: Vec<ExcludedRelease>,
}

/// Splits a corpus into releases that meet the admission thresholds and
/// releases that do not. Every release must be labeled. Order is preserved
/// and the operation is idempotent.
pub fn filter_corpus(
    releases: Vec<ReleaseDataset>,
    thresholds: &FilterThresholds,
) -> Result<FilterReport> {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for release in releases {
        let key = release.release_key();
        let n = release.defective_count().ok_or_else(|| {
            Error::data(format!("release {key} has no defect labels; cannot filter"))
        })?;
        let k = release.module_count();
        let ratio = n as f64 / k as f64;

        let mut reasons = Vec::new();
        if k < thresholds.min_instances {
            reasons.push(format!("instances {k} < {}", thresholds.min_instances));
        }
        if ratio < thresholds.min_defect_ratio {
            let mut r = String::new();
            let _ = write!(
                r,
                "defect ratio {ratio:.4} < {}",
                thresholds.min_defect_ratio
            );
            reasons.push(r);
        }
        if n < thresholds.min_defective {
            reasons.push(format!("defective {n} < {}", thresholds.min_defective));
        }

        if reasons.is_empty() {
            kept.push(release);
        } else {
            excluded.push(ExcludedRelease {
                release: key,
                reasons,
            });
        }
    }
    Ok(FilterReport { kept, excluded })
}

/// Z-scored metric matrix of a release.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedMetrics {
    /// Module ids, in dataset order.
    pub module_ids: Vec<String>,
    /// Names of the retained (non-constant) metric columns.
    pub metric_names: Vec<String>,
    /// One row per module, aligned with `module_ids`; one value per
    /// retained metric, aligned with `metric_names`.
    pub rows: Vec<Vec<f64>>,
    /// Names of dropped zero-variance columns.
    pub dropped: Vec<String>,
}

/// Z-scores every metric column (population standard deviation). Constant
/// columns carry no information and are dropped and reported; if every
/// column is constant the release has no usable metrics and that is an
/// error. Module order is preserved.
pub fn standardize_metrics(dataset: &ReleaseDataset) -> Result<StandardizedMetrics> {
    let k = dataset.module_count();
    if k < 2 {
        return Err(Error::data(format!(
            "release {} needs at least 2 modules to standardize metrics",
            dataset.release_key()
        )));
    }
    let names = dataset.metric_names();
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();

    for (j, name) in names.iter().enumerate() {
        let values: Vec<f64> = dataset.modules().iter().map(|m| m.metrics[j]).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min == max {
            dropped.push(name.to_string());
            continue;
        }
        let mean = values.iter().sum::<f64>() / k as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k as f64;
        let std = var.sqrt();
        columns.push(values.iter().map(|v| (v - mean) / std).collect());
        retained.push(name.to_string());
    }

    if retained.is_empty() {
        return Err(Error::data(format!(
            "release {} has no usable metrics (all columns constant)",
            dataset.release_key()
        )));
    }

    let rows = (0..k)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    Ok(StandardizedMetrics {
        module_ids: dataset.modules().iter().map(|m| m.id.clone()).collect(),
        metric_names: retained,
        rows,
        dropped,
    })
}
