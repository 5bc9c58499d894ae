//! Result file writers and readers. Every file starts with a provenance
//! header (tool version, seed, config hash) so downstream comparisons can
//! refuse to mix results produced under different settings.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use matter_core::report::{csv_record, RESULTS_COLUMNS};
use matter_core::{Error, IndicatorReport, Result};
use serde::Serialize;

/// Provenance stamped onto every output file. Files derived from other
/// results (rather than from a run) carry no seed.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(seed: u64, config_hash: String) -> Self {
        Provenance {
            tool: format!("matter {}", env!("CARGO_PKG_VERSION")),
            seed: Some(seed),
            config_hash,
        }
    }

    /// Provenance for files computed from existing results files.
    pub fn derived(config_hash: String) -> Self {
        Provenance {
            tool: format!("matter {}", env!("CARGO_PKG_VERSION")),
            seed: None,
            config_hash,
        }
    }

    fn header_lines(&self) -> String {
        let mut lines = format!("# tool={}\n", self.tool);
        if let Some(seed) = self.seed {
            lines.push_str(&format!("# seed={seed}\n"));
        }
        lines.push_str(&format!("# config_hash={}\n", self.config_hash));
        lines
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = fs::File::create(path)
        .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(text.as_bytes())
        .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))
}

/// Renders CSV: provenance comments, then a header row, then records.
pub fn csv_text(
    provenance: &Provenance,
    header: &[&str],
    records: impl IntoIterator<Item = Vec<String>>,
) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory csv");
    for record in records {
        writer.write_record(&record).expect("in-memory csv");
    }
    let body = String::from_utf8(writer.into_inner().expect("in-memory csv"))
        .expect("csv output is utf-8");
    format!("{}{}", provenance.header_lines(), body)
}

/// Writes `results.csv`: one row per (model, release, budget).
pub fn write_results_csv(
    path: &Path,
    provenance: &Provenance,
    rows: &[IndicatorReport],
) -> Result<()> {
    let text = csv_text(provenance, &RESULTS_COLUMNS, rows.iter().map(csv_record));
    write_text(path, &text)
}

/// Writes `results.json`: provenance fields plus the full report rows.
pub fn write_results_json(
    path: &Path,
    provenance: &Provenance,
    rows: &[IndicatorReport],
) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a> {
        #[serde(flatten)]
        provenance: &'a Provenance,
        rows: &'a [IndicatorReport],
    }
    let doc = Doc { provenance, rows };
    let mut text = serde_json::to_string_pretty(&doc).expect("results serialize");
    text.push('\n');
    write_text(path, &text)
}

/// Writes any provenance-stamped JSON document.
pub fn write_json<T: Serialize>(path: &Path, provenance: &Provenance, value: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        #[serde(flatten)]
        provenance: &'a Provenance,
        #[serde(flatten)]
        value: &'a T,
    }
    let doc = Doc { provenance, value };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    write_text(path, &text)
}

/// One row read back from a results CSV.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub model: String,
    pub release: String,
    pub budget_kind: String,
    pub budget_fraction: f64,
    /// Numeric columns by name; empty cells are `None`.
    pub values: BTreeMap<String, Option<f64>>,
}

/// A parsed results file: its config hash and rows.
#[derive(Debug)]
pub struct ResultsFile {
    pub config_hash: String,
    pub rows: Vec<ResultRow>,
}

/// Reads a results CSV produced by `evaluate`, including its provenance.
pub fn read_results_csv(path: &Path) -> Result<ResultsFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::data(format!("cannot read results {}: {e}", path.display())))?;
    let display = path.display();

    let mut config_hash = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(hash) = comment.trim().strip_prefix("config_hash=") {
                config_hash = Some(hash.trim().to_string());
            }
            continue;
        }
        body.push_str(line);
        body.push('\n');
    }
    let config_hash = config_hash
        .ok_or_else(|| Error::data(format!("results {display} lacks a config_hash header")))?;

    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::data(format!("results {display}: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    for required in ["model", "release", "budget_kind", "budget_fraction"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::data(format!(
                "results {display} lacks the {required} column"
            )));
        }
    }

    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::data(format!("results {display}: {e}")))?;
        let field = |name: &str| -> &str {
            headers
                .iter()
                .position(|h| h == name)
                .and_then(|i| record.get(i))
                .unwrap_or("")
        };
        let budget_fraction: f64 = field("budget_fraction").parse().map_err(|_| {
            Error::data(format!(
                "results {display} row {}: budget_fraction {:?} is not a number",
                line + 1,
                field("budget_fraction")
            ))
        })?;
        let mut values = BTreeMap::new();
        for (name, cell) in headers.iter().zip(record.iter()) {
            if matches!(name.as_str(), "model" | "release" | "budget_kind") {
                continue;
            }
            let value = if cell.is_empty() {
                None
            } else {
                cell.parse::<f64>().ok()
            };
            values.insert(name.clone(), value);
        }
        rows.push(ResultRow {
            model: field("model").to_string(),
            release: field("release").to_string(),
            budget_kind: field("budget_kind").to_string(),
            budget_fraction,
            values,
        });
    }
    Ok(ResultsFile { config_hash, rows })
}
