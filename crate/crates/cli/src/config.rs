//! Run configuration: the JSON file driving `evaluate` and `sweep`, plus the
//! hash that ties every output file back to the settings that produced it.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use matter_core::{ColumnSpec, EffortBudget, Error, FcmParams, OneConfig, Result, ScParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One release file in the corpus; `columns` falls back to the canonical
/// schema (`id`, `sloc`, `label`, metrics = all remaining columns).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    /// CSV path, resolved relative to the config file's directory.
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<ColumnSpec>,
}

/// The full run configuration, as read from `--config <json>` and then
/// adjusted by command-line overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Release files to load.
    pub corpus: Vec<CorpusEntry>,
    /// Model names: `one`, `manualdown`, `manualup`, `cla`, `fcm`, `sc`, or
    /// `external:<path>`.
    #[serde(default)]
    pub models: Vec<String>,
    /// Effort budgets to evaluate at.
    #[serde(default = "default_budgets")]
    pub budgets: Vec<EffortBudget>,
    /// Indicators that sweeps report.
    #[serde(default = "default_indicators")]
    pub indicators: Vec<String>,
    /// Seed for every stochastic model.
    #[serde(default)]
    pub seed: u64,
    /// Where result files go, resolved relative to the config file.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Model parameters keyed as `one.excluded`, `fcm.fuzzifier`, `fcm.tol`,
    /// `fcm.max_iter`, `sc.eig_tol`, `sc.max_eig_iter`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

fn default_budgets() -> Vec<EffortBudget> {
    vec![
        EffortBudget::new(matter_core::BudgetKind::Snm, 0.2).expect("valid default budget"),
        EffortBudget::new(matter_core::BudgetKind::Ssc, 0.2).expect("valid default budget"),
    ]
}

fn default_indicators() -> Vec<String> {
    ["mcc", "roi", "eifa"].map(String::from).to_vec()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("matter-out")
}

/// A parsed model name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    One,
    ManualDown,
    ManualUp,
    Cla,
    Fcm,
    Sc,
    /// Scores supplied by an external predictor; the path points at a single
    /// score file or at a directory of `<release_key>.csv` files.
    External(PathBuf),
}

/// A model as it appears in results: the literal config name plus its kind.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub kind: ModelKind,
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses a model name into its kind.
pub fn parse_model(name: &str) -> Result<ModelSpec> {
    let kind = match name {
        "one" => ModelKind::One,
        "manualdown" => ModelKind::ManualDown,
        "manualup" => ModelKind::ManualUp,
        "cla" => ModelKind::Cla,
        "fcm" => ModelKind::Fcm,
        "sc" => ModelKind::Sc,
        other => match other.strip_prefix("external:") {
            Some(path) if !path.is_empty() => ModelKind::External(PathBuf::from(path)),
            _ => {
                return Err(Error::data(format!(
                    "unknown model {name:?}; expected one, manualdown, manualup, cla, fcm, sc, \
                     or external:<path>"
                )))
            }
        },
    };
    Ok(ModelSpec {
        name: name.to_string(),
        kind,
    })
}

const PARAM_KEYS: [&str; 6] = [
    "one.excluded",
    "fcm.fuzzifier",
    "fcm.tol",
    "fcm.max_iter",
    "sc.eig_tol",
    "sc.max_eig_iter",
];

/// Model parameters assembled from the config's `params` table and seed.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub one: OneConfig,
    pub fcm: FcmParams,
    pub sc: ScParams,
}

impl RunConfig {
    /// Reads a config file and remembers its directory for path resolution.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::data(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::data(format!("invalid config {}: {e}", path.display())))?;
        let base = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((config, base))
    }

    /// Checks the invariants every run-driving command relies on.
    pub fn validate_for_run(&self) -> Result<()> {
        if self.corpus.is_empty() {
            return Err(Error::data("config lists no corpus releases"));
        }
        if self.models.is_empty() {
            return Err(Error::data("config lists no models"));
        }
        if self.budgets.is_empty() {
            return Err(Error::data("config lists no budgets"));
        }
        for name in &self.models {
            parse_model(name)?;
        }
        for indicator in &self.indicators {
            if !sweep_indicator_is_known(indicator) {
                return Err(Error::data(format!(
                    "unknown indicator {indicator:?}; expected one of {}, x, tp",
                    matter_core::report::INDICATOR_NAMES.join(", ")
                )));
            }
        }
        self.model_params()?;
        Ok(())
    }

    /// Builds the per-model parameter structs from the `params` table.
    pub fn model_params(&self) -> Result<ModelParams> {
        for key in self.params.keys() {
            if !PARAM_KEYS.contains(&key.as_str()) {
                return Err(Error::data(format!(
                    "unknown param key {key:?}; expected one of {}",
                    PARAM_KEYS.join(", ")
                )));
            }
        }
        let one = match self.params.get("one.excluded") {
            Some(&v) => OneConfig::new(v)?,
            None => OneConfig::default(),
        };
        let mut fcm = FcmParams {
            seed: self.seed,
            ..FcmParams::default()
        };
        if let Some(&v) = self.params.get("fcm.fuzzifier") {
            fcm.fuzzifier = v;
        }
        if let Some(&v) = self.params.get("fcm.tol") {
            fcm.tol = v;
        }
        if let Some(&v) = self.params.get("fcm.max_iter") {
            fcm.max_iter = param_count("fcm.max_iter", v)?;
        }
        let mut sc = ScParams {
            seed: self.seed,
            ..ScParams::default()
        };
        if let Some(&v) = self.params.get("sc.eig_tol") {
            sc.eig_tol = v;
        }
        if let Some(&v) = self.params.get("sc.max_eig_iter") {
            sc.max_eig_iter = param_count("sc.max_eig_iter", v)?;
        }
        Ok(ModelParams { one, fcm, sc })
    }

    /// SHA-256 over the effective config's canonical JSON form; every output
    /// file carries this so mixed-settings comparisons can be detected. The
    /// output directory does not shape results, so it is excluded: the same
    /// run written to two places stays comparable.
    pub fn hash(&self) -> String {
        let mut normalized = self.clone();
        normalized.output_dir = default_output_dir();
        let json = serde_json::to_string(&normalized).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            use fmt::Write;
            write!(out, "{byte:02x}").expect("hex write");
        }
        out
    }
}

fn param_count(key: &str, value: f64) -> Result<usize> {
    if !value.is_finite() || value < 1.0 || value.fract() != 0.0 || value > usize::MAX as f64 {
        return Err(Error::data(format!(
            "param {key} must be a positive integer, got {value}"
        )));
    }
    Ok(value as usize)
}

/// Indicator names a sweep may report: every report column indicator plus the
/// raw prefix counts `x` and `tp`.
pub fn sweep_indicator_is_known(name: &str) -> bool {
    name == "x" || name == "tp" || matter_core::report::INDICATOR_NAMES.contains(&name)
}

/// Resolves a config-file-relative path.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
