//! Stable tabular contract for evaluation results.
//!
//! Every (model, release, budget) evaluation becomes one row with a fixed
//! column set, shared by the CSV and JSON writers and by downstream
//! plotting. Undefined indicator cells are empty in CSV and carry their
//! reasons aggregated in the trailing `undefined_reasons` column.

use crate::error::{Error, Result};
use crate::indicators::{IndicatorReport, IndicatorValue};

/// Column order of a results row. This is a compatibility contract:
/// append, never reorder.
pub const RESULTS_COLUMNS: [&str; 28] = [
    "model",
    "release",
    "budget_kind",
    "budget_fraction",
    "a",
    "x",
    "tp",
    "fp",
    "tn",
    "fn",
    "pii",
    "pci",
    "degenerate",
    "mcc",
    "roi",
    "eifa",
    "ifa_y",
    "pii_ifa",
    "pci_ifa",
    "recall",
    "precision",
    "pf",
    "f1",
    "g1",
    "recall_at_effort",
    "auc_loc_pd",
    "auc_pf_pd",
    "undefined_reasons",
];

/// Names accepted by [`indicator_value`] and the comparison commands.
pub const INDICATOR_NAMES: [&str; 16] = [
    "mcc",
    "roi",
    "eifa",
    "ifa_y",
    "pii_ifa",
    "pci_ifa",
    "pii",
    "pci",
    "recall",
    "precision",
    "pf",
    "f1",
    "g1",
    "recall_at_effort",
    "auc_loc_pd",
    "auc_pf_pd",
];

/// Shortest round-trip decimal form; empty for undefined cells.
pub fn cell(value: Option<f64>) -> String {
    match value {
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

/// Looks up one indicator of a report by column name.
///
/// `Ok(None)` means the indicator is undefined for this row; an unknown
/// name is an error listing the accepted names.
pub fn indicator_value(report: &IndicatorReport, name: &str) -> Result<Option<f64>> {
    let value = match name {
        "mcc" => Some(report.mcc),
        "roi" => report.roi.value(),
        "eifa" => Some(report.eifa.eifa),
        "ifa_y" => Some(report.eifa.y as f64),
        "pii_ifa" => Some(report.eifa.pii_ifa),
        "pci_ifa" => Some(report.eifa.pci_ifa),
        "pii" => Some(report.inspection.pii),
        "pci" => Some(report.inspection.pci),
        "recall" => report.classic.recall.value(),
        "precision" => report.classic.precision.value(),
        "pf" => report.classic.pf.value(),
        "f1" => report.classic.f1.value(),
        "g1" => report.classic.g1.value(),
        "recall_at_effort" => Some(report.recall_at_effort),
        "auc_loc_pd" => report.aucs.loc_pd.value(),
        "auc_pf_pd" => report.aucs.pf_pd.value(),
        _ => {
            return Err(Error::data(format!(
                "unknown indicator {name}; expected one of {}",
                INDICATOR_NAMES.join(", ")
            )))
        }
    };
    Ok(value)
}

/// Aggregates the undefined-value reasons of a row, in column order,
/// as `name=reason` pairs joined with `;`.
pub fn undefined_reasons(report: &IndicatorReport) -> String {
    let mut parts = Vec::new();
    if report.mcc_zero_marginal {
        parts.push("mcc=zero-marginal".to_string());
    }
    let tagged: [(&str, &IndicatorValue); 8] = [
        ("roi", &report.roi),
        ("recall", &report.classic.recall),
        ("precision", &report.classic.precision),
        ("pf", &report.classic.pf),
        ("f1", &report.classic.f1),
        ("g1", &report.classic.g1),
        ("auc_loc_pd", &report.aucs.loc_pd),
        ("auc_pf_pd", &report.aucs.pf_pd),
    ];
    for (name, value) in tagged {
        if let Some(reason) = value.reason() {
            parts.push(format!("{name}={reason}"));
        }
    }
    parts.join(";")
}

/// Renders a report as one CSV record in [`RESULTS_COLUMNS`] order.
pub fn csv_record(report: &IndicatorReport) -> Vec<String> {
    let insp = &report.inspection;
    vec![
        insp.model.clone(),
        insp.release.clone(),
        insp.budget.kind().to_string(),
        insp.budget.fraction().to_string(),
        report.a.to_string(),
        insp.x.to_string(),
        insp.confusion.true_pos.to_string(),
        insp.confusion.false_pos.to_string(),
        insp.confusion.true_neg.to_string(),
        insp.confusion.false_neg.to_string(),
        insp.pii.to_string(),
        insp.pci.to_string(),
        insp.degenerate.to_string(),
        report.mcc.to_string(),
        cell(report.roi.value()),
        report.eifa.eifa.to_string(),
        report.eifa.y.to_string(),
        report.eifa.pii_ifa.to_string(),
        report.eifa.pci_ifa.to_string(),
        cell(report.classic.recall.value()),
        cell(report.classic.precision.value()),
        cell(report.classic.pf.value()),
        cell(report.classic.f1.value()),
        cell(report.classic.g1.value()),
        report.recall_at_effort.to_string(),
        cell(report.aucs.loc_pd.value()),
        cell(report.aucs.pf_pd.value()),
        undefined_reasons(report),
    ]
}
