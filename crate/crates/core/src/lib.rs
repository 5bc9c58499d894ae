//! Core library of the MATTER framework: effort-aligned evaluation of
//! defect-prediction models against the size-based ONE baseline.
//!
//! The pipeline this crate supports is: load a release dataset
//! ([`ReleaseDataset`]), produce a defect-proneness [`Ranking`] (from the
//! built-in models in [`models`], from [`one::one_ranking`], or imported
//! from an external tool), cut it under an SQA-effort budget
//! ([`EffortBudget`]), compute the indicator set
//! ([`indicators::evaluate`]), and compare models across datasets with
//! rank statistics and Scott-Knott ESD grouping ([`stats`]).

pub mod dataset;
pub mod error;
pub mod indicators;
pub mod models;
pub mod one;
pub mod ranking;
pub mod report;
pub mod stats;

pub use dataset::{
    canonical_columns, filter_corpus, load_release, save_release, standardize_metrics, ColumnSpec,
    ExcludedRelease, FilterReport, FilterThresholds, MetricColumns, ModuleRecord, ReleaseDataset,
    StandardizedMetrics,
};
pub use error::{Error, ErrorKind, Result};
pub use indicators::{
    auc_curves, classic_set, eifa, evaluate, mcc, recall_at_effort, roi, AucCurves, ClassicSet,
    EifaBreakdown, EvalParams, IndicatorReport, IndicatorValue, RoiKind, UndefinedReason,
};
pub use models::{
    cla, fcm, manual_down, manual_up, spectral_cluster, Diagnostics, FcmParams, ModelOutput,
    ScParams,
};
pub use one::{one_classify, one_ranking, OneConfig};
pub use ranking::{
    cut_snm, cut_ssc, import_external_ranking, BudgetKind, ConfusionMatrix, EffortBudget,
    InspectionResult, Ranking,
};
pub use stats::{
    cliffs_delta, kendall, pairwise_delta_matrix, rank_transform, scott_knott_esd, spearman,
    CliffsDelta, Magnitude, PerformanceMatrix, Polarity, RankMatrix, SkEntry, SkGrouping,
    NEGLIGIBLE_DELTA,
};
