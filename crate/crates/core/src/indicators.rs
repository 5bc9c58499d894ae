//! Performance indicators over inspection cuts and full rankings.
//!
//! The core set is MCC (classification accuracy on the cut), ROI (defects
//! found per unit of inspection effort), and eIFA (effort wasted before
//! the first defective module). The extended set adds the classic
//! confusion-matrix rates and two ranking AUCs. Values that a degenerate
//! input leaves undefined are reported as typed reasons, never as NaN.

use serde::{Deserialize, Serialize};

use crate::dataset::ReleaseDataset;
use crate::error::{Error, Result};
use crate::ranking::{
    cut_snm, cut_ssc, BudgetKind, ConfusionMatrix, EffortBudget, InspectionResult, Ranking,
};

/// Why an indicator value is undefined on this input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedReason {
    /// A marginal sum of the confusion matrix is zero (MCC convention).
    ZeroMarginal,
    /// The budget admits no module (x = 0).
    EmptyPrefix,
    /// The release has no defective modules (n = 0).
    NoDefectiveModules,
    /// The release has no clean modules (n = k).
    NoCleanModules,
}

impl std::fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UndefinedReason::ZeroMarginal => "zero-marginal",
            UndefinedReason::EmptyPrefix => "empty-prefix",
            UndefinedReason::NoDefectiveModules => "no-defective-modules",
            UndefinedReason::NoCleanModules => "no-clean-modules",
        })
    }
}

/// An indicator value: a finite number, or a typed reason why none exists.
///
/// Serializes as a bare number when defined and as `{"reason": "..."}`
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndicatorValue {
    /// The indicator is defined and finite.
    Defined(f64),
    /// The indicator is undefined on this input.
    Undefined {
        /// Why no value exists.
        reason: UndefinedReason,
    },
}

impl IndicatorValue {
    /// Shorthand for an undefined value.
    pub fn undefined(reason: UndefinedReason) -> Self {
        IndicatorValue::Undefined { reason }
    }

    /// The numeric value, if defined.
    pub fn value(&self) -> Option<f64> {
        match self {
            IndicatorValue::Defined(v) => Some(*v),
            IndicatorValue::Undefined { .. } => None,
        }
    }

    /// The reason, if undefined.
    pub fn reason(&self) -> Option<UndefinedReason> {
        match self {
            IndicatorValue::Defined(_) => None,
            IndicatorValue::Undefined { reason } => Some(*reason),
        }
    }

    /// Whether a numeric value exists.
    pub fn is_defined(&self) -> bool {
        matches!(self, IndicatorValue::Defined(_))
    }
}

/// Matthews correlation coefficient of a confusion matrix.
///
/// When any of the four marginal sums is zero the coefficient has a 0/0
/// form; by convention this returns 0 (check
/// [`ConfusionMatrix::has_zero_marginal`] to tell the two apart).
pub fn mcc(cm: &ConfusionMatrix) -> f64 {
    if cm.has_zero_marginal() {
        return 0.0;
    }
    let tp = cm.true_pos as f64;
    let fp = cm.false_pos as f64;
    let tn = cm.true_neg as f64;
    let fn_ = cm.false_neg as f64;
    let num = tp * tn - fp * fn_;
    let den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    num / den
}

/// Which effort denominator ROI uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoiKind {
    /// Module-count budget: effort is the inspected code share (tp / pci).
    Snm,
    /// Code-size budget: effort is the inspected module share (tp / pii).
    Ssc,
    /// Explicit blend: effort is `a * pci + (1 - a) * pii`.
    General {
        /// Weight of the code share; must be in [0, 1].
        a: f64,
    },
}

/// Return on investment of an inspection cut: defective modules found per
/// unit of normalized inspection effort. An empty prefix has no effort to
/// normalize by, so the value is undefined.
pub fn roi(cm: &ConfusionMatrix, pii: f64, pci: f64, kind: RoiKind) -> Result<IndicatorValue> {
    for (name, v) in [("pii", pii), ("pci", pci)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::data(format!("{name} must be in [0, 1], got {v}")));
        }
    }
    let effort = match kind {
        RoiKind::Snm => pci,
        RoiKind::Ssc => pii,
        RoiKind::General { a } => {
            if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                return Err(Error::data(format!(
                    "roi weight a must be in [0, 1], got {a}"
                )));
            }
            a * pci + (1.0 - a) * pii
        }
    };
    if cm.predicted_positives() == 0 || effort == 0.0 {
        return Ok(IndicatorValue::undefined(UndefinedReason::EmptyPrefix));
    }
    Ok(IndicatorValue::Defined(cm.true_pos as f64 / effort))
}

/// eIFA and its two effort components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EifaBreakdown {
    /// Blended wasted effort before the first hit: `a * pii_ifa + (1 - a) * pci_ifa`.
    pub eifa: f64,
    /// Number of modules ranked strictly before the first defective one.
    #[serde(rename = "ifa_y")]
    pub y: usize,
    /// Share of modules inspected in vain, y / k.
    pub pii_ifa: f64,
    /// Share of code inspected in vain, SLOC of the first y modules / s.
    pub pci_ifa: f64,
}

/// Effort-aware initial false alarms: the normalized effort spent on the
/// modules ranked strictly before the first defective one. Independent of
/// any budget; 0 exactly when the top-ranked module is defective. Requires
/// at least one defective module.
pub fn eifa(ranking: &Ranking, dataset: &ReleaseDataset, a: f64) -> Result<EifaBreakdown> {
    crate::ranking::check_ranking_matches(ranking, dataset)?;
    if !a.is_finite() || !(0.0..=1.0).contains(&a) {
        return Err(Error::data(format!(
            "eifa weight a must be in [0, 1], got {a}"
        )));
    }
    let n = dataset.defective_count().ok_or_else(|| {
        Error::data(format!(
            "release {} has no defect labels; cannot compute eifa",
            dataset.release_key()
        ))
    })?;
    if n == 0 {
        return Err(Error::data(format!(
            "release {} has no defective modules; eifa is undefined",
            dataset.release_key()
        )));
    }

    let mut y = 0usize;
    let mut wasted_sloc = 0u64;
    for id in ranking.order() {
        let module = dataset.module_by_id(id).expect("validated coverage");
        if module.label == Some(true) {
            break;
        }
        y += 1;
        wasted_sloc += module.sloc;
    }

    let k = dataset.module_count() as f64;
    let s = dataset.total_sloc() as f64;
    let pii_ifa = y as f64 / k;
    let pci_ifa = wasted_sloc as f64 / s;
    Ok(EifaBreakdown {
        eifa: a * pii_ifa + (1.0 - a) * pci_ifa,
        y,
        pii_ifa,
        pci_ifa,
    })
}

/// The classic confusion-matrix rates of a cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicSet {
    /// tp / n.
    pub recall: IndicatorValue,
    /// tp / x.
    pub precision: IndicatorValue,
    /// False alarm rate, fp / (k - n).
    pub pf: IndicatorValue,
    /// Harmonic mean of recall and precision (0 when both are 0).
    pub f1: IndicatorValue,
    /// Harmonic mean of recall and 1 - pf (0 when both are 0).
    pub g1: IndicatorValue,
}

/// Computes recall, precision, pf, F1, and G1 from a confusion matrix,
/// with typed undefined reasons for the degenerate denominators.
pub fn classic_set(cm: &ConfusionMatrix) -> ClassicSet {
    let tp = cm.true_pos as f64;
    let recall = if cm.positives() == 0 {
        IndicatorValue::undefined(UndefinedReason::NoDefectiveModules)
    } else {
        IndicatorValue::Defined(tp / cm.positives() as f64)
    };
    let precision = if cm.predicted_positives() == 0 {
        IndicatorValue::undefined(UndefinedReason::EmptyPrefix)
    } else {
        IndicatorValue::Defined(tp / cm.predicted_positives() as f64)
    };
    let pf = if cm.negatives() == 0 {
        IndicatorValue::undefined(UndefinedReason::NoCleanModules)
    } else {
        IndicatorValue::Defined(cm.false_pos as f64 / cm.negatives() as f64)
    };

    let f1 = match (recall, precision) {
        (IndicatorValue::Defined(r), IndicatorValue::Defined(p)) => {
            IndicatorValue::Defined(harmonic(r, p))
        }
        (IndicatorValue::Undefined { reason }, _) => IndicatorValue::undefined(reason),
        (_, IndicatorValue::Undefined { reason }) => IndicatorValue::undefined(reason),
    };
    let g1 = match (recall, pf) {
        (IndicatorValue::Defined(r), IndicatorValue::Defined(pf)) => {
            IndicatorValue::Defined(harmonic(r, 1.0 - pf))
        }
        (IndicatorValue::Undefined { reason }, _) => IndicatorValue::undefined(reason),
        (_, IndicatorValue::Undefined { reason }) => IndicatorValue::undefined(reason),
    };

    ClassicSet {
        recall,
        precision,
        pf,
        f1,
        g1,
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Recall of the longest ranked prefix whose SLOC share stays within
/// `sloc_fraction` — the share of all defects found at that inspection
/// effort. A degenerate (empty) prefix finds nothing and yields 0.
pub fn recall_at_effort(
    ranking: &Ranking,
    dataset: &ReleaseDataset,
    sloc_fraction: f64,
) -> Result<f64> {
    let cut = cut_ssc(ranking, dataset, sloc_fraction)?;
    let n = cut.confusion.positives();
    if n == 0 {
        return Err(Error::data(format!(
            "release {} has no defective modules; recall is undefined",
            dataset.release_key()
        )));
    }
    Ok(cut.confusion.true_pos as f64 / n as f64)
}

/// Areas under the two ranking step curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AucCurves {
    /// Area under (inspected code share, recall), over all prefixes.
    #[serde(rename = "auc_loc_pd")]
    pub loc_pd: IndicatorValue,
    /// Area under (false alarm rate, recall), over all prefixes.
    #[serde(rename = "auc_pf_pd")]
    pub pf_pd: IndicatorValue,
}

/// Integrates the (pci, recall) and (pf, recall) curves over every prefix
/// length x = 0..=k by the trapezoidal rule. Each curve is undefined when
/// its axes are (no defective modules for recall, no clean modules for pf).
pub fn auc_curves(ranking: &Ranking, dataset: &ReleaseDataset) -> Result<AucCurves> {
    crate::ranking::check_ranking_matches(ranking, dataset)?;
    let n = dataset.defective_count().ok_or_else(|| {
        Error::data(format!(
            "release {} has no defect labels; cannot compute ranking curves",
            dataset.release_key()
        ))
    })?;
    let k = dataset.module_count();
    let clean = k - n;
    let s = dataset.total_sloc() as f64;

    if n == 0 {
        return Ok(AucCurves {
            loc_pd: IndicatorValue::undefined(UndefinedReason::NoDefectiveModules),
            pf_pd: IndicatorValue::undefined(UndefinedReason::NoDefectiveModules),
        });
    }

    let mut loc_points = Vec::with_capacity(k + 1);
    let mut pf_points = Vec::with_capacity(k + 1);
    let mut tp = 0usize;
    let mut cum_sloc = 0u64;
    loc_points.push((0.0, 0.0));
    pf_points.push((0.0, 0.0));
    for (i, id) in ranking.order().iter().enumerate() {
        let module = dataset.module_by_id(id).expect("validated coverage");
        cum_sloc += module.sloc;
        if module.label == Some(true) {
            tp += 1;
        }
        let recall = tp as f64 / n as f64;
        loc_points.push((cum_sloc as f64 / s, recall));
        if clean > 0 {
            let fp = (i + 1) - tp;
            pf_points.push((fp as f64 / clean as f64, recall));
        }
    }

    let loc_pd = IndicatorValue::Defined(trapezoid(&loc_points));
    let pf_pd = if clean == 0 {
        IndicatorValue::undefined(UndefinedReason::NoCleanModules)
    } else {
        IndicatorValue::Defined(trapezoid(&pf_points))
    };
    Ok(AucCurves { loc_pd, pf_pd })
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

/// Knobs of [`evaluate`] beyond the budget itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    /// Weight of the module-count share in eIFA.
    pub a: f64,
    /// SLOC fraction for `recall_at_effort`; defaults to the budget fraction.
    pub recall_effort_fraction: Option<f64>,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            a: 0.5,
            recall_effort_fraction: None,
        }
    }
}

/// Everything measured for one (model, release, budget) triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorReport {
    /// The cut this report was taken at.
    #[serde(flatten)]
    pub inspection: InspectionResult,
    /// eIFA blend weight used.
    pub a: f64,
    /// Matthews correlation coefficient of the cut (0 on zero marginals).
    pub mcc: f64,
    /// Whether the MCC value is the zero-marginal convention rather than a
    /// proper correlation.
    pub mcc_zero_marginal: bool,
    /// Return on investment of the cut.
    pub roi: IndicatorValue,
    /// eIFA with its components; budget-independent.
    #[serde(flatten)]
    pub eifa: EifaBreakdown,
    /// Classic confusion-matrix rates of the cut.
    #[serde(flatten)]
    pub classic: ClassicSet,
    /// Recall at the SLOC-share cut (budget-independent given the fraction).
    pub recall_at_effort: f64,
    /// Ranking curve areas; budget-independent.
    #[serde(flatten)]
    pub aucs: AucCurves,
}

impl IndicatorReport {
    /// Model that produced the evaluated ranking.
    pub fn model(&self) -> &str {
        &self.inspection.model
    }

    /// Release the evaluation ran on.
    pub fn release(&self) -> &str {
        &self.inspection.release
    }
}

/// Evaluates one ranking on one labeled release under one budget,
/// producing the full indicator report. Requires at least one defective
/// module (otherwise recall-family indicators and eIFA are all undefined
/// and the release carries no signal to evaluate against).
pub fn evaluate(
    ranking: &Ranking,
    dataset: &ReleaseDataset,
    budget: EffortBudget,
    params: &EvalParams,
) -> Result<IndicatorReport> {
    let inspection = match budget.kind() {
        BudgetKind::Snm => cut_snm(ranking, dataset, budget.fraction())?,
        BudgetKind::Ssc => cut_ssc(ranking, dataset, budget.fraction())?,
    };
    let cm = inspection.confusion;

    let mcc_value = mcc(&cm);
    let roi_kind = match budget.kind() {
        BudgetKind::Snm => RoiKind::Snm,
        BudgetKind::Ssc => RoiKind::Ssc,
    };
    let roi_value = roi(&cm, inspection.pii, inspection.pci, roi_kind)?;
    let eifa_value = eifa(ranking, dataset, params.a)?;
    let classic = classic_set(&cm);
    let fraction = params.recall_effort_fraction.unwrap_or(budget.fraction());
    let recall_at = recall_at_effort(ranking, dataset, fraction)?;
    let aucs = auc_curves(ranking, dataset)?;

    Ok(IndicatorReport {
        a: params.a,
        mcc: mcc_value,
        mcc_zero_marginal: cm.has_zero_marginal(),
        roi: roi_value,
        eifa: eifa_value,
        classic,
        recall_at_effort: recall_at,
        aucs,
        inspection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ModuleRecord, ReleaseDataset};

    fn cm(tp: usize, fp: usize, tn: usize, fn_: usize) -> ConfusionMatrix {
        ConfusionMatrix {
            true_pos: tp,
            false_pos: fp,
            true_neg: tn,
            false_neg: fn_,
        }
    }

    fn release(slocs: &[u64], labels: &[bool]) -> ReleaseDataset {
        let modules = slocs
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&sloc, &label))| ModuleRecord {
                id: format!("m{i:02}"),
                sloc,
                label: Some(label),
                metrics: Default::default(),
            })
            .collect();
        ReleaseDataset::new("rel", "", modules).unwrap()
    }

    fn identity_ranking(ds: &ReleaseDataset) -> Ranking {
        let order = ds.modules().iter().map(|m| m.id.clone()).collect();
        Ranking::from_order(ds, "test", order).unwrap()
    }

    #[test]
    fn mcc_matches_the_direct_formula() {
        let v = mcc(&cm(3, 1, 4, 2));
        assert!((v - 10.0 / 600f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mcc_is_zero_on_zero_marginals() {
        let empty_prefix = cm(0, 0, 4, 2);
        assert!(empty_prefix.has_zero_marginal());
        assert_eq!(mcc(&empty_prefix), 0.0);
        let no_defectives = cm(0, 3, 4, 0);
        assert_eq!(mcc(&no_defectives), 0.0);
    }

    #[test]
    fn mcc_hits_the_extremes_on_perfect_and_inverted_cuts() {
        assert_eq!(mcc(&cm(3, 0, 4, 0)), 1.0);
        assert_eq!(mcc(&cm(0, 4, 0, 3)), -1.0);
    }

    #[test]
    fn roi_uses_the_budget_matched_denominator() {
        let c = cm(4, 1, 3, 2);
        let snm = roi(&c, 0.5, 0.2, RoiKind::Snm).unwrap();
        assert_eq!(snm.value(), Some(20.0));
        let ssc = roi(&c, 0.1, 0.5, RoiKind::Ssc).unwrap();
        assert_eq!(ssc.value(), Some(40.0));
        let general = roi(&c, 0.1, 0.2, RoiKind::General { a: 0.5 }).unwrap();
        assert!((general.value().unwrap() - 4.0 / 0.15).abs() < 1e-12);
    }

    #[test]
    fn roi_is_undefined_on_an_empty_prefix() {
        let c = cm(0, 0, 5, 3);
        let v = roi(&c, 0.0, 0.0, RoiKind::Snm).unwrap();
        assert_eq!(v.reason(), Some(UndefinedReason::EmptyPrefix));
    }

    #[test]
    fn roi_validates_its_weight_and_shares() {
        let c = cm(1, 1, 1, 1);
        assert!(roi(&c, 0.5, 0.5, RoiKind::General { a: 1.5 }).is_err());
        assert!(roi(&c, -0.1, 0.5, RoiKind::Snm).is_err());
        assert!(roi(&c, 0.5, f64::NAN, RoiKind::Snm).is_err());
    }

    #[test]
    fn eifa_blends_both_wasted_shares() {
        // First defective at rank 2; the rank-1 module holds 40 of 100 SLOC.
        let ds = release(&[40, 30, 20, 10], &[false, true, false, true]);
        let r = identity_ranking(&ds);
        let b = eifa(&r, &ds, 0.5).unwrap();
        assert_eq!(b.y, 1);
        assert_eq!(b.pii_ifa, 0.25);
        assert_eq!(b.pci_ifa, 0.40);
        assert!((b.eifa - 0.325).abs() < 1e-15);
    }

    #[test]
    fn eifa_is_zero_exactly_when_the_top_module_is_defective() {
        let ds = release(&[40, 30, 20, 10], &[true, false, false, false]);
        let r = identity_ranking(&ds);
        let b = eifa(&r, &ds, 0.5).unwrap();
        assert_eq!(b.y, 0);
        assert_eq!(b.eifa, 0.0);
    }

    #[test]
    fn eifa_requires_a_defective_module() {
        let ds = release(&[10, 10], &[false, false]);
        let r = identity_ranking(&ds);
        let err = eifa(&r, &ds, 0.5).unwrap_err();
        assert!(err.to_string().contains("no defective modules"));
    }

    #[test]
    fn classic_set_matches_hand_computed_rates() {
        // k = 10, n = 5: tp = 3, fp = 1, tn = 4, fn = 2.
        let set = classic_set(&cm(3, 1, 4, 2));
        assert_eq!(set.recall.value(), Some(0.6));
        assert_eq!(set.precision.value(), Some(0.75));
        assert_eq!(set.pf.value(), Some(0.2));
        let f1 = set.f1.value().unwrap();
        assert!((f1 - 2.0 * 0.6 * 0.75 / 1.35).abs() < 1e-15);
        let g1 = set.g1.value().unwrap();
        assert!((g1 - 2.0 * 0.6 * 0.8 / 1.4).abs() < 1e-15);
    }

    #[test]
    fn classic_set_conventions_and_reasons() {
        // tp = 0 with a non-empty prefix: recall, precision, f1 all 0.
        let set = classic_set(&cm(0, 2, 3, 5));
        assert_eq!(set.recall.value(), Some(0.0));
        assert_eq!(set.precision.value(), Some(0.0));
        assert_eq!(set.f1.value(), Some(0.0));

        // Empty prefix: precision and f1 undefined, recall defined.
        let set = classic_set(&cm(0, 0, 3, 5));
        assert_eq!(set.recall.value(), Some(0.0));
        assert_eq!(set.precision.reason(), Some(UndefinedReason::EmptyPrefix));
        assert_eq!(set.f1.reason(), Some(UndefinedReason::EmptyPrefix));

        // No defectives: recall, f1, g1 undefined.
        let set = classic_set(&cm(0, 2, 3, 0));
        assert_eq!(
            set.recall.reason(),
            Some(UndefinedReason::NoDefectiveModules)
        );
        assert_eq!(set.f1.reason(), Some(UndefinedReason::NoDefectiveModules));
        assert_eq!(set.g1.reason(), Some(UndefinedReason::NoDefectiveModules));

        // All defective: pf and g1 undefined.
        let set = classic_set(&cm(2, 0, 0, 3));
        assert_eq!(set.pf.reason(), Some(UndefinedReason::NoCleanModules));
        assert_eq!(set.g1.reason(), Some(UndefinedReason::NoCleanModules));
    }

    #[test]
    fn recall_at_effort_counts_hits_within_the_sloc_budget() {
        let ds = release(&[20, 20, 60], &[true, false, true]);
        let r = identity_ranking(&ds);
        let v = recall_at_effort(&r, &ds, 0.2).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn recall_at_effort_is_zero_on_a_degenerate_prefix() {
        let ds = release(&[90, 5, 5], &[false, true, false]);
        let r = identity_ranking(&ds);
        let v = recall_at_effort(&r, &ds, 0.2).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn auc_curves_match_the_trapezoid_by_hand() {
        let ds = release(&[25, 25, 25, 25], &[true, false, true, false]);
        let r = identity_ranking(&ds);
        let curves = auc_curves(&r, &ds).unwrap();
        assert!((curves.loc_pd.value().unwrap() - 0.625).abs() < 1e-15);
        assert!((curves.pf_pd.value().unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn auc_pf_pd_is_one_for_a_perfect_ranking_and_zero_for_the_worst() {
        let perfect = release(&[10; 4], &[true, true, false, false]);
        let r = identity_ranking(&perfect);
        assert_eq!(auc_curves(&r, &perfect).unwrap().pf_pd.value(), Some(1.0));

        let worst = release(&[10; 4], &[false, false, true, true]);
        let r = identity_ranking(&worst);
        assert_eq!(auc_curves(&r, &worst).unwrap().pf_pd.value(), Some(0.0));
    }

    #[test]
    fn auc_curves_report_their_degenerate_axes() {
        let no_defects = release(&[10, 10], &[false, false]);
        let r = identity_ranking(&no_defects);
        let curves = auc_curves(&r, &no_defects).unwrap();
        assert_eq!(
            curves.loc_pd.reason(),
            Some(UndefinedReason::NoDefectiveModules)
        );
        assert_eq!(
            curves.pf_pd.reason(),
            Some(UndefinedReason::NoDefectiveModules)
        );

        let all_defective = release(&[10, 10], &[true, true]);
        let r = identity_ranking(&all_defective);
        let curves = auc_curves(&r, &all_defective).unwrap();
        assert!(curves.loc_pd.is_defined());
        assert_eq!(curves.pf_pd.reason(), Some(UndefinedReason::NoCleanModules));
    }

    #[test]
    fn evaluate_assembles_a_consistent_report() {
        let ds = release(&[50, 30, 20], &[true, false, true]);
        let r = identity_ranking(&ds);
        let budget = EffortBudget::new(BudgetKind::Snm, 0.34).unwrap();
        let report = evaluate(&r, &ds, budget, &EvalParams::default()).unwrap();
        assert_eq!(report.model(), "test");
        assert_eq!(report.release(), "rel");
        assert_eq!(report.inspection.x, 1);
        assert_eq!(report.eifa.y, 0);
        assert_eq!(report.classic.recall.value(), Some(0.5));
        // ROI under SNM divides by the inspected code share (0.5).
        assert_eq!(report.roi.value(), Some(2.0));
        assert!(!report.mcc_zero_marginal);
    }

    #[test]
    fn evaluate_flags_degenerate_cuts_but_still_reports() {
        let ds = release(&[90, 5, 5], &[false, true, false]);
        let r = identity_ranking(&ds);
        let budget = EffortBudget::new(BudgetKind::Ssc, 0.2).unwrap();
        let report = evaluate(&r, &ds, budget, &EvalParams::default()).unwrap();
        assert!(report.inspection.degenerate);
        assert_eq!(report.mcc, 0.0);
        assert!(report.mcc_zero_marginal);
        assert_eq!(report.roi.reason(), Some(UndefinedReason::EmptyPrefix));
        // eIFA does not depend on the budget and stays defined.
        assert_eq!(report.eifa.y, 1);
    }

    #[test]
    fn evaluate_rejects_releases_without_defects() {
        let ds = release(&[10, 10], &[false, false]);
        let r = identity_ranking(&ds);
        let budget = EffortBudget::new(BudgetKind::Snm, 0.5).unwrap();
        assert!(evaluate(&r, &ds, budget, &EvalParams::default()).is_err());
    }

    #[test]
    fn indicator_value_serializes_as_number_or_reason() {
        let defined = serde_json::to_string(&IndicatorValue::Defined(0.5)).unwrap();
        assert_eq!(defined, "0.5");
        let undefined =
            serde_json::to_string(&IndicatorValue::undefined(UndefinedReason::EmptyPrefix))
                .unwrap();
        assert_eq!(undefined, "{\"reason\":\"empty-prefix\"}");
        let back: IndicatorValue = serde_json::from_str("0.5").unwrap();
        assert_eq!(back, IndicatorValue::Defined(0.5));
        let back: IndicatorValue = serde_json::from_str("{\"reason\":\"empty-prefix\"}").unwrap();
        assert_eq!(back.reason(), Some(UndefinedReason::EmptyPrefix));
    }
}
