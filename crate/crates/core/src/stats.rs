//! Cross-dataset statistical comparison.
//!
//! Models are first rank-transformed per dataset (1 = best, mid-ranks for
//! ties, undefined cells pushed to the worst rank), then grouped with a
//! non-parametric Scott-Knott ESD procedure that accepts a split only when
//! the pooled rank samples of the two sides differ by a non-negligible
//! Cliff's delta. Spearman and Kendall correlations support the
//! indicator-agreement analyses.

use serde::Serialize;

use crate::error::{Error, Result};

/// |δ| below this is a negligible effect; boundary of the smallest class.
pub const NEGLIGIBLE_DELTA: f64 = 0.147;

/// Direction in which an indicator improves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    HigherIsBetter,
    LowerIsBetter,
}

impl Polarity {
    /// Declared polarity of the built-in report indicators.
    pub fn for_indicator(name: &str) -> Option<Polarity> {
        match name {
            "mcc" | "roi" | "recall" | "precision" | "f1" | "g1" | "recall_at_effort"
            | "auc_loc_pd" | "auc_pf_pd" => Some(Polarity::HigherIsBetter),
            "eifa" | "pf" | "ifa_y" | "pii_ifa" | "pci_ifa" => Some(Polarity::LowerIsBetter),
            _ => None,
        }
    }
}

/// Model × dataset grid of indicator values for one indicator.
///
/// Undefined cells are allowed (`None`) and are ranked worst by the rank
/// transform rather than dropped, so a model that degenerates on a dataset
/// is penalized there instead of silently skipping the column.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    models: Vec<String>,
    datasets: Vec<String>,
    values: Vec<Vec<Option<f64>>>,
    polarity: Polarity,
}

impl PerformanceMatrix {
    /// Builds a matrix, checking grid dimensions and name uniqueness.
    ///
    /// `values` is indexed `[model][dataset]`; defined cells must be finite.
    pub fn new(
        models: Vec<String>,
        datasets: Vec<String>,
        values: Vec<Vec<Option<f64>>>,
        polarity: Polarity,
    ) -> Result<Self> {
        for (name, list) in [("model", &models), ("dataset", &datasets)] {
            let mut seen = std::collections::HashSet::new();
            for item in list {
                if !seen.insert(item.as_str()) {
                    return Err(Error::data(format!("duplicate {name} name: {item}")));
                }
            }
        }
        if values.len() != models.len() {
            return Err(Error::data(format!(
                "value grid has {} rows for {} models",
                values.len(),
                models.len()
            )));
        }
        for (m, row) in values.iter().enumerate() {
            if row.len() != datasets.len() {
                return Err(Error::data(format!(
                    "model {} has {} values for {} datasets",
                    models[m],
                    row.len(),
                    datasets.len()
                )));
            }
            if let Some(v) = row.iter().flatten().find(|v| !v.is_finite()) {
                return Err(Error::data(format!(
                    "model {} has a non-finite indicator value {v}",
                    models[m]
                )));
            }
        }
        Ok(Self {
            models,
            datasets,
            values,
            polarity,
        })
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn value(&self, model: usize, dataset: usize) -> Option<f64> {
        self.values[model][dataset]
    }
}

/// Per-dataset model ranks produced by [`rank_transform`].
#[derive(Debug, Clone, PartialEq)]
pub struct RankMatrix {
    models: Vec<String>,
    datasets: Vec<String>,
    /// `ranks[model][dataset]`, 1 = best, mid-ranks for ties.
    ranks: Vec<Vec<f64>>,
    /// `(model, dataset)` cells that were undefined and ranked worst.
    undefined_cells: Vec<(String, String)>,
}

impl RankMatrix {
    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    /// All per-dataset ranks of one model, in dataset order.
    pub fn model_sample(&self, model: usize) -> &[f64] {
        &self.ranks[model]
    }

    pub fn mean_rank(&self, model: usize) -> f64 {
        mean(&self.ranks[model])
    }

    pub fn undefined_cells(&self) -> &[(String, String)] {
        &self.undefined_cells
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Assigns mid-ranks (1 = first) to positions ordered by `ordered`,
/// where consecutive entries compare equal via `tied`.
fn mid_ranks_over(
    count: usize,
    ordered: &[usize],
    tied: impl Fn(usize, usize) -> bool,
) -> Vec<f64> {
    let mut ranks = vec![0.0; count];
    let mut start = 0;
    while start < ordered.len() {
        let mut end = start + 1;
        while end < ordered.len() && tied(ordered[end - 1], ordered[end]) {
            end += 1;
        }
        // Positions are 1-based; tied entries share the average position.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &ordered[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Ranks the models within every dataset column: 1 = best by the declared
/// polarity, ties get mid-ranks, undefined cells share the worst ranks and
/// are recorded in the result.
///
/// Requires at least two models and at least two defined values in every
/// dataset column (a column that cannot distinguish two models carries no
/// ranking information).
pub fn rank_transform(matrix: &PerformanceMatrix) -> Result<RankMatrix> {
    let m = matrix.models.len();
    if m < 2 {
        return Err(Error::data(format!(
            "rank transform needs at least 2 models, got {m}"
        )));
    }
    if matrix.datasets.is_empty() {
        return Err(Error::data(
            "rank transform needs at least 1 dataset".to_string(),
        ));
    }

    let mut ranks = vec![vec![0.0f64; matrix.datasets.len()]; m];
    let mut undefined_cells = Vec::new();
    for (d, dataset) in matrix.datasets.iter().enumerate() {
        let defined: Vec<usize> = (0..m).filter(|&i| matrix.values[i][d].is_some()).collect();
        if defined.len() < 2 {
            return Err(Error::data(format!(
                "dataset {dataset} has {} defined values; need at least 2",
                defined.len()
            )));
        }

        // Defined models first, best to worst; undefined models after them.
        let key = |i: usize| {
            let v = matrix.values[i][d].unwrap();
            match matrix.polarity {
                Polarity::HigherIsBetter => -v,
                Polarity::LowerIsBetter => v,
            }
        };
        let mut ordered = defined.clone();
        ordered.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
        let undefined: Vec<usize> = (0..m).filter(|&i| matrix.values[i][d].is_none()).collect();
        ordered.extend(&undefined);

        let tied = |a: usize, b: usize| match (matrix.values[a][d], matrix.values[b][d]) {
            (Some(x), Some(y)) => x == y,
            (None, None) => true,
            _ => false,
        };
        let column = mid_ranks_over(m, &ordered, tied);
        for i in 0..m {
            ranks[i][d] = column[i];
        }
        for &i in &undefined {
            undefined_cells.push((matrix.models[i].clone(), dataset.clone()));
        }
    }

    Ok(RankMatrix {
        models: matrix.models.clone(),
        datasets: matrix.datasets.clone(),
        ranks,
        undefined_cells,
    })
}

/// Effect-size class of a Cliff's delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    /// Classifies |δ| with boundaries 0.147 / 0.33 / 0.474.
    pub fn from_delta(delta: f64) -> Magnitude {
        let d = delta.abs();
        if d < NEGLIGIBLE_DELTA {
            Magnitude::Negligible
        } else if d < 0.33 {
            Magnitude::Small
        } else if d < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }
}

impl std::fmt::Display for Magnitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        };
        f.write_str(s)
    }
}

/// Cliff's delta with its magnitude class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CliffsDelta {
    pub delta: f64,
    pub magnitude: Magnitude,
}

/// Computes δ = (#{x>y} − #{x<y}) / (|xs|·|ys|) over all pairs.
///
/// Counts run in O((|xs|+|ys|) log |ys|) via a sorted copy of `ys`.
pub fn cliffs_delta(xs: &[f64], ys: &[f64]) -> Result<CliffsDelta> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::data(
            "cliffs delta needs two non-empty samples".to_string(),
        ));
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut greater = 0u64;
    let mut less = 0u64;
    for &x in xs {
        let below = sorted.partition_point(|&y| y < x);
        let not_above = sorted.partition_point(|&y| y <= x);
        greater += below as u64;
        less += (sorted.len() - not_above) as u64;
    }
    let pairs = (xs.len() as u64 * ys.len() as u64) as f64;
    let delta = (greater as f64 - less as f64) / pairs;
    Ok(CliffsDelta {
        delta,
        magnitude: Magnitude::from_delta(delta),
    })
}

/// Mid-ranks of a vector, 1 = smallest value.
fn ascending_mid_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    mid_ranks_over(xs.len(), &order, |a, b| xs[a] == xs[b])
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let mx = mean(xs);
    let my = mean(ys);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx).powi(2);
        vy += (y - my).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::data(
            "correlation undefined: a vector has zero variance".to_string(),
        ));
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}

fn check_paired(xs: &[f64], ys: &[f64], what: &str) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::data(format!(
            "{what} needs equal-length vectors, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::data(format!(
            "{what} needs at least 2 observations, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::data(format!("{what} requires finite values")));
    }
    Ok(())
}

/// Spearman rank correlation: Pearson correlation of the mid-rank vectors.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_paired(xs, ys, "spearman")?;
    pearson(&ascending_mid_ranks(xs), &ascending_mid_ranks(ys))
}

/// Kendall rank correlation, tau-b (tie-corrected).
pub fn kendall(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_paired(xs, ys, "kendall")?;
    let n = xs.len();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut ties_x = 0i64;
    let mut ties_y = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = xs[i] - xs[j];
            let dy = ys[i] - ys[j];
            if dx == 0.0 && dy == 0.0 {
                ties_x += 1;
                ties_y += 1;
            } else if dx == 0.0 {
                ties_x += 1;
            } else if dy == 0.0 {
                ties_y += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let den = ((n0 - ties_x) as f64 * (n0 - ties_y) as f64).sqrt();
    if den == 0.0 {
        return Err(Error::data(
            "correlation undefined: a vector has zero variance".to_string(),
        ));
    }
    Ok((concordant - discordant) as f64 / den)
}

/// One model's place in a Scott-Knott ESD grouping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkEntry {
    pub model: String,
    pub mean_rank: f64,
    /// 1 = best group; groups are contiguous in mean-rank order.
    pub group: usize,
}

/// Scott-Knott ESD grouping, entries ordered best-first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkGrouping {
    pub entries: Vec<SkEntry>,
}

impl SkGrouping {
    pub fn group_count(&self) -> usize {
        self.entries.last().map_or(0, |e| e.group)
    }

    pub fn group_of(&self, model: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.model == model)
            .map(|e| e.group)
    }
}

/// Split position (left length) maximizing the between-group sum of squares
/// of the models' mean ranks; first position wins ties.
fn best_split(means: &[f64]) -> usize {
    let total: f64 = means.iter().sum();
    let n = means.len() as f64;
    let grand = total / n;
    let mut best_pos = 1;
    let mut best_bss = f64::NEG_INFINITY;
    let mut left_sum = 0.0;
    for pos in 1..means.len() {
        left_sum += means[pos - 1];
        let nl = pos as f64;
        let nr = n - nl;
        let ml = left_sum / nl;
        let mr = (total - left_sum) / nr;
        let bss = nl * (ml - grand).powi(2) + nr * (mr - grand).powi(2);
        if bss > best_bss {
            best_bss = bss;
            best_pos = pos;
        }
    }
    best_pos
}

/// All per-dataset ranks of a set of models, pooled into one sample.
fn pooled_sample(ranks: &RankMatrix, models: &[usize]) -> Vec<f64> {
    models
        .iter()
        .flat_map(|&i| ranks.model_sample(i).iter().copied())
        .collect()
}

fn split_recursive(ordered: &[usize], ranks: &RankMatrix, groups: &mut Vec<Vec<usize>>) {
    if ordered.len() >= 2 {
        let means: Vec<f64> = ordered.iter().map(|&i| ranks.mean_rank(i)).collect();
        let pos = best_split(&means);
        let (left, right) = ordered.split_at(pos);
        let delta = cliffs_delta(&pooled_sample(ranks, left), &pooled_sample(ranks, right))
            .expect("pooled rank samples are non-empty");
        if delta.delta.abs() >= NEGLIGIBLE_DELTA {
            split_recursive(left, ranks, groups);
            split_recursive(right, ranks, groups);
            return;
        }
    }
    groups.push(ordered.to_vec());
}

/// Groups models by the non-parametric Scott-Knott ESD procedure.
///
/// Pipeline: rank-transform per dataset; order models by mean rank;
/// recursively bipartition at the split maximizing the between-group sum
/// of squares, accepting a split only when the two sides' pooled rank
/// samples differ with |δ| ≥ 0.147; finally merge adjacent groups that
/// still differ negligibly, so the grouping always satisfies the
/// adjacent-group effect-size guarantee end to end.
pub fn scott_knott_esd(matrix: &PerformanceMatrix) -> Result<SkGrouping> {
    if matrix.models().len() < 2 {
        return Err(Error::data(format!(
            "scott-knott needs at least 2 models, got {}",
            matrix.models().len()
        )));
    }
    if matrix.datasets().len() < 2 {
        return Err(Error::data(format!(
            "scott-knott needs at least 2 datasets, got {}",
            matrix.datasets().len()
        )));
    }
    let ranks = rank_transform(matrix)?;

    let mut ordered: Vec<usize> = (0..matrix.models().len()).collect();
    ordered.sort_by(|&a, &b| {
        ranks
            .mean_rank(a)
            .total_cmp(&ranks.mean_rank(b))
            .then_with(|| matrix.models()[a].cmp(&matrix.models()[b]))
    });

    let mut groups: Vec<Vec<usize>> = Vec::new();
    split_recursive(&ordered, &ranks, &mut groups);

    // Adjacent groups produced by different recursion branches were never
    // compared against each other; merge any adjacent pair that differs
    // only negligibly until the guarantee holds everywhere.
    loop {
        let mut merged_at = None;
        for g in 0..groups.len().saturating_sub(1) {
            let delta = cliffs_delta(
                &pooled_sample(&ranks, &groups[g]),
                &pooled_sample(&ranks, &groups[g + 1]),
            )
            .expect("pooled rank samples are non-empty");
            if delta.delta.abs() < NEGLIGIBLE_DELTA {
                merged_at = Some(g);
                break;
            }
        }
        match merged_at {
            Some(g) => {
                let tail = groups.remove(g + 1);
                groups[g].extend(tail);
            }
            None => break,
        }
    }

    let mut entries = Vec::with_capacity(matrix.models().len());
    for (number, group) in groups.iter().enumerate() {
        for &i in group {
            entries.push(SkEntry {
                model: matrix.models()[i].clone(),
                mean_rank: ranks.mean_rank(i),
                group: number + 1,
            });
        }
    }
    Ok(SkGrouping { entries })
}

/// Pairwise Cliff's delta between every pair of models' rank samples.
///
/// `result[i][j]` is δ(model i ranks, model j ranks); negative means model
/// i has the smaller (better) ranks. The diagonal is zero.
#[allow(clippy::needless_range_loop)] // symmetric writes to out[i][j] and out[j][i]
pub fn pairwise_delta_matrix(ranks: &RankMatrix) -> Vec<Vec<f64>> {
    let m = ranks.models().len();
    let mut out = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let delta = cliffs_delta(ranks.model_sample(i), ranks.model_sample(j))
                .expect("rank samples are non-empty")
                .delta;
            out[i][j] = delta;
            out[j][i] = -delta;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(
        models: &[&str],
        datasets: &[&str],
        values: Vec<Vec<Option<f64>>>,
        polarity: Polarity,
    ) -> PerformanceMatrix {
        PerformanceMatrix::new(
            models.iter().map(|s| s.to_string()).collect(),
            datasets.iter().map(|s| s.to_string()).collect(),
            values,
            polarity,
        )
        .unwrap()
    }

    #[test]
    fn ranks_give_mid_ranks_to_ties() {
        let m = matrix(
            &["a", "b", "c"],
            &["d1"],
            vec![vec![Some(0.3)], vec![Some(0.1)], vec![Some(0.3)]],
            Polarity::HigherIsBetter,
        );
        let r = rank_transform(&m).unwrap();
        assert_eq!(r.model_sample(0), [1.5]);
        assert_eq!(r.model_sample(1), [3.0]);
        assert_eq!(r.model_sample(2), [1.5]);
    }

    #[test]
    fn lower_is_better_polarity_flips_order() {
        let m = matrix(
            &["a", "b"],
            &["d1"],
            vec![vec![Some(0.0)], vec![Some(0.2)]],
            Polarity::LowerIsBetter,
        );
        let r = rank_transform(&m).unwrap();
        assert_eq!(r.model_sample(0), [1.0]);
        assert_eq!(r.model_sample(1), [2.0]);
    }

    #[test]
    fn undefined_cells_rank_worst_and_are_flagged() {
        let m = matrix(
            &["a", "b", "c"],
            &["d1"],
            vec![vec![Some(0.5)], vec![Some(0.2)], vec![None]],
            Polarity::HigherIsBetter,
        );
        let r = rank_transform(&m).unwrap();
        assert_eq!(r.model_sample(0), [1.0]);
        assert_eq!(r.model_sample(1), [2.0]);
        assert_eq!(r.model_sample(2), [3.0]);
        assert_eq!(r.undefined_cells(), [("c".to_string(), "d1".to_string())]);
    }

    #[test]
    fn each_column_must_have_two_defined_values() {
        let m = matrix(
            &["a", "b", "c"],
            &["d1"],
            vec![vec![Some(0.5)], vec![None], vec![None]],
            Polarity::HigherIsBetter,
        );
        let err = rank_transform(&m).unwrap_err();
        assert!(err.to_string().contains("defined values"));
    }

    #[test]
    fn column_ranks_always_sum_to_triangular_number() {
        let m = matrix(
            &["a", "b", "c", "d"],
            &["d1", "d2"],
            vec![
                vec![Some(0.5), Some(0.1)],
                vec![Some(0.5), Some(0.1)],
                vec![Some(0.2), None],
                vec![None, Some(0.3)],
            ],
            Polarity::HigherIsBetter,
        );
        let r = rank_transform(&m).unwrap();
        for d in 0..2 {
            let sum: f64 = (0..4).map(|i| r.model_sample(i)[d]).sum();
            assert_eq!(sum, 10.0);
        }
    }

    #[test]
    fn delta_of_identical_samples_is_zero() {
        let d = cliffs_delta(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.delta, 0.0);
        assert_eq!(d.magnitude, Magnitude::Negligible);
    }

    #[test]
    fn delta_balances_over_all_pairs() {
        // Pairs (2,1),(2,3),(2,1),(2,3): two greater, two less.
        let d = cliffs_delta(&[2.0, 2.0], &[1.0, 3.0]).unwrap();
        assert_eq!(d.delta, 0.0);
    }

    #[test]
    fn delta_is_antisymmetric() {
        let xs = [1.0, 4.0, 4.0, 2.0];
        let ys = [3.0, 3.0, 0.5];
        let a = cliffs_delta(&xs, &ys).unwrap().delta;
        let b = cliffs_delta(&ys, &xs).unwrap().delta;
        assert_eq!(a, -b);
    }

    #[test]
    fn magnitude_boundaries_are_inclusive_on_the_upper_class() {
        assert_eq!(Magnitude::from_delta(0.146), Magnitude::Negligible);
        assert_eq!(Magnitude::from_delta(0.147), Magnitude::Small);
        assert_eq!(Magnitude::from_delta(0.2), Magnitude::Small);
        assert_eq!(Magnitude::from_delta(0.33), Magnitude::Medium);
        assert_eq!(Magnitude::from_delta(0.474), Magnitude::Large);
        assert_eq!(Magnitude::from_delta(-1.0), Magnitude::Large);
    }

    #[test]
    fn correlations_on_identical_and_reversed_vectors() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(kendall(&xs, &xs).unwrap(), 1.0);
        assert!((spearman(&xs, &rev).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(kendall(&xs, &rev).unwrap(), -1.0);
    }

    #[test]
    fn kendall_counts_concordant_minus_discordant() {
        // Pairs of ([1,2,3], [2,1,3]): one discordant, two concordant.
        let tau = kendall(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]).unwrap();
        assert!((tau - 1.0 / 3.0).abs() < 1e-15);
        let rho = spearman(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]).unwrap();
        assert!((rho - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kendall_tau_b_corrects_for_ties() {
        // Concordant 2, discordant 0, one tie pair in x: 2/√((3−1)(3−0)).
        let tau = kendall(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((tau - 2.0 / 6.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_vectors_have_no_correlation() {
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(kendall(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0], &[2.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    fn columns(per_dataset: &[Vec<f64>]) -> Vec<Vec<Option<f64>>> {
        // Transpose dataset-major input into the model-major grid.
        let models = per_dataset[0].len();
        (0..models)
            .map(|m| per_dataset.iter().map(|col| Some(col[m])).collect())
            .collect()
    }

    #[test]
    fn consistent_winner_gets_its_own_group() {
        // Model a beats model b on every one of 30 datasets.
        let cols: Vec<Vec<f64>> = (0..30).map(|i| vec![0.9, 0.1 + i as f64 * 0.001]).collect();
        let names: Vec<String> = (0..30).map(|i| format!("d{i}")).collect();
        let m = PerformanceMatrix::new(
            vec!["a".into(), "b".into()],
            names,
            columns(&cols),
            Polarity::HigherIsBetter,
        )
        .unwrap();
        let g = scott_knott_esd(&m).unwrap();
        assert_eq!(g.group_of("a"), Some(1));
        assert_eq!(g.group_of("b"), Some(2));
        assert_eq!(g.group_count(), 2);
    }

    #[test]
    fn identical_models_share_a_group() {
        let cols: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, i as f64]).collect();
        let names: Vec<String> = (0..10).map(|i| format!("d{i}")).collect();
        let m = PerformanceMatrix::new(
            vec!["a".into(), "b".into()],
            names,
            columns(&cols),
            Polarity::HigherIsBetter,
        )
        .unwrap();
        let g = scott_knott_esd(&m).unwrap();
        assert_eq!(g.group_of("a"), Some(1));
        assert_eq!(g.group_of("b"), Some(1));
        assert_eq!(g.group_count(), 1);
    }

    #[test]
    fn interleaved_pair_beats_clear_loser() {
        // a and b trade places; c is always last.
        let cols: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                if i % 2 == 0 {
                    vec![0.9, 0.8, 0.1]
                } else {
                    vec![0.8, 0.9, 0.1]
                }
            })
            .collect();
        let names: Vec<String> = (0..10).map(|i| format!("d{i}")).collect();
        let m = PerformanceMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            names,
            columns(&cols),
            Polarity::HigherIsBetter,
        )
        .unwrap();
        let g = scott_knott_esd(&m).unwrap();
        assert_eq!(g.group_of("a"), Some(1));
        assert_eq!(g.group_of("b"), Some(1));
        assert_eq!(g.group_of("c"), Some(2));
    }

    #[test]
    fn grouping_is_contiguous_and_adjacent_groups_differ() {
        let cols: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                vec![
                    0.9 + (i % 3) as f64 * 0.01,
                    0.89 + ((i + 1) % 3) as f64 * 0.01,
                    0.5,
                    0.2 + (i % 2) as f64 * 0.02,
                ]
            })
            .collect();
        let names: Vec<String> = (0..12).map(|i| format!("d{i}")).collect();
        let m = PerformanceMatrix::new(
            vec!["a".into(), "b".into(), "c".into(), "e".into()],
            names,
            columns(&cols),
            Polarity::HigherIsBetter,
        )
        .unwrap();
        let g = scott_knott_esd(&m).unwrap();
        // Entries are best-first with non-decreasing mean ranks and group
        // numbers that only step by one.
        for w in g.entries.windows(2) {
            assert!(w[0].mean_rank <= w[1].mean_rank);
            assert!(w[1].group == w[0].group || w[1].group == w[0].group + 1);
        }
        assert_eq!(g.entries.first().unwrap().group, 1);
    }

    #[test]
    fn grouping_ignores_monotone_rescaling_of_one_dataset() {
        let cols: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![0.9, 0.5 + (i % 2) as f64 * 0.01, 0.1])
            .collect();
        let names: Vec<String> = (0..8).map(|i| format!("d{i}")).collect();
        let base = PerformanceMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            names.clone(),
            columns(&cols),
            Polarity::HigherIsBetter,
        )
        .unwrap();

        // Cube the third dataset's column: strictly monotone, ranks equal.
        let mut transformed = columns(&cols);
        for row in &mut transformed {
            row[2] = row[2].map(|v| v.powi(3));
        }
        let scaled = PerformanceMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            names,
            transformed,
            Polarity::HigherIsBetter,
        )
        .unwrap();

        assert_eq!(
            scott_knott_esd(&base).unwrap(),
            scott_knott_esd(&scaled).unwrap()
        );
    }

    #[test]
    fn pairwise_deltas_are_antisymmetric_with_zero_diagonal() {
        let cols: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![0.9, 0.5, 0.1 + i as f64 * 0.01])
            .collect();
        let names: Vec<String> = (0..6).map(|i| format!("d{i}")).collect();
        let m = PerformanceMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            names,
            columns(&cols),
            Polarity::HigherIsBetter,
        )
        .unwrap();
        let ranks = rank_transform(&m).unwrap();
        let deltas = pairwise_delta_matrix(&ranks);
        for (i, row) in deltas.iter().enumerate() {
            assert_eq!(row[i], 0.0);
            for (j, &value) in row.iter().enumerate() {
                assert_eq!(value, -deltas[j][i]);
            }
        }
        // a always rank 1, b always rank 2: every pair favors a.
        assert_eq!(deltas[0][1], -1.0);
    }

    #[test]
    fn scott_knott_input_requirements() {
        let one_model = PerformanceMatrix::new(
            vec!["a".into()],
            vec!["d1".into(), "d2".into()],
            vec![vec![Some(0.1), Some(0.2)]],
            Polarity::HigherIsBetter,
        )
        .unwrap();
        assert!(scott_knott_esd(&one_model).is_err());

        let one_dataset = PerformanceMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["d1".into()],
            vec![vec![Some(0.1)], vec![Some(0.2)]],
            Polarity::HigherIsBetter,
        )
        .unwrap();
        assert!(scott_knott_esd(&one_dataset).is_err());
    }

    #[test]
    fn matrix_construction_validates_shape() {
        assert!(PerformanceMatrix::new(
            vec!["a".into(), "a".into()],
            vec!["d".into()],
            vec![vec![Some(1.0)], vec![Some(2.0)]],
            Polarity::HigherIsBetter,
        )
        .is_err());
        assert!(PerformanceMatrix::new(
            vec!["a".into()],
            vec!["d".into()],
            vec![vec![Some(1.0), Some(2.0)]],
            Polarity::HigherIsBetter,
        )
        .is_err());
        assert!(PerformanceMatrix::new(
            vec!["a".into()],
            vec!["d".into()],
            vec![vec![Some(f64::NAN)]],
            Polarity::HigherIsBetter,
        )
        .is_err());
    }
}
