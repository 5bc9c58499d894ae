//! Property suites over randomized releases, rankings, and samples.

use proptest::prelude::*;

use matter_core::{
    cliffs_delta, cut_snm, cut_ssc, eifa, evaluate, kendall, manual_down, mcc, one_ranking,
    rank_transform, scott_knott_esd, spearman, standardize_metrics, BudgetKind, ConfusionMatrix,
    EffortBudget, EvalParams, Magnitude, ModuleRecord, OneConfig, PerformanceMatrix, Polarity,
    Ranking, ReleaseDataset, NEGLIGIBLE_DELTA,
};
use matter_testkit::oracle;

fn build_release(slocs: Vec<u64>, labels: Vec<bool>, metrics: usize) -> ReleaseDataset {
    let modules = slocs
        .iter()
        .zip(&labels)
        .enumerate()
        .map(|(i, (&sloc, &label))| ModuleRecord {
            id: format!("m{i:03}"),
            sloc,
            label: Some(label),
            metrics: (0..metrics)
                .map(|m| (format!("metric{m}"), ((i * 31 + m * 17) % 97) as f64))
                .collect(),
        })
        .collect();
    ReleaseDataset::new("prop", "", modules).unwrap()
}

/// Random labeled release; `mixed` forces ≥1 defective and ≥1 clean.
fn release(max_k: usize, mixed: bool) -> BoxedStrategy<ReleaseDataset> {
    (2usize..=max_k)
        .prop_flat_map(|k| {
            (
                proptest::collection::vec(1u64..=1000, k),
                proptest::collection::vec(any::<bool>(), k),
            )
        })
        .prop_map(move |(slocs, mut labels)| {
            if mixed {
                labels[0] = true;
                let last = labels.len() - 1;
                labels[last] = false;
            }
            build_release(slocs, labels, 0)
        })
        .boxed()
}

/// Random release plus a uniformly random permutation ranking of it.
fn ranked_release(max_k: usize, mixed: bool) -> BoxedStrategy<(ReleaseDataset, Ranking)> {
    release(max_k, mixed)
        .prop_flat_map(|ds| {
            let ids: Vec<String> = ds.modules().iter().map(|m| m.id.clone()).collect();
            (Just(ds), Just(ids).prop_shuffle())
        })
        .prop_map(|(ds, order)| {
            let ranking = Ranking::from_order(&ds, "random", order).unwrap();
            (ds, ranking)
        })
        .boxed()
}

fn fraction() -> BoxedStrategy<f64> {
    prop_oneof![Just(0.2), Just(0.5), Just(1.0), Just(0.01), 0.001f64..=1.0,].boxed()
}

/// Labels and slocs of a ranking's modules, in rank order.
fn rank_order_view(ds: &ReleaseDataset, ranking: &Ranking) -> (Vec<bool>, Vec<u64>) {
    ranking
        .order()
        .iter()
        .map(|id| {
            let m = ds.module_by_id(id).unwrap();
            (m.label.unwrap(), m.sloc)
        })
        .unzip()
}

fn scaled(ds: &ReleaseDataset, factor: u64) -> ReleaseDataset {
    let modules = ds
        .modules()
        .iter()
        .map(|m| ModuleRecord {
            sloc: m.sloc * factor,
            ..m.clone()
        })
        .collect();
    ReleaseDataset::new("prop", "", modules).unwrap()
}

proptest! {
    #[test]
    fn snm_cut_respects_and_maximizes_the_budget(
        (ds, ranking) in ranked_release(40, false),
        f in fraction(),
    ) {
        let cut = cut_snm(&ranking, &ds, f).unwrap();
        let k = ds.module_count();
        prop_assert!(cut.pii <= f);
        prop_assert_eq!(cut.pii, cut.x as f64 / k as f64);
        // Maximality: one more module would exceed the budget.
        prop_assert!(cut.x == k || (cut.x + 1) as f64 / k as f64 > f);
        prop_assert_eq!(cut.x, oracle::snm_prefix_len(k, f));
        prop_assert_eq!(cut.degenerate, cut.x == 0);
    }

    #[test]
    fn ssc_cut_respects_and_maximizes_the_budget(
        (ds, ranking) in ranked_release(40, false),
        f in fraction(),
    ) {
        let cut = cut_ssc(&ranking, &ds, f).unwrap();
        let (_, slocs) = rank_order_view(&ds, &ranking);
        let s: u64 = slocs.iter().sum();
        prop_assert!(cut.pci <= f);
        let prefix: u64 = slocs[..cut.x].iter().sum();
        prop_assert_eq!(cut.pci, prefix as f64 / s as f64);
        prop_assert!(
            cut.x == slocs.len()
                || (prefix + slocs[cut.x]) as f64 / s as f64 > f
        );
        prop_assert_eq!(cut.x, oracle::ssc_prefix_len(&slocs, f));
    }

    #[test]
    fn cuts_are_monotone_in_the_fraction(
        (ds, ranking) in ranked_release(30, false),
        f1 in 0.001f64..=1.0,
        f2 in 0.001f64..=1.0,
    ) {
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        for kind in [BudgetKind::Snm, BudgetKind::Ssc] {
            let cut_at = |f| match kind {
                BudgetKind::Snm => cut_snm(&ranking, &ds, f).unwrap(),
                BudgetKind::Ssc => cut_ssc(&ranking, &ds, f).unwrap(),
            };
            let a = cut_at(lo);
            let b = cut_at(hi);
            prop_assert!(a.x <= b.x);
            prop_assert!(a.confusion.true_pos <= b.confusion.true_pos);
            prop_assert!(a.pii <= b.pii);
            prop_assert!(a.pci <= b.pci);
        }
    }

    #[test]
    fn confusion_identities_hold_for_every_prefix(
        (ds, ranking) in ranked_release(20, false),
    ) {
        let (labels, _) = rank_order_view(&ds, &ranking);
        let k = ds.module_count();
        let n = ds.defective_count().unwrap();
        for x in 0..=k {
            // Reconstruct through an SNM cut at the exact count fraction;
            // the empty prefix needs a sub-1/k fraction since 0 is not a
            // valid budget.
            let f = if x == 0 { 0.5 / k as f64 } else { x as f64 / k as f64 };
            let cut = cut_snm(&ranking, &ds, f).unwrap();
            prop_assert_eq!(cut.x, x);
            let cm = cut.confusion;
            prop_assert_eq!(cm.true_pos + cm.false_pos, x);
            prop_assert_eq!(cm.total(), k);
            prop_assert_eq!(cm.true_pos + cm.false_neg, n);
            let (tp, fp, tn, fn_) = oracle::prefix_confusion(&labels, x);
            prop_assert_eq!((cm.true_pos, cm.false_pos, cm.true_neg, cm.false_neg),
                            (tp, fp, tn, fn_));
        }
    }

    #[test]
    fn uniform_sloc_scaling_changes_nothing(
        (ds, ranking) in ranked_release(25, true),
        f in fraction(),
        factor in 1u64..=16,
    ) {
        let big = scaled(&ds, factor);
        let ranking_big =
            Ranking::from_order(&big, "random", ranking.order().to_vec()).unwrap();
        let a = cut_ssc(&ranking, &ds, f).unwrap();
        let b = cut_ssc(&ranking_big, &big, f).unwrap();
        prop_assert_eq!(a.x, b.x);
        prop_assert_eq!(a.pci, b.pci);
        let a_snm = cut_snm(&ranking, &ds, f).unwrap();
        let b_snm = cut_snm(&ranking_big, &big, f).unwrap();
        prop_assert_eq!(a_snm.x, b_snm.x);
        prop_assert_eq!(a_snm.pci, b_snm.pci);

        // Whole reports agree as well (ROI, recall@effort, AUC over loc).
        let budget = EffortBudget::new(BudgetKind::Ssc, f).unwrap();
        let ra = evaluate(&ranking, &ds, budget, &EvalParams::default()).unwrap();
        let rb = evaluate(&ranking_big, &big, budget, &EvalParams::default()).unwrap();
        prop_assert_eq!(ra.roi, rb.roi);
        prop_assert_eq!(ra.recall_at_effort, rb.recall_at_effort);
        prop_assert_eq!(ra.eifa, rb.eifa);
        prop_assert_eq!(ra.aucs, rb.aucs);
    }
}

proptest! {
    #[test]
    fn one_ranking_structure_invariants(
        ds in release(40, false),
        excluded in prop_oneof![Just(0.0), Just(0.2), 0.0f64..0.99],
    ) {
        let config = OneConfig::new(excluded).unwrap();
        let ranking = one_ranking(&ds, &config);
        let k = ds.module_count();

        // Permutation of the release.
        let mut seen: Vec<&str> = ranking.order().iter().map(|s| s.as_str()).collect();
        seen.sort_unstable();
        let mut expected: Vec<&str> = ds.modules().iter().map(|m| m.id.as_str()).collect();
        expected.sort_unstable();
        prop_assert_eq!(seen, expected);

        // Scores strictly decreasing.
        for w in ranking.scores().windows(2) {
            prop_assert!(w[0] > w[1]);
        }

        let slocs: Vec<u64> = ranking
            .order()
            .iter()
            .map(|id| ds.module_by_id(id).unwrap().sloc)
            .collect();
        let s: u64 = slocs.iter().sum();

        // The deferred set E is a suffix, ascending by sloc; the head R is
        // descending. Find the boundary: E size = number of largest
        // modules (in global descending order) fitting the budget.
        let mut desc: Vec<u64> = slocs.clone();
        desc.sort_unstable_by(|a, b| b.cmp(a));
        let mut e_len = 0;
        let mut cum = 0u64;
        while e_len < k {
            let next = cum + desc[e_len];
            if next as f64 / s as f64 <= excluded {
                cum = next;
                e_len += 1;
            } else {
                break;
            }
        }
        let r = &slocs[..k - e_len];
        let e = &slocs[k - e_len..];
        for w in r.windows(2) {
            prop_assert!(w[0] >= w[1], "head must be descending");
        }
        for w in e.windows(2) {
            prop_assert!(w[0] <= w[1], "deferred tail must be ascending");
        }
        // Budget and maximality of E.
        let e_sum: u64 = e.iter().sum();
        prop_assert!(e_sum as f64 / s as f64 <= excluded);
        if e_len < k {
            let next_largest = r.iter().copied().max().unwrap();
            prop_assert!((e_sum + next_largest) as f64 / s as f64 > excluded);
            // Every member of E is at least as large as everything in R.
            if e_len > 0 {
                prop_assert!(e.iter().min().unwrap() >= r.iter().max().unwrap());
            }
        }
    }

    #[test]
    fn one_with_zero_exclusion_is_manual_down(ds in release(30, false)) {
        let one = one_ranking(&ds, &OneConfig::new(0.0).unwrap());
        let down = manual_down(&ds).ranking;
        prop_assert_eq!(one.order(), down.order());
    }

    #[test]
    fn one_is_invariant_under_sloc_scaling(
        ds in release(30, false),
        excluded in 0.0f64..0.99,
        factor in 1u64..=16,
    ) {
        let config = OneConfig::new(excluded).unwrap();
        let a = one_ranking(&ds, &config);
        let b = one_ranking(&scaled(&ds, factor), &config);
        prop_assert_eq!(a.order(), b.order());
    }
}

fn confusion(tp: usize, fp: usize, tn: usize, fn_: usize) -> ConfusionMatrix {
    ConfusionMatrix {
        true_pos: tp,
        false_pos: fp,
        true_neg: tn,
        false_neg: fn_,
    }
}

proptest! {
    #[test]
    fn mcc_range_and_symmetries(
        tp in 0usize..30, fp in 0usize..30, tn in 0usize..30, fn_ in 0usize..30,
    ) {
        let value = mcc(&confusion(tp, fp, tn, fn_));
        prop_assert!((-1.0..=1.0).contains(&value));
        // Swapping the classes preserves MCC; relabeling predictions
        // negates it.
        let swapped = mcc(&confusion(tn, fn_, tp, fp));
        prop_assert!((value - swapped).abs() < 1e-12);
        let relabeled = mcc(&confusion(fp, tp, fn_, tn));
        prop_assert!((value + relabeled).abs() < 1e-12);
        prop_assert_eq!(value, oracle::mcc_direct(tp, fp, tn, fn_));
    }

    /// With x, n, k fixed, all cut indicators move with tp in lockstep.
    #[test]
    fn snm_indicators_agree_in_sign(
        k in 2usize..40,
        seeds in proptest::collection::vec(0usize..1_000_000, 3),
    ) {
        let n = 1 + seeds[0] % (k - 1); // 1..k-1, so no zero marginals
        let x = 1 + seeds[1] % (k - 1);
        let tp_lo = x.saturating_sub(k - n);
        let tp_hi = x.min(n);
        let tp1 = tp_lo + seeds[2] % (tp_hi - tp_lo + 1);
        let tp2 = tp_lo + (seeds[2] / 7) % (tp_hi - tp_lo + 1);
        let cm = |tp: usize| confusion(tp, x - tp, (k - x) - (n - tp), n - tp);
        let sign = |d: f64| if d > 0.0 { 1 } else if d < 0.0 { -1 } else { 0 };

        let (a, b) = (cm(tp1), cm(tp2));
        let expected = sign(tp1 as f64 - tp2 as f64);
        prop_assert_eq!(sign(mcc(&a) - mcc(&b)), expected);
        let ca = matter_core::classic_set(&a);
        let cb = matter_core::classic_set(&b);
        let delta = |va: matter_core::IndicatorValue, vb: matter_core::IndicatorValue|
            sign(va.value().unwrap() - vb.value().unwrap());
        prop_assert_eq!(delta(ca.recall, cb.recall), expected);
        prop_assert_eq!(delta(ca.precision, cb.precision), expected);
        prop_assert_eq!(delta(ca.f1, cb.f1), expected);
        prop_assert_eq!(delta(ca.g1, cb.g1), expected);
        prop_assert_eq!(-delta(ca.pf, cb.pf), expected);
    }

    #[test]
    fn eifa_is_zero_iff_top_module_is_defective(
        (ds, ranking) in ranked_release(25, true),
    ) {
        let breakdown = eifa(&ranking, &ds, 0.5).unwrap();
        let top_defective = ds
            .module_by_id(&ranking.order()[0])
            .unwrap()
            .label
            .unwrap();
        prop_assert_eq!(breakdown.eifa == 0.0, top_defective);
        prop_assert_eq!(breakdown.y == 0, top_defective);
        prop_assert!((0.0..=1.0).contains(&breakdown.eifa));
    }

    #[test]
    fn moving_the_first_defect_later_weakly_increases_eifa(
        (ds, ranking) in ranked_release(25, true),
    ) {
        let before = eifa(&ranking, &ds, 0.5).unwrap();
        // Push the first defective module to the very end of the order.
        let mut order = ranking.order().to_vec();
        let first = order
            .iter()
            .position(|id| ds.module_by_id(id).unwrap().label.unwrap())
            .unwrap();
        let module = order.remove(first);
        order.push(module);
        let moved = Ranking::from_order(&ds, "moved", order).unwrap();
        let after = eifa(&moved, &ds, 0.5).unwrap();
        prop_assert!(after.eifa >= before.eifa);
    }

    #[test]
    fn full_reports_stay_in_range(
        (ds, ranking) in ranked_release(25, true),
        f in fraction(),
        kind in prop_oneof![Just(BudgetKind::Snm), Just(BudgetKind::Ssc)],
    ) {
        let budget = EffortBudget::new(kind, f).unwrap();
        let report = evaluate(&ranking, &ds, budget, &EvalParams::default()).unwrap();
        prop_assert!((-1.0..=1.0).contains(&report.mcc));
        if let Some(roi) = report.roi.value() {
            prop_assert!(roi >= 0.0);
        }
        for value in [
            report.classic.recall.value(),
            report.classic.precision.value(),
            report.classic.pf.value(),
            report.classic.f1.value(),
            report.classic.g1.value(),
            report.aucs.loc_pd.value(),
            report.aucs.pf_pd.value(),
            Some(report.recall_at_effort),
            Some(report.eifa.eifa),
        ]
        .into_iter()
        .flatten()
        {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&value), "out of range: {value}");
        }
    }
}

fn sample() -> BoxedStrategy<Vec<f64>> {
    proptest::collection::vec((0u32..=6).prop_map(f64::from), 1..=15).boxed()
}

proptest! {
    #[test]
    fn cliffs_delta_matches_pair_enumeration(xs in sample(), ys in sample()) {
        let fast = cliffs_delta(&xs, &ys).unwrap();
        prop_assert_eq!(fast.delta, oracle::cliffs_direct(&xs, &ys));
        prop_assert!(fast.delta.abs() <= 1.0);
        let back = cliffs_delta(&ys, &xs).unwrap();
        prop_assert_eq!(fast.delta, -back.delta);
        let self_delta = cliffs_delta(&xs, &xs).unwrap();
        prop_assert_eq!(self_delta.delta, 0.0);
        prop_assert_eq!(fast.magnitude, Magnitude::from_delta(fast.delta));
    }

    #[test]
    fn correlations_match_their_definitions(
        pairs in proptest::collection::vec(
            ((0u32..=6).prop_map(f64::from), (0u32..=6).prop_map(f64::from)),
            2..=12,
        ),
    ) {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        match (spearman(&xs, &ys), oracle::spearman_direct(&xs, &ys)) {
            (Ok(a), Some(b)) => {
                prop_assert!((a - b).abs() < 1e-12);
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&a));
            }
            (Err(_), None) => {}
            (a, b) => prop_assert!(false, "spearman disagreement: {a:?} vs {b:?}"),
        }
        match (kendall(&xs, &ys), oracle::kendall_direct(&xs, &ys)) {
            (Ok(a), Some(b)) => {
                prop_assert!((a - b).abs() < 1e-12);
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&a));
            }
            (Err(_), None) => {}
            (a, b) => prop_assert!(false, "kendall disagreement: {a:?} vs {b:?}"),
        }
    }
}

/// Random performance matrix with occasional undefined cells but at least
/// two defined values per dataset column.
#[allow(clippy::needless_range_loop)] // column-wise access of row-major cells
fn performance_matrix() -> BoxedStrategy<PerformanceMatrix> {
    (2usize..=6, 2usize..=8)
        .prop_flat_map(|(m, d)| {
            let cells = proptest::collection::vec(
                proptest::option::weighted(0.9, (0u32..=8).prop_map(f64::from)),
                m * d,
            );
            (Just(m), Just(d), cells)
        })
        .prop_map(|(m, d, cells)| {
            let mut values: Vec<Vec<Option<f64>>> =
                (0..m).map(|i| cells[i * d..(i + 1) * d].to_vec()).collect();
            for col in 0..d {
                let defined = (0..m).filter(|&i| values[i][col].is_some()).count();
                if defined < 2 {
                    values[0][col] = Some(1.0);
                    values[1][col] = Some(2.0);
                }
            }
            PerformanceMatrix::new(
                (0..m).map(|i| format!("model{i}")).collect(),
                (0..d).map(|i| format!("rel{i}")).collect(),
                values,
                Polarity::HigherIsBetter,
            )
            .unwrap()
        })
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_columns_sum_to_the_triangular_number(matrix in performance_matrix()) {
        let ranks = rank_transform(&matrix).unwrap();
        let m = matrix.models().len();
        for d in 0..matrix.datasets().len() {
            let sum: f64 = (0..m).map(|i| ranks.model_sample(i)[d]).sum();
            prop_assert!((sum - (m * (m + 1) / 2) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn scott_knott_groups_are_contiguous_and_separated(matrix in performance_matrix()) {
        let grouping = scott_knott_esd(&matrix).unwrap();
        let ranks = rank_transform(&matrix).unwrap();

        // Every model appears exactly once.
        let mut names: Vec<&str> = grouping.entries.iter().map(|e| e.model.as_str()).collect();
        names.sort_unstable();
        let mut expected: Vec<&str> = matrix.models().iter().map(|s| s.as_str()).collect();
        expected.sort_unstable();
        prop_assert_eq!(names, expected);

        // Contiguity: mean ranks non-decreasing, group ids step by ≤ 1.
        prop_assert_eq!(grouping.entries[0].group, 1);
        for w in grouping.entries.windows(2) {
            prop_assert!(w[0].mean_rank <= w[1].mean_rank + 1e-12);
            prop_assert!(w[1].group == w[0].group || w[1].group == w[0].group + 1);
        }

        // Adjacent groups differ non-negligibly on pooled rank samples.
        let index_of = |name: &str| {
            matrix.models().iter().position(|m| m == name).unwrap()
        };
        let pooled = |group: usize| -> Vec<f64> {
            grouping
                .entries
                .iter()
                .filter(|e| e.group == group)
                .flat_map(|e| ranks.model_sample(index_of(&e.model)).iter().copied())
                .collect()
        };
        for g in 1..grouping.group_count() {
            let delta = cliffs_delta(&pooled(g), &pooled(g + 1)).unwrap();
            prop_assert!(
                delta.delta.abs() >= NEGLIGIBLE_DELTA,
                "adjacent groups {} and {} differ only by {}",
                g,
                g + 1,
                delta.delta
            );
        }
    }
}

proptest! {
    #[test]
    fn standardized_metrics_have_zero_mean_unit_spread(
        ds in (3usize..=20).prop_flat_map(|k| {
            proptest::collection::vec(1u64..=500, k).prop_map(|slocs| {
                let labels = vec![false; slocs.len()];
                build_release(slocs, labels, 3)
            })
        }),
    ) {
        let std = standardize_metrics(&ds).unwrap();
        let k = std.rows.len();
        for c in 0..std.metric_names.len() {
            let column: Vec<f64> = std.rows.iter().map(|r| r[c]).collect();
            let mean: f64 = column.iter().sum::<f64>() / k as f64;
            let var: f64 = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k as f64;
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((var - 1.0).abs() < 1e-9);
        }
    }
}
