//! Seeded random fixtures: releases, rankings, and statistic samples.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use matter_core::{ModuleRecord, Ranking, ReleaseDataset};

/// A release with `k` modules, random slocs in `1..=1000`, `metrics`
/// random metric columns, and random labels.
pub fn random_release(rng: &mut impl Rng, k: usize, metrics: usize) -> ReleaseDataset {
    let metric_names: Vec<String> = (0..metrics).map(|m| format!("metric{m}")).collect();
    let modules = (0..k)
        .map(|i| ModuleRecord {
            id: format!("mod{i:04}"),
            sloc: rng.gen_range(1..=1000),
            label: Some(rng.gen_bool(0.3)),
            metrics: metric_names
                .iter()
                .map(|name| (name.clone(), rng.gen_range(-50.0..50.0)))
                .collect(),
        })
        .collect();
    ReleaseDataset::new(format!("rand{}", rng.gen_range(0..100_000)), "", modules)
        .expect("generated release is structurally valid")
}

/// Like [`random_release`] but guaranteed to contain at least one
/// defective and at least one clean module (needs `k >= 2`).
pub fn random_mixed_release(rng: &mut impl Rng, k: usize, metrics: usize) -> ReleaseDataset {
    assert!(k >= 2, "a mixed release needs at least 2 modules");
    loop {
        let ds = random_release(rng, k, metrics);
        let n = ds.defective_count().unwrap();
        if n >= 1 && n < ds.module_count() {
            return ds;
        }
    }
}

/// A release whose metric rows form two Gaussian blobs of sizes
/// `k - outliers` and `outliers`, for clustering fixtures.
pub fn two_blob_release(
    rng: &mut impl Rng,
    k: usize,
    outliers: usize,
    dims: usize,
) -> ReleaseDataset {
    assert!(outliers >= 1 && outliers < k);
    let near = Normal::new(0.0, 1.0).unwrap();
    let far = Normal::new(12.0, 1.0).unwrap();
    let modules = (0..k)
        .map(|i| {
            let dist = if i < k - outliers { near } else { far };
            ModuleRecord {
                id: format!("mod{i:04}"),
                sloc: rng.gen_range(1..=1000),
                label: Some(i >= k - outliers),
                metrics: (0..dims)
                    .map(|d| (format!("metric{d}"), dist.sample(rng)))
                    .collect(),
            }
        })
        .collect();
    ReleaseDataset::new("blob", "", modules).expect("generated release is structurally valid")
}

/// A uniformly random permutation ranking over a release's modules.
pub fn random_ranking(rng: &mut impl Rng, dataset: &ReleaseDataset) -> Ranking {
    let mut order: Vec<String> = dataset.modules().iter().map(|m| m.id.clone()).collect();
    order.shuffle(rng);
    Ranking::from_order(dataset, "random", order).expect("permutation covers the release")
}

/// A sample of `len` values drawn from a small integer grid so that ties
/// are common, as rank data would be.
pub fn tied_sample(rng: &mut impl Rng, len: usize, grid: u32) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0..=grid) as f64).collect()
}
