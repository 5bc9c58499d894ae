//! Fuzzy c-means clustering with two clusters over z-scored metrics.
//!
//! Alternates the textbook membership and center updates until the largest
//! membership change falls below the tolerance. The larger cluster is
//! taken as the clean one; modules are ranked by their membership in the
//! defective cluster.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::ReleaseDataset;
use crate::error::{Error, Result};
use crate::ranking::Ranking;

use super::{canonical_view, squared_distance, Diagnostics, ModelOutput};

/// Fuzzy c-means parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmParams {
    /// Fuzzifier exponent m; must be greater than 1.
    pub fuzzifier: f64,
    /// Convergence tolerance on the largest membership change.
    pub tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Seed for the initial center choice.
    pub seed: u64,
}

impl Default for FcmParams {
    fn default() -> Self {
        Self {
            fuzzifier: 2.0,
            tol: 1e-6,
            max_iter: 300,
            seed: 0,
        }
    }
}

/// Runs two-cluster fuzzy c-means on a release.
///
/// Initial centers are two distinct module metric vectors drawn with the
/// seeded generator; all arithmetic runs in canonical (id-sorted) module
/// order, so the output depends only on the data and the seed, not on the
/// input row order. Fails with a degenerate-clustering error when every
/// module has the same metric vector or the two centers collapse into one.
pub fn fcm(dataset: &ReleaseDataset, params: &FcmParams) -> Result<ModelOutput> {
    if !params.fuzzifier.is_finite() || params.fuzzifier <= 1.0 {
        return Err(Error::data(format!(
            "fcm fuzzifier must be finite and > 1, got {}",
            params.fuzzifier
        )));
    }
    if !params.tol.is_finite() || params.tol <= 0.0 {
        return Err(Error::data(format!(
            "fcm tolerance must be finite and > 0, got {}",
            params.tol
        )));
    }
    if params.max_iter == 0 {
        return Err(Error::data("fcm max_iter must be at least 1".to_string()));
    }

    let view = canonical_view(dataset)?;
    let k = view.rows.len();
    let exponent = 1.0 / (params.fuzzifier - 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let first = rng.gen_range(0..k);
    let distinct: Vec<usize> = (0..k)
        .filter(|&i| view.rows[i] != view.rows[first])
        .collect();
    if distinct.is_empty() {
        return Err(Error::model(format!(
            "degenerate clustering on release {}: all modules have identical metric vectors",
            dataset.release_key()
        )));
    }
    let second = distinct[rng.gen_range(0..distinct.len())];
    let mut centers = [view.rows[first].clone(), view.rows[second].clone()];

    let mut memberships = vec![[0.5f64; 2]; k];
    let mut objective_trace = Vec::new();
    let mut iterations = 0usize;

    for iter in 1..=params.max_iter {
        iterations = iter;

        // Membership update from the current centers.
        let mut max_change = 0.0f64;
        for (j, row) in view.rows.iter().enumerate() {
            let d0 = squared_distance(row, &centers[0]);
            let d1 = squared_distance(row, &centers[1]);
            let u = if d0 == 0.0 && d1 == 0.0 {
                [0.5, 0.5]
            } else if d0 == 0.0 {
                [1.0, 0.0]
            } else if d1 == 0.0 {
                [0.0, 1.0]
            } else {
                // 1 / sum_l (d_j / d_l)^(1/(m-1)) with squared distances.
                let u0 = 1.0 / (1.0 + (d0 / d1).powf(exponent));
                [u0, 1.0 - u0]
            };
            max_change = max_change
                .max((u[0] - memberships[j][0]).abs())
                .max((u[1] - memberships[j][1]).abs());
            memberships[j] = u;
        }

        // Center update from the new memberships.
        let dims = view.rows[0].len();
        for c in 0..2 {
            let mut num = vec![0.0f64; dims];
            let mut den = 0.0f64;
            for (j, row) in view.rows.iter().enumerate() {
                let w = memberships[j][c].powf(params.fuzzifier);
                den += w;
                for (d, v) in row.iter().enumerate() {
                    num[d] += w * v;
                }
            }
            if den > 0.0 {
                for d in 0..dims {
                    centers[c][d] = num[d] / den;
                }
            }
        }

        let objective: f64 = view
            .rows
            .iter()
            .enumerate()
            .map(|(j, row)| {
                memberships[j][0].powf(params.fuzzifier) * squared_distance(row, &centers[0])
                    + memberships[j][1].powf(params.fuzzifier) * squared_distance(row, &centers[1])
            })
            .sum();
        objective_trace.push(objective);

        if max_change < params.tol {
            break;
        }
    }

    if squared_distance(&centers[0], &centers[1]) < 1e-24 {
        return Err(Error::model(format!(
            "degenerate clustering on release {}: cluster centers coincide",
            dataset.release_key()
        )));
    }

    // Hard assignment by the larger membership; the larger cluster is
    // clean. On a size tie the cluster whose center has the larger
    // coordinate sum (more extreme metrics) is the defective one.
    let assigned: Vec<usize> = memberships
        .iter()
        .map(|u| if u[1] > u[0] { 1 } else { 0 })
        .collect();
    let size0 = assigned.iter().filter(|&&c| c == 0).count();
    let size1 = k - size0;
    let defective = if size0 < size1 {
        0
    } else if size1 < size0 {
        1
    } else {
        let sum0: f64 = centers[0].iter().sum();
        let sum1: f64 = centers[1].iter().sum();
        if sum0 >= sum1 {
            0
        } else {
            1
        }
    };

    let intrinsic: BTreeMap<String, bool> = view
        .ids
        .iter()
        .zip(&assigned)
        .map(|(id, c)| (id.clone(), *c == defective))
        .collect();
    let pairs: Vec<(String, f64)> = view
        .ids
        .iter()
        .zip(&memberships)
        .map(|(id, u)| (id.clone(), u[defective]))
        .collect();
    let ranking = Ranking::from_scores(dataset, "fcm", pairs)?;

    Ok(ModelOutput {
        ranking,
        intrinsic_labels: Some(intrinsic),
        diagnostics: Diagnostics {
            iterations: Some(iterations),
            dropped_metrics: view.dropped,
            cluster_sizes: vec![size0, size1],
            objective_trace,
            ..Diagnostics::default()
        },
    })
}
