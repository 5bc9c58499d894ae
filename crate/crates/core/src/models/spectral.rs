//! Spectral bipartition over a clamped-cosine similarity graph.
//!
//! Builds `w_ij = max(0, cos(z_i, z_j))` over z-scored metric vectors,
//! forms the symmetric normalized Laplacian, extracts the second-smallest
//! eigenvector (Fiedler vector) by deflated power iteration, and splits
//! the modules by its sign. The side with the larger mean z-scored row
//! sum is labeled defective.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::ReleaseDataset;
use crate::error::{Error, Result};
use crate::ranking::Ranking;

use super::{canonical_view, Diagnostics, ModelOutput};

/// Spectral clustering parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScParams {
    /// Seed for the power-iteration start vector.
    pub seed: u64,
    /// Accepted eigen-residual ‖L·v − λ·v‖ for the Fiedler vector.
    pub eig_tol: f64,
    /// Power-iteration cap.
    pub max_eig_iter: usize,
}

impl Default for ScParams {
    fn default() -> Self {
        Self {
            seed: 0,
            eig_tol: 1e-8,
            max_eig_iter: 50_000,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Multiplies the dense symmetric normalized Laplacian by `x`.
///
/// `L = I − D^{−1/2} W D^{−1/2}`, expressed through the similarity matrix
/// `w` and precomputed `D^{−1/2}` entries (zero for isolated nodes).
fn laplacian_mul(w: &[Vec<f64>], dinv_sqrt: &[f64], x: &[f64]) -> Vec<f64> {
    let k = x.len();
    let mut out = vec![0.0; k];
    for i in 0..k {
        let mut acc = 0.0;
        for j in 0..k {
            if i != j && w[i][j] > 0.0 {
                acc += w[i][j] * dinv_sqrt[j] * x[j];
            }
        }
        out[i] = x[i] - dinv_sqrt[i] * acc;
    }
    out
}

/// Runs two-way spectral clustering on a release.
///
/// Deterministic for a fixed seed and independent of the module input
/// order. Fails when every pairwise similarity is zero (nothing to
/// partition) or the eigensolver does not reach the requested residual
/// within the iteration cap.
pub fn spectral_cluster(dataset: &ReleaseDataset, params: &ScParams) -> Result<ModelOutput> {
    if !params.eig_tol.is_finite() || params.eig_tol <= 0.0 {
        return Err(Error::data(format!(
            "sc eig_tol must be finite and > 0, got {}",
            params.eig_tol
        )));
    }
    if params.max_eig_iter == 0 {
        return Err(Error::data(
            "sc max_eig_iter must be at least 1".to_string(),
        ));
    }

    let view = canonical_view(dataset)?;
    let k = view.rows.len();

    // Clamped cosine similarity; zero-norm rows are similar to nothing.
    let norms: Vec<f64> = view.rows.iter().map(|r| norm(r)).collect();
    let mut w = vec![vec![0.0f64; k]; k];
    let mut total_weight = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            let s = if norms[i] > 0.0 && norms[j] > 0.0 {
                (dot(&view.rows[i], &view.rows[j]) / (norms[i] * norms[j])).max(0.0)
            } else {
                0.0
            };
            w[i][j] = s;
            w[j][i] = s;
            total_weight += s;
        }
    }
    if total_weight == 0.0 {
        return Err(Error::model(format!(
            "zero similarity graph on release {}: no positive pairwise similarity",
            dataset.release_key()
        )));
    }

    let degrees: Vec<f64> = (0..k).map(|i| w[i].iter().sum()).collect();
    let dinv_sqrt: Vec<f64> = degrees
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();

    // The trivial eigenvector of L (eigenvalue 0) is D^{1/2}·1, normalized.
    let mut v0: Vec<f64> = degrees.iter().map(|&d| d.sqrt()).collect();
    let v0_norm = norm(&v0);
    for v in &mut v0 {
        *v /= v0_norm;
    }
    let deflate = |x: &mut Vec<f64>| {
        let c = dot(x, &v0);
        for (xi, vi) in x.iter_mut().zip(&v0) {
            *xi -= c * vi;
        }
    };

    // Seeded start vector, orthogonal to the trivial eigenvector.
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut x = vec![0.0f64; k];
    let mut attempts = 0;
    loop {
        for xi in &mut x {
            *xi = rng.gen::<f64>() - 0.5;
        }
        deflate(&mut x);
        let n = norm(&x);
        if n > 1e-6 {
            for xi in &mut x {
                *xi /= n;
            }
            break;
        }
        attempts += 1;
        if attempts > 16 {
            return Err(Error::model(
                "eigensolver could not build a start vector orthogonal to the trivial eigenvector"
                    .to_string(),
            ));
        }
    }

    // Power iteration on B = 2I − L: the dominant eigenvector of B within
    // the deflated subspace is the second-smallest eigenvector of L
    // (eigenvalues of L lie in [0, 2]).
    let mut fiedler = None;
    let mut iterations = 0usize;
    let mut residual = f64::INFINITY;
    for iter in 1..=params.max_eig_iter {
        iterations = iter;
        let lx = laplacian_mul(&w, &dinv_sqrt, &x);
        let lambda = dot(&x, &lx);
        residual = x
            .iter()
            .zip(&lx)
            .map(|(xi, li)| (li - lambda * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= params.eig_tol {
            fiedler = Some(x.clone());
            break;
        }
        let mut next: Vec<f64> = x.iter().zip(&lx).map(|(xi, li)| 2.0 * xi - li).collect();
        deflate(&mut next);
        let n = norm(&next);
        if n < 1e-300 {
            break;
        }
        for v in &mut next {
            *v /= n;
        }
        x = next;
    }
    let fiedler = fiedler.ok_or_else(|| {
        Error::model(format!(
            "eigensolver did not converge within {iterations} iterations \
             (residual {residual:.3e}, tolerance {:.3e})",
            params.eig_tol
        ))
    })?;

    // Split by sign; if one side is empty, split at the median component;
    // if components are too tied even for that, split at the midpoint of
    // the component order so both sides stay non-empty.
    let positive: Vec<bool> = fiedler.iter().map(|&v| v > 0.0).collect();
    let side_a: Vec<bool> = if positive.iter().any(|&p| p) && positive.iter().any(|&p| !p) {
        positive
    } else {
        let mut sorted = fiedler.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
        };
        let by_median: Vec<bool> = fiedler.iter().map(|&v| v > median).collect();
        if by_median.iter().any(|&p| p) && by_median.iter().any(|&p| !p) {
            by_median
        } else {
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&a, &b| {
                fiedler[b]
                    .total_cmp(&fiedler[a])
                    .then_with(|| view.ids[a].cmp(&view.ids[b]))
            });
            let mut flags = vec![false; k];
            for &i in order.iter().take(k / 2) {
                flags[i] = true;
            }
            flags
        }
    };

    // The side with the larger mean z-scored row sum is defective.
    let row_sums: Vec<f64> = view.rows.iter().map(|r| r.iter().sum()).collect();
    let mean_of = |in_a: bool| {
        let vals: Vec<f64> = row_sums
            .iter()
            .zip(&side_a)
            .filter(|(_, &a)| a == in_a)
            .map(|(&v, _)| v)
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let defective_is_a = mean_of(true) >= mean_of(false);
    let sign = if defective_is_a { 1.0 } else { -1.0 };

    let intrinsic: BTreeMap<String, bool> = view
        .ids
        .iter()
        .zip(&side_a)
        .map(|(id, &a)| (id.clone(), a == defective_is_a))
        .collect();
    let pairs: Vec<(String, f64)> = view
        .ids
        .iter()
        .zip(&fiedler)
        .map(|(id, &v)| (id.clone(), sign * v))
        .collect();
    let ranking = Ranking::from_scores(dataset, "sc", pairs)?;

    let size_a = side_a.iter().filter(|&&a| a).count();
    Ok(ModelOutput {
        ranking,
        intrinsic_labels: Some(intrinsic),
        diagnostics: Diagnostics {
            iterations: Some(iterations),
            dropped_metrics: view.dropped,
            cluster_sizes: vec![size_a, k - size_a],
            eigen_residual: Some(residual),
            ..Diagnostics::default()
        },
    })
}
