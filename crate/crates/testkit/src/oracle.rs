//! Naive reference implementations, written straight from definitions.
//!
//! Inputs are plain slices in ranking order (`labels[i]`/`slocs[i]` belong
//! to the module at rank i), so these functions cannot accidentally share
//! logic with the library's ranking machinery.

/// (tp, fp, tn, fn) of inspecting the first `x` modules.
pub fn prefix_confusion(labels: &[bool], x: usize) -> (usize, usize, usize, usize) {
    let tp = labels[..x].iter().filter(|&&d| d).count();
    let fp = x - tp;
    let fn_ = labels[x..].iter().filter(|&&d| d).count();
    let tn = labels.len() - x - fn_;
    (tp, fp, tn, fn_)
}

/// Matthews correlation coefficient, 0 when any marginal sum is zero.
pub fn mcc_direct(tp: usize, fp: usize, tn: usize, fn_: usize) -> f64 {
    let (tp, fp, tn, fn_) = (tp as f64, fp as f64, tn as f64, fn_ as f64);
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        0.0
    } else {
        (tp * tn - fp * fn_) / denom.sqrt()
    }
}

pub fn roi_snm_direct(tp: usize, pci: f64) -> Option<f64> {
    (pci > 0.0).then(|| tp as f64 / pci)
}

pub fn roi_ssc_direct(tp: usize, pii: f64) -> Option<f64> {
    (pii > 0.0).then(|| tp as f64 / pii)
}

pub fn roi_general_direct(tp: usize, pii: f64, pci: f64, a: f64) -> Option<f64> {
    let effort = a * pci + (1.0 - a) * pii;
    (effort > 0.0).then(|| tp as f64 / effort)
}

/// Modules ranked strictly before the first defective one; `None` when
/// nothing is defective.
pub fn first_defect_position(labels: &[bool]) -> Option<usize> {
    labels.iter().position(|&d| d)
}

/// (y, pii_ifa, pci_ifa, eifa) from rank-ordered labels and slocs.
pub fn eifa_direct(labels: &[bool], slocs: &[u64], a: f64) -> Option<(usize, f64, f64, f64)> {
    let y = first_defect_position(labels)?;
    let k = labels.len() as f64;
    let s: u64 = slocs.iter().sum();
    let pii_ifa = y as f64 / k;
    let pci_ifa = slocs[..y].iter().sum::<u64>() as f64 / s as f64;
    let eifa = a * pii_ifa + (1.0 - a) * pci_ifa;
    Some((y, pii_ifa, pci_ifa, eifa))
}

/// Longest prefix length x with x/k ≤ fraction, by scanning every x.
pub fn snm_prefix_len(k: usize, fraction: f64) -> usize {
    (0..=k)
        .rev()
        .find(|&x| x as f64 / k as f64 <= fraction)
        .unwrap_or(0)
}

/// Longest prefix whose sloc share stays within `fraction`, by scanning.
pub fn ssc_prefix_len(slocs: &[u64], fraction: f64) -> usize {
    let s: u64 = slocs.iter().sum();
    (0..=slocs.len())
        .rev()
        .find(|&x| slocs[..x].iter().sum::<u64>() as f64 / s as f64 <= fraction)
        .unwrap_or(0)
}

/// recall, precision, pf, f1, g1 with the same undefined/zero conventions
/// the library documents.
pub fn classic_direct(tp: usize, fp: usize, tn: usize, fn_: usize) -> [Option<f64>; 5] {
    let recall = (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64);
    let precision = (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64);
    let pf = (fp + tn > 0).then(|| fp as f64 / (fp + tn) as f64);
    let harmonic = |a: f64, b: f64| {
        if a + b == 0.0 {
            0.0
        } else {
            2.0 * a * b / (a + b)
        }
    };
    let f1 = match (recall, precision) {
        (Some(r), Some(p)) => Some(harmonic(r, p)),
        _ => None,
    };
    let g1 = match (recall, pf) {
        (Some(r), Some(pf)) => Some(harmonic(r, 1.0 - pf)),
        _ => None,
    };
    [recall, precision, pf, f1, g1]
}

/// Share of all defects found within the longest prefix whose sloc share
/// stays within `fraction`.
pub fn recall_at_direct(labels: &[bool], slocs: &[u64], fraction: f64) -> Option<f64> {
    let n = labels.iter().filter(|&&d| d).count();
    if n == 0 {
        return None;
    }
    let x = ssc_prefix_len(slocs, fraction);
    Some(labels[..x].iter().filter(|&&d| d).count() as f64 / n as f64)
}

/// Trapezoidal area under a piecewise-linear curve given as points.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    let mut area = 0.0;
    for w in points.windows(2) {
        area += (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0;
    }
    area
}

/// The (sloc-share, recall) curve over all prefixes, starting at (0, 0).
pub fn loc_pd_points(labels: &[bool], slocs: &[u64]) -> Option<Vec<(f64, f64)>> {
    let n = labels.iter().filter(|&&d| d).count();
    if n == 0 {
        return None;
    }
    let s: u64 = slocs.iter().sum();
    let mut points = vec![(0.0, 0.0)];
    let mut cum = 0u64;
    let mut tp = 0usize;
    for (i, &label) in labels.iter().enumerate() {
        cum += slocs[i];
        tp += usize::from(label);
        points.push((cum as f64 / s as f64, tp as f64 / n as f64));
    }
    Some(points)
}

/// The (pf, recall) curve over all prefixes, starting at (0, 0).
pub fn pf_pd_points(labels: &[bool]) -> Option<Vec<(f64, f64)>> {
    let n = labels.iter().filter(|&&d| d).count();
    let clean = labels.len() - n;
    if n == 0 || clean == 0 {
        return None;
    }
    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    for &label in labels {
        if label {
            tp += 1;
        } else {
            fp += 1;
        }
        points.push((fp as f64 / clean as f64, tp as f64 / n as f64));
    }
    Some(points)
}

/// Cliff's delta by enumerating every pair.
pub fn cliffs_direct(xs: &[f64], ys: &[f64]) -> f64 {
    let mut greater = 0i64;
    let mut less = 0i64;
    for &x in xs {
        for &y in ys {
            if x > y {
                greater += 1;
            } else if x < y {
                less += 1;
            }
        }
    }
    (greater - less) as f64 / (xs.len() as f64 * ys.len() as f64)
}

/// Mid-ranks, 1 = smallest, computed by counting comparisons.
fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&o| o < x).count();
            let equal = xs.iter().filter(|&&o| o == x).count();
            // Average of positions below+1 ..= below+equal.
            below as f64 + (equal as f64 + 1.0) / 2.0
        })
        .collect()
}

/// Spearman correlation from the definition; `None` on zero variance.
pub fn spearman_direct(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let rx = mid_ranks(xs);
    let ry = mid_ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx.sqrt() * vy.sqrt()))
}

/// Kendall tau-b from the definition; `None` on zero variance.
pub fn kendall_direct(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut tx = 0i64;
    let mut ty = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = (xs[i] - xs[j]).partial_cmp(&0.0).unwrap();
            let b = (ys[i] - ys[j]).partial_cmp(&0.0).unwrap();
            use std::cmp::Ordering::Equal;
            if a == Equal {
                tx += 1;
            }
            if b == Equal {
                ty += 1;
            }
            if a != Equal && b != Equal {
                if a == b {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let den = ((n0 - tx) as f64 * (n0 - ty) as f64).sqrt();
    if den == 0.0 {
        return None;
    }
    Some((concordant - discordant) as f64 / den)
}

/// Full eigendecomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Returns (eigenvalues, eigenvectors) sorted ascending by
/// eigenvalue; eigenvector i is `vectors[i]`.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _sweep in 0..200 {
        let mut off = 0.0;
        for (i, row) in a.iter().enumerate() {
            for value in &row[i + 1..] {
                off += value * value;
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let akp = row[p];
                    let akq = row[q];
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (apk, aqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| v.iter().map(|row| row[i]).collect())
        .collect();
    (values, vectors)
}
