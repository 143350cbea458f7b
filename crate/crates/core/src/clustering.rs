//! Sparse k-means with lasso-constrained feature weights, and the
//! centroid alignment score used to compare representations.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hodgelets::Dictionary;

/// Bisection steps used to find the soft threshold.
pub const THRESHOLD_BISECTIONS: usize = 30;
/// Alternation stops once the weights move less than this in l1.
pub const WEIGHT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 20;
const LLOYD_ITERS: usize = 100;

/// Fitted sparse k-means model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    #[serde(rename = "K")]
    pub k: usize,
    /// l1 budget on the weights.
    pub s: f64,
    pub seed: u64,
    pub weights: Vec<f64>,
    /// Cluster means of the unscaled training rows.
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// Weighted between-cluster dispersion after each weight update.
    pub objective: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn means(rows: &[Vec<f64>], labels: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let dim = rows.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (row, &l) in rows.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(row) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            s.iter_mut().for_each(|x| *x /= c as f64);
        }
    }
    (sums, counts)
}

fn within_ss(rows: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let (centers, _) = means(rows, labels, k);
    rows.iter().zip(labels).map(|(r, &l)| sq_dist(r, &centers[l])).sum()
}

fn kmeans_pp(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![rows[rng.gen_range(0..rows.len())].clone()];
    let mut chosen = vec![false; rows.len()];
    while centers.len() < k {
        let d2: Vec<f64> = rows.iter().map(|r| nearest(r, &centers).1).collect();
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = d2.iter().rposition(|&d| d > 0.0).unwrap();
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            (0..rows.len()).find(|&i| !chosen[i]).unwrap_or(0)
        };
        chosen[pick] = true;
        centers.push(rows[pick].clone());
    }
    centers
}

/// Lloyd iterations from initial labels; empty clusters are refilled with
/// the point farthest from its centroid.
fn lloyd(rows: &[Vec<f64>], mut labels: Vec<usize>, k: usize) -> Vec<usize> {
    for _ in 0..LLOYD_ITERS {
        let (mut centers, counts) = means(rows, &labels, k);
        for c in 0..k {
            if counts[c] == 0 {
                let far = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (i, sq_dist(r, &centers[labels[i]])))
                    .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
                labels[far.0] = c;
                centers[c] = rows[far.0].clone();
            }
        }
        let next: Vec<usize> = rows.iter().map(|r| nearest(r, &centers).0).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    labels
}

fn scaled_rows(rows: &[Vec<f64>], weights: &[f64]) -> Vec<Vec<f64>> {
    let active: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(d, &w)| (d, w.sqrt()))
        .collect();
    rows.iter()
        .map(|r| active.iter().map(|&(d, s)| r[d] * s).collect())
        .collect()
}

/// Per-feature between-cluster sum of squares.
fn between_ss(rows: &[Vec<f64>], labels: &[usize], k: usize) -> Vec<f64> {
    // sum_k n_k (c_k - mean)^2, which equals total minus within-cluster
    // dispersion and is exactly zero for a single cluster
    let (grand, _) = means(rows, &vec![0; rows.len()], 1);
    let (centers, sizes) = means(rows, labels, k);
    let mut out = vec![0.0; rows[0].len()];
    for (c, &n) in centers.iter().zip(&sizes) {
        for (d, o) in out.iter_mut().enumerate() {
            *o += n as f64 * (c[d] - grand[0][d]).powi(2);
        }
    }
    out
}

fn soft_normalized(a: &[f64], delta: f64) -> Option<Vec<f64>> {
    let s: Vec<f64> = a.iter().map(|&x| (x - delta).max(0.0)).collect();
    let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 0.0).then(|| s.into_iter().map(|x| x / norm).collect())
}

/// Maximizes `sum w_d a_d` subject to `||w||_2 <= 1`, `||w||_1 <= s`,
/// `w >= 0`. Returns `None` when no feature has positive dispersion.
pub fn update_weights(dispersion: &[f64], s: f64) -> Option<Vec<f64>> {
    let a: Vec<f64> = dispersion.iter().map(|&x| x.max(0.0)).collect();
    let top = a.iter().copied().fold(0.0, f64::max);
    if !(top > 0.0) {
        return None;
    }
    let l1 = |w: &[f64]| w.iter().sum::<f64>();
    let unconstrained = soft_normalized(&a, 0.0).unwrap();
    if l1(&unconstrained) <= s {
        return Some(unconstrained);
    }
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..THRESHOLD_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        match soft_normalized(&a, mid) {
            Some(w) if l1(&w) <= s => hi = mid,
            _ => lo = mid,
        }
    }
    Some(soft_normalized(&a, hi).unwrap_or_else(|| {
        // limit of the threshold at the maximum: the top features only
        let ties: Vec<f64> = a.iter().map(|&x| if x == top { 1.0 } else { 0.0 }).collect();
        let n = ties.iter().sum::<f64>().sqrt();
        ties.into_iter().map(|x| x / n).collect()
    }))
}

/// Sparse k-means on the rows of `features` (P x D).
///
/// Alternates k-means on `sqrt(w)`-scaled features with the closed-form
/// weight update. Each clustering step keeps the better of a fresh
/// k-means++ start and a warm start from the previous labels, so the
/// weighted dispersion never decreases. Deterministic for a given seed.
pub fn sparse_kmeans(
    features: &DMatrix<f64>,
    k: usize,
    s: f64,
    seed: u64,
    max_iters: usize,
) -> Result<ClusterModel> {
    let (p, dim) = features.shape();
    if k == 0 || dim == 0 {
        return Err(Error::InvalidParameter("need at least one cluster and one feature".into()));
    }
    if k > p {
        return Err(Error::TooManyClusters { k, p });
    }
    if !(s >= 1.0 && s <= (dim as f64).sqrt() * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "l1 budget {s} outside [1, sqrt({dim})]"
        )));
    }
    let rows: Vec<Vec<f64>> = features.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut labels: Option<Vec<usize>> = None;
    let mut objective = Vec::new();

    for _ in 0..max_iters.max(1) {
        let scaled = scaled_rows(&rows, &weights);
        let fresh = {
            let centers = kmeans_pp(&scaled, k, &mut rng);
            let init = scaled.iter().map(|r| nearest(r, &centers).0).collect();
            lloyd(&scaled, init, k)
        };
        let next = match labels.take() {
            Some(prev) => {
                let warm = lloyd(&scaled, prev, k);
                if within_ss(&scaled, &fresh, k) < within_ss(&scaled, &warm, k) {
                    fresh
                } else {
                    warm
                }
            }
            None => fresh,
        };
        let dispersion = between_ss(&rows, &next, k);
        labels = Some(next);
        let Some(updated) = update_weights(&dispersion, s) else {
            // nothing separates the clusters; keep a feasible uniform vector
            let uniform = (1.0 / (dim as f64).sqrt()).min(s / dim as f64);
            weights = vec![uniform; dim];
            objective.push(0.0);
            break;
        };
        objective.push(updated.iter().zip(&dispersion).map(|(w, a)| w * a).sum());
        let change: f64 = updated.iter().zip(&weights).map(|(a, b)| (a - b).abs()).sum();
        weights = updated;
        if change < WEIGHT_TOL {
            break;
        }
    }

    let assignments = labels.unwrap();
    let (centroids, _) = means(&rows, &assignments, k);
    Ok(ClusterModel {
        k,
        s,
        seed,
        weights,
        centroids,
        assignments,
        objective,
    })
}

impl ClusterModel {
    /// Mean over test rows of the best weighted cosine to any centroid.
    pub fn alignment(&self, coefficients: &[DVector<f64>]) -> Result<f64> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("empty test set".into()));
        }
        let w = &self.weights;
        let inner = |x: &[f64], y: &[f64]| -> f64 {
            w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum()
        };
        let centroid_norms: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| inner(c, c).sqrt())
            .collect();
        let mut total = 0.0;
        for f in coefficients {
            if f.len() != w.len() {
                return Err(Error::DimensionMismatch { expected: w.len(), got: f.len() });
            }
            let f = f.as_slice();
            let fn_ = inner(f, f).sqrt();
            let best = self
                .centroids
                .iter()
                .zip(&centroid_norms)
                .map(|(c, &cn)| {
                    if fn_ > 0.0 && cn > 0.0 {
                        inner(f, c) / (fn_ * cn)
                    } else {
                        0.0
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max);
            total += best;
        }
        Ok(total / coefficients.len() as f64)
    }
}

/// Alignment score of test flows after transforming them with `dictionary`.
pub fn alignment_score(
    model: &ClusterModel,
    test: &[DVector<f64>],
    dictionary: &Dictionary,
) -> Result<f64> {
    let coefficients = test
        .iter()
        .map(|f| dictionary.analyze(f))
        .collect::<Result<Vec<_>>>()?;
    model.alignment(&coefficients)
}

/// Seeded shuffle into train and test index sets (each sorted).
///
/// The test set has `round((1 - ratio) * P)` elements, halves rounded up.
pub fn train_test_split(p: usize, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 items to split, got {p}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!("split ratio {ratio} outside (0, 1)")));
    }
    let n_test = (((1.0 - ratio) * p as f64) + 0.5).floor() as usize;
    let n_test = n_test.clamp(1, p - 1);
    let mut idx: Vec<usize> = (0..p).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = idx[..n_test].to_vec();
    let mut train = idx[n_test..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Box-Muller
    fn normal(rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }

    fn two_clouds(p_half: usize, noise_dims: usize, seed: u64) -> (DMatrix<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 2 + noise_dims;
        let mut m = DMatrix::zeros(2 * p_half, dim);
        let mut truth = Vec::new();
        for i in 0..2 * p_half {
            let class = i % 2;
            truth.push(class);
            let shift = if class == 0 { -6.0 } else { 6.0 };
            m[(i, 0)] = shift + 0.3 * normal(&mut rng);
            m[(i, 1)] = -shift + 0.3 * normal(&mut rng);
            for d in 2..dim {
                m[(i, d)] = normal(&mut rng);
            }
        }
        (m, truth)
    }

    fn same_partition(a: &[usize], b: &[usize]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x == &a[0]) == (y == &b[0]))
    }

    #[test]
    fn informative_features_get_the_weight() {
        let (x, truth) = two_clouds(6, 50, 3);
        let model = sparse_kmeans(&x, 2, 1.5, 11, DEFAULT_MAX_ITERS).unwrap();
        assert!(same_partition(&model.assignments, &truth));
        let informative = model.weights[0] + model.weights[1];
        let noise: f64 = model.weights[2..].iter().sum();
        assert!(informative > 0.9 * (informative + noise));

        // exhaustive search over all 2-partitions of the 12 points on the
        // informative coordinates
        let rows: Vec<Vec<f64>> = x.row_iter().map(|r| vec![r[0], r[1]]).collect();
        let mut best = (f64::INFINITY, 0u32);
        for mask in 1u32..(1 << 11) {
            let labels: Vec<usize> = (0..12).map(|i| ((mask >> i) & 1) as usize).collect();
            let w = within_ss(&rows, &labels, 2);
            if w < best.0 {
                best = (w, mask);
            }
        }
        let oracle: Vec<usize> = (0..12).map(|i| ((best.1 >> i) & 1) as usize).collect();
        assert!(same_partition(&model.assignments, &oracle));
    }

    #[test]
    fn weight_constraints_hold() {
        let (x, _) = two_clouds(10, 30, 5);
        for s in [1.0, 1.3, 2.0, 4.0] {
            let model = sparse_kmeans(&x, 2, s, 1, DEFAULT_MAX_ITERS).unwrap();
            let l1: f64 = model.weights.iter().sum();
            let l2: f64 = model.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            assert!(model.weights.iter().all(|&w| w >= 0.0));
            assert!(l2 <= 1.0 + 1e-10);
            assert!(l1 <= s + 1e-10, "l1 {l1} > s {s}");
            for pair in model.objective.windows(2) {
                assert!(pair[1] >= pair[0] - 1e-9 * pair[0].abs().max(1.0));
            }
        }
    }

    #[test]
    fn single_cluster_weights_stay_feasible() {
        let (x, _) = two_clouds(5, 16, 4);
        let model = sparse_kmeans(&x, 1, 1.0, 0, DEFAULT_MAX_ITERS).unwrap();
        let l1: f64 = model.weights.iter().sum();
        assert!((l1 - 1.0).abs() < 1e-12);
        assert!(model.weights.iter().all(|&w| w == model.weights[0]));
    }

    #[test]
    fn full_budget_leaves_the_constraint_inactive() {
        // identical columns have identical dispersion, so the unconstrained
        // maximizer is the uniform vector
        let base = [0.0, 0.2, 0.1, 5.0, 5.3, 5.1];
        let x = DMatrix::from_fn(6, 4, |i, _| base[i]);
        let s = 2.0;
        let model = sparse_kmeans(&x, 2, s, 0, DEFAULT_MAX_ITERS).unwrap();
        for &w in &model.weights {
            assert!((w - 0.5).abs() < 1e-12);
        }
        assert!(same_partition(&model.assignments, &[0, 0, 0, 1, 1, 1]));
        // and in general the weights are a+/||a+|| when s = sqrt(D)
        let w = update_weights(&[1.0, 2.0, -1.0, 2.0], 2.0).unwrap();
        assert_eq!(w, vec![1.0 / 3.0, 2.0 / 3.0, 0.0, 2.0 / 3.0]);
    }

    #[test]
    fn one_cluster_per_point() {
        let (x, _) = two_clouds(3, 4, 9);
        let model = sparse_kmeans(&x, 6, 1.5, 2, 5).unwrap();
        let mut sorted = model.assignments.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4, 5]);
        let rows: Vec<Vec<f64>> = x.row_iter().map(|r| r.iter().copied().collect()).collect();
        assert!(within_ss(&rows, &model.assignments, 6) < 1e-20);
    }

    #[test]
    fn parameter_errors() {
        let (x, _) = two_clouds(2, 2, 1);
        assert!(matches!(sparse_kmeans(&x, 5, 1.0, 0, 5), Err(Error::TooManyClusters { .. })));
        assert!(sparse_kmeans(&x, 2, 0.5, 0, 5).is_err());
        assert!(sparse_kmeans(&x, 2, 3.0, 0, 5).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, _) = two_clouds(8, 10, 4);
        let a = sparse_kmeans(&x, 3, 1.8, 42, 10).unwrap();
        let b = sparse_kmeans(&x, 3, 1.8, 42, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alignment_examples() {
        let model = ClusterModel {
            k: 2,
            s: 1.0,
            seed: 0,
            weights: vec![0.5, 0.5, 0.0],
            centroids: vec![vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]],
            assignments: vec![],
            objective: vec![],
        };
        let at_centroid = DVector::from_vec(vec![1.0, 2.0, 7.0]);
        assert!((model.alignment(&[at_centroid]).unwrap() - 1.0).abs() < 1e-12);
        // orthogonal under w to the first centroid, zero norm against the second
        let orth = DVector::from_vec(vec![2.0, -1.0, 0.0]);
        assert_eq!(model.alignment(&[orth]).unwrap(), 0.0);
        // a zero-norm centroid contributes 0 to the max
        let negative = DVector::from_vec(vec![-1.0, -2.0, 0.0]);
        assert_eq!(model.alignment(&[negative.clone()]).unwrap(), 0.0);
        let single = ClusterModel { k: 1, centroids: vec![vec![1.0, 2.0, 0.0]], ..model.clone() };
        assert!((single.alignment(&[negative]).unwrap() + 1.0).abs() < 1e-12);
        assert!(model.alignment(&[DVector::zeros(2)]).is_err());
    }

    #[test]
    fn splits() {
        let (train, test) = train_test_split(334, 0.75, 1).unwrap();
        assert_eq!((train.len(), test.len()), (250, 84));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..334).collect::<Vec<_>>());
        let (a, b) = train_test_split(2, 0.5, 3).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
        assert_eq!(train_test_split(334, 0.75, 1).unwrap(), (train, test));
        assert!(train_test_split(1, 0.5, 0).is_err());
        assert!(train_test_split(10, 1.0, 0).is_err());
    }
}
