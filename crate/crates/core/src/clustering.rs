//! Cluster extraction from the consensus matrix and clustering evaluation.
//!
//! Labels come either from the largest consensus entry per observation
//! ([`argmax_assign`]) or from spectral clustering of the consensus rows
//! ([`spectral_assign`]). Agreement with reference labels is summarized by
//! six standard scores: accuracy under optimal label matching, normalized
//! mutual information, and pair-counting precision/recall/F-score/adjusted
//! Rand index.

use ndarray::{Array1, Array2};
use pathfinding::matrix::Matrix;
use pathfinding::prelude::kuhn_munkres;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::build_adjacency;
use crate::matrix::symmetric_eigen_ascending;
use crate::params::{DEFAULT_KNN, DEFAULT_SIGMA_SQ};

/// Maximum Lloyd iterations for k-means.
pub const KMEANS_MAX_ITERS: usize = 300;

/// Predicted labels plus the six agreement scores against a reference.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusteringReport {
    /// Predicted label per observation.
    pub predicted: Vec<usize>,
    /// Accuracy under the best one-to-one cluster-to-class matching.
    pub acc: f64,
    /// Mutual information normalized by `sqrt(H(pred) · H(true))`.
    pub nmi: f64,
    /// Pair-counting precision.
    pub precision: f64,
    /// Pair-counting recall.
    pub recall: f64,
    /// Harmonic mean of precision and recall.
    pub fscore: f64,
    /// Adjusted Rand index (chance-corrected, in [−1, 1]).
    pub adj_ri: f64,
}

/// Assigns each observation to the column of its largest consensus entry.
///
/// Ties go to the lowest column index.
pub fn argmax_assign(consensus: &Array2<f64>) -> Vec<usize> {
    consensus
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (k, &value) in row.iter().enumerate() {
                if value > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Result of a k-means run.
#[derive(Clone, Debug)]
pub struct KmeansFit {
    /// Cluster index per point.
    pub assignments: Vec<usize>,
    /// Final centroids (k × d).
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Seeded k-means++ initialization followed by Lloyd iterations.
///
/// `points` has one row per point. Iteration stops when assignments
/// stabilize or after [`KMEANS_MAX_ITERS`] rounds; a cluster that empties
/// keeps its previous centroid. Deterministic per seed.
pub fn kmeans(points: &Array2<f64>, k: usize, seed: u64) -> Result<KmeansFit> {
    let (n, d) = points.dim();
    if k == 0 || k > n {
        return Err(Error::TooFewPoints { k, points: n });
    }
    // Transposed or sliced inputs are copied once so the inner loops can
    // borrow rows as plain slices.
    let standard;
    let points = if points.is_standard_layout() {
        points
    } else {
        standard = points.as_standard_layout().into_owned();
        &standard
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row = |i: usize| points.row(i).to_slice().expect("points are standard layout");

    // k-means++: spread the initial centroids proportionally to squared
    // distance from the nearest centroid chosen so far.
    let mut centroid_rows: Vec<usize> = vec![rng.random_range(0..n)];
    let mut nearest_sq: Vec<f64> =
        (0..n).map(|i| squared_distance(row(i), row(centroid_rows[0]))).collect();
    while centroid_rows.len() < k {
        let total: f64 = nearest_sq.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d_sq) in nearest_sq.iter().enumerate() {
                target -= d_sq;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining mass is zero (duplicate points); take the first
            // index not already chosen so centroids stay distinct rows.
            (0..n).find(|i| !centroid_rows.contains(i)).unwrap_or(0)
        };
        centroid_rows.push(next);
        for i in 0..n {
            nearest_sq[i] = nearest_sq[i].min(squared_distance(row(i), row(next)));
        }
    }
    let mut centroids = Array2::zeros((k, d));
    for (c, &i) in centroid_rows.iter().enumerate() {
        centroids.row_mut(c).assign(&points.row(i));
    }

    let mut assignments = vec![0usize; n];
    for _ in 0..KMEANS_MAX_ITERS {
        // Assignment step (ties to the lower centroid index).
        let mut changed = false;
        for i in 0..n {
            let mut best = 0;
            let mut best_sq = f64::INFINITY;
            for c in 0..k {
                let d_sq = squared_distance(
                    row(i),
                    centroids.row(c).to_slice().expect("centroids are standard layout"),
                );
                if d_sq < best_sq {
                    best_sq = d_sq;
                    best = c;
                }
            }
            if assignments[i] != best {
                assignments[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        // Update step.
        let mut sums = Array2::<f64>::zeros((k, d));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let c = assignments[i];
            counts[c] += 1;
            let mut target = sums.row_mut(c);
            target += &points.row(i);
        }
        for c in 0..k {
            if counts[c] > 0 {
                let mean = sums.row(c).mapv(|v| v / counts[c] as f64);
                centroids.row_mut(c).assign(&mean);
            }
            // An empty cluster keeps its previous centroid.
        }
    }

    let inertia = (0..n)
        .map(|i| {
            squared_distance(
                row(i),
                centroids.row(assignments[i]).to_slice().expect("standard layout"),
            )
        })
        .sum();
    Ok(KmeansFit { assignments, centroids, inertia })
}

/// Spectral clustering of the consensus rows.
///
/// Builds the Gaussian kNN similarity graph over the rows of `V*` (same
/// kernel and neighbor defaults as the view graphs, with the neighbor count
/// capped at N−1 for small inputs), forms the symmetric normalized Laplacian
/// `I − D^{−1/2} A D^{−1/2}`, embeds into its bottom-K eigenvector space
/// with row normalization, and clusters the embedding with seeded k-means.
pub fn spectral_assign(consensus: &Array2<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = consensus.nrows();
    if k == 0 || k > n {
        return Err(Error::TooFewPoints { k, points: n });
    }
    let knn = DEFAULT_KNN.min(n.saturating_sub(1)).max(1);
    // The graph builder treats columns as observations; rows of V* are the
    // points here, so hand it the transpose.
    let adjacency = build_adjacency(&consensus.t().to_owned(), knn, DEFAULT_SIGMA_SQ)?;
    let degree: Array1<f64> = adjacency.rows().into_iter().map(|r| r.sum()).collect();
    if degree.iter().any(|&d| d <= 0.0) {
        return Err(Error::EigenFailure {
            reason: "similarity graph has an isolated vertex".to_string(),
        });
    }
    let inv_sqrt = degree.mapv(|d| 1.0 / d.sqrt());
    let mut lsym = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let off = -adjacency[[i, j]] * inv_sqrt[i] * inv_sqrt[j];
            lsym[[i, j]] = if i == j { 1.0 + off } else { off };
        }
    }
    let (_, vectors) = symmetric_eigen_ascending(&lsym)?;
    let mut embedding = vectors.slice(ndarray::s![.., 0..k]).to_owned();
    for mut row in embedding.rows_mut() {
        let norm = row.iter().map(|&x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|x| x / norm);
        }
    }
    Ok(kmeans(&embedding, k, seed)?.assignments)
}

/// Contingency table with compacted label indices.
struct Contingency {
    counts: Vec<Vec<u64>>, // [predicted][truth]
    predicted_sizes: Vec<u64>,
    truth_sizes: Vec<u64>,
    n: u64,
}

fn compact_labels(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::BTreeMap::new();
    let mut compact = Vec::with_capacity(labels.len());
    for &label in labels {
        let next = map.len();
        let id = *map.entry(label).or_insert(next);
        compact.push(id);
    }
    (compact, map.len())
}

fn contingency(predicted: &[usize], truth: &[usize]) -> Contingency {
    let (pred, k_pred) = compact_labels(predicted);
    let (tru, k_true) = compact_labels(truth);
    let mut counts = vec![vec![0u64; k_true]; k_pred];
    for (&p, &t) in pred.iter().zip(&tru) {
        counts[p][t] += 1;
    }
    let predicted_sizes = counts.iter().map(|row| row.iter().sum()).collect();
    let truth_sizes = (0..k_true)
        .map(|t| counts.iter().map(|row| row[t]).sum())
        .collect();
    Contingency { counts, predicted_sizes, truth_sizes, n: predicted.len() as u64 }
}

fn pairs(count: u64) -> u64 {
    count * count.saturating_sub(1) / 2
}

/// Scores predicted labels against reference labels.
///
/// Conventions for degenerate inputs: with a single observation, or when
/// neither labeling contains any co-clustered pair, the pair-counting
/// metrics are vacuously perfect; NMI of two zero-entropy (single-cluster)
/// labelings is 1, and 0 when exactly one side has zero entropy.
pub fn score(predicted: &[usize], truth: &[usize]) -> Result<ClusteringReport> {
    if predicted.len() != truth.len() {
        return Err(Error::LabelMismatch {
            reason: format!("{} predicted labels vs {} truth labels", predicted.len(), truth.len()),
        });
    }
    if predicted.is_empty() {
        return Err(Error::LabelMismatch { reason: "empty label vectors".to_string() });
    }
    let table = contingency(predicted, truth);
    let n = table.n as f64;

    // Accuracy: optimal one-to-one matching on the confusion matrix,
    // padded square so the assignment problem is well-posed.
    let size = table.counts.len().max(table.truth_sizes.len());
    let weights = Matrix::from_fn(size, size, |(i, j)| {
        *table
            .counts
            .get(i)
            .and_then(|row| row.get(j))
            .unwrap_or(&0) as i64
    });
    let (matched, _) = kuhn_munkres(&weights);
    let acc = matched as f64 / n;

    // NMI with natural logarithms.
    let h_pred: f64 = entropy(&table.predicted_sizes, n);
    let h_true: f64 = entropy(&table.truth_sizes, n);
    let mut mutual = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            if count > 0 {
                let p_ij = count as f64 / n;
                let p_i = table.predicted_sizes[i] as f64 / n;
                let q_j = table.truth_sizes[j] as f64 / n;
                mutual += p_ij * (p_ij / (p_i * q_j)).ln();
            }
        }
    }
    let nmi = if h_pred > 0.0 && h_true > 0.0 {
        (mutual / (h_pred * h_true).sqrt()).clamp(0.0, 1.0)
    } else if h_pred == 0.0 && h_true == 0.0 {
        1.0
    } else {
        0.0
    };

    // Pair counting.
    let tp: u64 = table.counts.iter().flatten().map(|&c| pairs(c)).sum();
    let tp_fp: u64 = table.predicted_sizes.iter().map(|&c| pairs(c)).sum();
    let tp_fn: u64 = table.truth_sizes.iter().map(|&c| pairs(c)).sum();
    let precision = if tp_fp > 0 { tp as f64 / tp_fp as f64 } else { 1.0 };
    let recall = if tp_fn > 0 { tp as f64 / tp_fn as f64 } else { 1.0 };
    let fscore = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };

    // Adjusted Rand index.
    let total_pairs = pairs(table.n) as f64;
    let adj_ri = if total_pairs == 0.0 {
        1.0
    } else {
        let expected = tp_fp as f64 * tp_fn as f64 / total_pairs;
        let maximum = (tp_fp as f64 + tp_fn as f64) / 2.0;
        if (maximum - expected).abs() < f64::EPSILON * maximum.max(1.0) {
            1.0
        } else {
            (tp as f64 - expected) / (maximum - expected)
        }
    };

    Ok(ClusteringReport {
        predicted: predicted.to_vec(),
        acc,
        nmi,
        precision,
        recall,
        fscore,
        adj_ri,
    })
}

fn entropy(sizes: &[u64], n: f64) -> f64 {
    sizes
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mean of a slice (used by sweep summaries).
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
