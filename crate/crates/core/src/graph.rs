//! k-nearest-neighbor Gaussian-kernel graphs and their Laplacians.
//!
//! For a view `X` (`M × N`, observations in columns), the adjacency is
//!
//! ```text
//! a_ij = exp(−‖x_i − x_j‖² / σ²)   if j is one of i's knn nearest neighbors
//!        0                          otherwise,
//! ```
//!
//! symmetrized by the entrywise maximum `max(A, Aᵀ)` with a zero diagonal.
//! The degree matrix `D` collects row sums and `L = D − A` is the (positive
//! semidefinite) graph Laplacian used by the manifold regularizer.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Adjacency, degree, and Laplacian of one view's similarity graph.
///
/// The degree matrix is diagonal, so only its diagonal is stored.
#[derive(Clone, Debug)]
pub struct LaplacianTriple {
    /// Symmetric nonnegative adjacency with zero diagonal, entries in [0, 1].
    pub adjacency: Array2<f64>,
    /// Diagonal of the degree matrix: `degree[i] = Σ_j adjacency[i, j]`.
    pub degree: Array1<f64>,
    /// `L = D − A`.
    pub laplacian: Array2<f64>,
}

impl LaplacianTriple {
    /// Verifies the structural invariants, returning the first violation.
    ///
    /// Intended for tests and audits; construction via [`build_laplacian`]
    /// produces triples that satisfy these by construction on ordinary data.
    pub fn check_invariants(&self, knn: usize) -> std::result::Result<(), String> {
        let n = self.adjacency.nrows();
        if self.adjacency.ncols() != n {
            return Err("adjacency is not square".to_string());
        }
        for i in 0..n {
            if self.adjacency[[i, i]] != 0.0 {
                return Err(format!("adjacency diagonal entry {i} is nonzero"));
            }
            for j in 0..i {
                let a = self.adjacency[[i, j]];
                if a != self.adjacency[[j, i]] {
                    return Err(format!("adjacency is asymmetric at ({i}, {j})"));
                }
                if !(0.0..=1.0).contains(&a) {
                    return Err(format!("adjacency entry ({i}, {j}) = {a} outside [0, 1]"));
                }
            }
            let nonzeros = self.adjacency.row(i).iter().filter(|&&a| a != 0.0).count();
            if nonzeros < knn || nonzeros > 2 * knn {
                return Err(format!(
                    "row {i} has {nonzeros} neighbors, expected between {knn} and {}",
                    2 * knn
                ));
            }
            let row_sum: f64 = self.laplacian.row(i).sum();
            if row_sum.abs() > 1e-10 {
                return Err(format!("laplacian row {i} sums to {row_sum}"));
            }
        }
        Ok(())
    }
}

/// Builds the symmetrized kNN Gaussian adjacency for one view.
///
/// Observations are the columns of `view`. Ties in the nearest-neighbor
/// ranking are broken toward the lower observation index so the graph is
/// deterministic.
pub fn build_adjacency(view: &Array2<f64>, knn: usize, sigma_sq: f64) -> Result<Array2<f64>> {
    let n = view.ncols();
    if n < knn + 1 {
        return Err(Error::InsufficientObservations {
            context: "kNN graph construction",
            required: knn + 1,
            found: n,
        });
    }
    // Squared distances via the Gram matrix: ‖x_i − x_j‖² = g_ii + g_jj − 2 g_ij.
    let gram = view.t().dot(view);
    let sq_norms: Vec<f64> = (0..n).map(|i| gram[[i, i]]).collect();
    let mut adjacency = Array2::<f64>::zeros((n, n));
    let mut order: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        let dist = |j: usize| (sq_norms[i] + sq_norms[j] - 2.0 * gram[[i, j]]).max(0.0);
        // Sort by (distance, index); the index component is the tie-break.
        order.sort_by(|&a, &b| {
            dist(a).partial_cmp(&dist(b)).expect("distances are finite").then(a.cmp(&b))
        });
        for &j in order.iter().take(knn) {
            adjacency[[i, j]] = (-dist(j) / sigma_sq).exp();
        }
    }
    // Symmetrize with the entrywise maximum.
    for i in 0..n {
        for j in 0..i {
            let m = adjacency[[i, j]].max(adjacency[[j, i]]);
            adjacency[[i, j]] = m;
            adjacency[[j, i]] = m;
        }
    }
    Ok(adjacency)
}

/// Completes an adjacency matrix into its degree vector and Laplacian.
pub fn build_laplacian(adjacency: Array2<f64>) -> Result<LaplacianTriple> {
    let n = adjacency.nrows();
    if adjacency.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "build_laplacian",
            expected: "square adjacency".to_string(),
            found: format!("{}x{}", n, adjacency.ncols()),
        });
    }
    for i in 0..n {
        for j in 0..i {
            if adjacency[[i, j]] != adjacency[[j, i]] {
                return Err(Error::DimensionMismatch {
                    context: "build_laplacian",
                    expected: "symmetric adjacency".to_string(),
                    found: format!(
                        "a[{i},{j}] = {} but a[{j},{i}] = {}",
                        adjacency[[i, j]],
                        adjacency[[j, i]]
                    ),
                });
            }
        }
        if adjacency[[i, i]] != 0.0 {
            return Err(Error::DimensionMismatch {
                context: "build_laplacian",
                expected: "zero diagonal".to_string(),
                found: format!("a[{i},{i}] = {}", adjacency[[i, i]]),
            });
        }
    }
    let degree: Array1<f64> = adjacency.rows().into_iter().map(|r| r.sum()).collect();
    let mut laplacian = -&adjacency;
    for i in 0..n {
        laplacian[[i, i]] = degree[i];
    }
    Ok(LaplacianTriple { adjacency, degree, laplacian })
}

/// Convenience: adjacency and Laplacian for one view in a single call.
pub fn laplacian_for_view(view: &Array2<f64>, knn: usize, sigma_sq: f64) -> Result<LaplacianTriple> {
    build_laplacian(build_adjacency(view, knn, sigma_sq)?)
}
