//! Dense-matrix utilities shared across the crate.
//!
//! Everything here operates on `ndarray::Array2<f64>` in standard (row-major)
//! layout. The only linear-algebra routine that is not a plain loop or a
//! BLAS-style product is the symmetric eigendecomposition, which is delegated
//! to `nalgebra` behind [`symmetric_eigen_ascending`] so callers never touch a
//! second matrix type.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// A dense matrix whose entries are finite and nonnegative.
///
/// The constructor validates every entry, so holding a `NonnegMatrix` is a
/// proof that the data satisfies the nonnegativity constraint of the
/// factorization model. Internal solver loops work on raw arrays (positivity
/// there is preserved by the multiplicative update rules) and wrap their final
/// output back into this type.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegMatrix(Array2<f64>);

impl NonnegMatrix {
    /// Validates and wraps a matrix. `context` names the matrix in errors
    /// (for example `"basis U[0]"`).
    pub fn new(matrix: Array2<f64>, context: &str) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::EmptyMatrix { context: context.to_string() });
        }
        for ((row, col), &value) in matrix.indexed_iter() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry {
                    context: context.to_string(),
                    row,
                    col,
                    value,
                });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry {
                    context: context.to_string(),
                    row,
                    col,
                    value,
                });
            }
        }
        Ok(NonnegMatrix(matrix))
    }

    /// Read-only access to the wrapped array.
    pub fn array(&self) -> &Array2<f64> {
        &self.0
    }

    /// Unwraps into the underlying array.
    pub fn into_array(self) -> Array2<f64> {
        self.0
    }

    /// `(rows, cols)` of the wrapped array.
    pub fn dim(&self) -> (usize, usize) {
        self.0.dim()
    }
}

/// Squared Frobenius norm `sum_ij m_ij^2`.
pub fn frob_sq(matrix: &Array2<f64>) -> f64 {
    matrix.iter().map(|&x| x * x).sum()
}

/// Squared Frobenius distance `||a - b||_F^2` without materializing `a - b`.
pub fn frob_dist_sq(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Product `a · b` that skips zero entries of `a`.
///
/// `a` is stored dense but is typically a k-nearest-neighbor adjacency matrix
/// with a handful of nonzeros per row, so scanning for nonzeros and
/// accumulating only those rows of `b` is far cheaper than a dense product.
/// Both inputs must be in standard layout.
pub fn matmul_skipping_zeros(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (n, m) = a.dim();
    let (mb, k) = b.dim();
    debug_assert_eq!(m, mb, "inner dimensions must agree");
    let mut out = Array2::<f64>::zeros((n, k));
    let a_slice = a.as_slice().expect("adjacency must be in standard layout");
    let b_slice = b.as_slice().expect("rhs must be in standard layout");
    let out_slice = out.as_slice_mut().expect("freshly allocated output is contiguous");
    for i in 0..n {
        let a_row = &a_slice[i * m..(i + 1) * m];
        let out_row = &mut out_slice[i * k..(i + 1) * k];
        for (j, &aij) in a_row.iter().enumerate() {
            if aij != 0.0 {
                let b_row = &b_slice[j * k..(j + 1) * k];
                for t in 0..k {
                    out_row[t] += aij * b_row[t];
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted ascending.
///
/// Returns `(eigenvalues, eigenvectors)` where column `c` of the eigenvector
/// matrix corresponds to `eigenvalues[c]`. Fails if the iteration does not
/// converge or produces non-finite values.
pub fn symmetric_eigen_ascending(matrix: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (n, m) = matrix.dim();
    if n != m {
        return Err(Error::EigenFailure {
            reason: format!("matrix is {n}x{m}, not square"),
        });
    }
    let dense = nalgebra::DMatrix::from_fn(n, n, |r, c| matrix[[r, c]]);
    let eigen = nalgebra::SymmetricEigen::try_new(dense, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenFailure {
            reason: "symmetric eigensolver did not converge".to_string(),
        })?;
    if eigen.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure {
            reason: "eigensolver produced non-finite eigenvalues".to_string(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .expect("eigenvalues are finite")
    });
    let values = Array1::from_iter(order.iter().map(|&i| eigen.eigenvalues[i]));
    let vectors =
        Array2::from_shape_fn((n, n), |(r, c)| eigen.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn nonneg_matrix_accepts_valid_entries() {
        let m = NonnegMatrix::new(array![[0.0, 1.5], [2.0, 3.0]], "test").unwrap();
        assert_eq!(m.dim(), (2, 2));
    }

    #[test]
    fn nonneg_matrix_rejects_negative_entry() {
        let err = NonnegMatrix::new(array![[0.0, -1.0]], "test").unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { row: 0, col: 1, .. }));
    }

    #[test]
    fn nonneg_matrix_rejects_non_finite_entry() {
        let err = NonnegMatrix::new(array![[f64::NAN]], "test").unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { .. }));
    }

    #[test]
    fn nonneg_matrix_rejects_empty() {
        let err = NonnegMatrix::new(Array2::zeros((0, 3)), "test").unwrap_err();
        assert!(matches!(err, Error::EmptyMatrix { .. }));
    }

    #[test]
    fn frob_sq_matches_hand_value() {
        // 1 + 4 + 9 + 16 = 30
        assert_abs_diff_eq!(frob_sq(&array![[1.0, 2.0], [3.0, 4.0]]), 30.0);
    }

    #[test]
    fn matmul_skipping_zeros_matches_dense_product() {
        let a = array![[0.0, 2.0, 0.0], [1.0, 0.0, 3.0]];
        let b = array![[1.0, 4.0], [2.0, 5.0], [3.0, 6.0]];
        let sparse = matmul_skipping_zeros(&a, &b);
        let dense = a.dot(&b);
        assert_abs_diff_eq!(
            frob_dist_sq(&sparse, &dense),
            0.0,
            epsilon = 1e-30
        );
    }

    #[test]
    fn symmetric_eigen_recovers_diagonal() {
        let m = array![[3.0, 0.0], [0.0, 1.0]];
        let (values, vectors) = symmetric_eigen_ascending(&m).unwrap();
        assert_abs_diff_eq!(values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[1], 3.0, epsilon = 1e-12);
        // Column 0 pairs with eigenvalue 1, so it points along e2.
        assert_abs_diff_eq!(vectors[[1, 0]].abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vectors[[0, 1]].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_eigen_reconstructs_matrix() {
        let m = array![[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]];
        let (values, vectors) = symmetric_eigen_ascending(&m).unwrap();
        let lambda = Array2::from_diag(&values);
        let rebuilt = vectors.dot(&lambda).dot(&vectors.t());
        assert!(frob_dist_sq(&rebuilt, &m) < 1e-20);
    }
}
