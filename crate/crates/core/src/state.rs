//! Factorization state: the learned factors and weights of a solver run.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;
use crate::params::{HyperParams, INIT_FLOOR};

/// Tolerance for the simplex-sum invariants on α and the rows of W.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// All quantities learned by the solver.
///
/// For view `s`: `basis[s]` is `U⁽ˢ⁾` (`M_s × K`) and `coefficients[s]` is
/// `V⁽ˢ⁾` (`N × K`). `consensus` is the shared `V*` (`N × K`) on which
/// clustering is performed. `alpha[s]` weights view `s` as a whole;
/// `weights[[i, s]]` weights observation `i` within view `s`.
#[derive(Clone, Debug)]
pub struct FactorizationState {
    /// Per-view basis matrices `U⁽ˢ⁾`.
    pub basis: Vec<NonnegMatrix>,
    /// Per-view coefficient matrices `V⁽ˢ⁾`.
    pub coefficients: Vec<NonnegMatrix>,
    /// Consensus coefficient matrix `V*`.
    pub consensus: NonnegMatrix,
    /// View weights α (length `n_v`).
    pub alpha: Array1<f64>,
    /// Observation weights W (`N × n_v`); each row sums to 1.
    pub weights: Array2<f64>,
    /// Total objective after initialization and after each outer iteration.
    pub objective_history: Vec<f64>,
    /// Number of outer iterations actually executed.
    pub outer_iters_run: usize,
}

impl FactorizationState {
    /// Number of views this state covers.
    pub fn n_views(&self) -> usize {
        self.basis.len()
    }

    /// Number of observations.
    pub fn n_obs(&self) -> usize {
        self.consensus.dim().0
    }

    /// Factorization rank.
    pub fn rank(&self) -> usize {
        self.consensus.dim().1
    }

    /// Checks every structural invariant, returning a description of the
    /// first violation found.
    ///
    /// `alpha_on_simplex` should be false only for the fixed-α mode whose
    /// pinned weights deliberately do not sum to 1.
    pub fn check_invariants(&self, alpha_on_simplex: bool) -> std::result::Result<(), String> {
        let n_v = self.basis.len();
        if self.coefficients.len() != n_v {
            return Err(format!(
                "{} basis matrices but {} coefficient matrices",
                n_v,
                self.coefficients.len()
            ));
        }
        let (n, k) = self.consensus.dim();
        for (s, (u, v)) in self.basis.iter().zip(&self.coefficients).enumerate() {
            if u.dim().1 != k {
                return Err(format!("basis {s} has rank {} instead of {k}", u.dim().1));
            }
            if v.dim() != (n, k) {
                return Err(format!("coefficients {s} have shape {:?}, expected ({n}, {k})", v.dim()));
            }
        }
        if self.alpha.len() != n_v {
            return Err(format!("alpha has {} entries for {} views", self.alpha.len(), n_v));
        }
        if self.alpha.iter().any(|&a| !a.is_finite() || a < 0.0) {
            return Err("alpha entries must be finite and ≥ 0".to_string());
        }
        if alpha_on_simplex {
            let sum = self.alpha.sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(format!("alpha sums to {sum}, expected 1"));
            }
        }
        if self.weights.dim() != (n, n_v) {
            return Err(format!(
                "weights have shape {:?}, expected ({n}, {n_v})",
                self.weights.dim()
            ));
        }
        for (i, row) in self.weights.rows().into_iter().enumerate() {
            if row.iter().any(|&w| !w.is_finite() || w < 0.0) {
                return Err(format!("weight row {i} has a negative or non-finite entry"));
            }
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(format!("weight row {i} sums to {sum}, expected 1"));
            }
        }
        Ok(())
    }
}

/// Draws one value uniformly from the strictly positive interval
/// `(INIT_FLOOR, 1]`.
fn positive_uniform(rng: &mut ChaCha8Rng) -> f64 {
    // 1 − random() lies in (0, 1]; the affine map keeps it in (INIT_FLOOR, 1].
    INIT_FLOOR + (1.0 - rng.random::<f64>()) * (1.0 - INIT_FLOOR)
}

fn positive_uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| positive_uniform(rng))
}

/// Builds the seeded initial state for a dataset.
///
/// Factors are filled with uniform draws from `(INIT_FLOOR, 1]` (strict
/// positivity is required for the multiplicative updates to stay positive),
/// α starts uniform at `1/n_v`, and every observation-weight row starts
/// uniform at `1/n_v`. The draw order is fixed (all `U⁽ˢ⁾` in view order,
/// then all `V⁽ˢ⁾`, then `V*`), so a seed fully determines the state.
pub fn init_state(ds: &MultiViewDataset, hp: &HyperParams) -> Result<FactorizationState> {
    let dims = ds.view_dims();
    let limit = dims.iter().map(|&(m, n)| m.min(n)).min().expect("nonempty dataset");
    if hp.k >= limit {
        return Err(Error::RankTooLarge { k: hp.k, limit });
    }
    let n = ds.n_obs();
    let n_v = ds.n_views();
    let k = hp.k;
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut basis = Vec::with_capacity(n_v);
    for &(m, _) in &dims {
        basis.push(NonnegMatrix::new(positive_uniform_matrix(&mut rng, m, k), "basis")?);
    }
    let mut coefficients = Vec::with_capacity(n_v);
    for _ in 0..n_v {
        coefficients.push(NonnegMatrix::new(
            positive_uniform_matrix(&mut rng, n, k),
            "coefficients",
        )?);
    }
    let consensus = NonnegMatrix::new(positive_uniform_matrix(&mut rng, n, k), "consensus")?;
    let uniform = 1.0 / n_v as f64;
    Ok(FactorizationState {
        basis,
        coefficients,
        consensus,
        alpha: Array1::from_elem(n_v, uniform),
        weights: Array2::from_elem((n, n_v), uniform),
        objective_history: Vec::new(),
        outer_iters_run: 0,
    })
}
