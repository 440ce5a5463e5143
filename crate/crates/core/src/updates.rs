//! Update rules and objective evaluation for the weighted multi-view model.
//!
//! The model factorizes each view `X⁽ˢ⁾ ≈ U⁽ˢ⁾ V⁽ˢ⁾ᵀ` and couples the views
//! through a consensus matrix `V*`, minimizing
//!
//! ```text
//! O = Σ_s ‖(X⁽ˢ⁾ − U⁽ˢ⁾V⁽ˢ⁾ᵀ) Diag(w⁽ˢ⁾)‖²_F
//!   + Σ_s α_s^p ‖V⁽ˢ⁾Q⁽ˢ⁾ − V*‖²_F
//!   + β Σ_s tr(V⁽ˢ⁾ᵀ L⁽ˢ⁾ V⁽ˢ⁾)
//! ```
//!
//! subject to `U, V, V* ≥ 0`, `Σ_s α_s = 1`, `α ≥ 0`, and `Σ_s w_i⁽ˢ⁾ = 1`
//! per observation. `Q⁽ˢ⁾` is the diagonal matrix of column sums of `U⁽ˢ⁾`,
//! which puts the per-view coefficient matrices on a common scale before
//! they are compared to the consensus.
//!
//! `U` and `V` move by multiplicative updates (positivity-preserving,
//! objective-nonincreasing); `α`, `w`, and `V*` have closed-form minimizers.
//! Throughout, `Diag(w)` and `Q` are applied as vector scalings — the full
//! diagonal matrices are never materialized.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::graph::LaplacianTriple;
use crate::matrix::matmul_skipping_zeros;

/// Everything the per-view update rules need to see: the view's data and
/// factors plus read-only snapshots of the shared quantities.
#[derive(Clone, Copy)]
pub struct ViewContext<'a> {
    /// The view's data matrix `X⁽ˢ⁾` (`M_s × N`).
    pub x: &'a Array2<f64>,
    /// Basis `U⁽ˢ⁾` (`M_s × K`).
    pub u: &'a Array2<f64>,
    /// Coefficients `V⁽ˢ⁾` (`N × K`).
    pub v: &'a Array2<f64>,
    /// Consensus `V*` (`N × K`), snapshot from the enclosing outer iteration.
    pub consensus: &'a Array2<f64>,
    /// This view's weight `α_s`.
    pub alpha_s: f64,
    /// Exponent on the view weights.
    pub p: f64,
    /// This view's observation weights `w⁽ˢ⁾` (length `N`).
    pub w: &'a Array1<f64>,
    /// The view's similarity graph; `None` when the manifold term is off.
    pub laplacian: Option<&'a LaplacianTriple>,
    /// Manifold regularization strength.
    pub beta: f64,
    /// Additive guard on update denominators.
    pub denom_guard: f64,
}

impl ViewContext<'_> {
    /// Checks mutual dimension consistency.
    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.x.dim();
        let k = self.u.ncols();
        let mismatch = |context: &'static str, expected: String, found: String| {
            Err(Error::DimensionMismatch { context, expected, found })
        };
        if self.u.nrows() != m {
            return mismatch("ViewContext basis", format!("{m} rows"), format!("{}", self.u.nrows()));
        }
        if self.v.dim() != (n, k) {
            return mismatch("ViewContext coefficients", format!("({n}, {k})"), format!("{:?}", self.v.dim()));
        }
        if self.consensus.dim() != (n, k) {
            return mismatch("ViewContext consensus", format!("({n}, {k})"), format!("{:?}", self.consensus.dim()));
        }
        if self.w.len() != n {
            return mismatch("ViewContext weights", format!("{n} entries"), format!("{}", self.w.len()));
        }
        if let Some(lap) = self.laplacian {
            if lap.adjacency.dim() != (n, n) {
                return mismatch("ViewContext laplacian", format!("({n}, {n})"), format!("{:?}", lap.adjacency.dim()));
            }
        }
        Ok(())
    }
}

/// `α_s^p`, the effective coupling strength of a view.
#[inline]
pub fn alpha_pow(alpha_s: f64, p: f64) -> f64 {
    alpha_s.powf(p)
}

/// Column sums of a basis matrix — the diagonal of `Q`.
pub fn column_sums(u: &Array2<f64>) -> Array1<f64> {
    u.sum_axis(Axis(0))
}

/// One multiplicative update of the basis `U⁽ˢ⁾`.
///
/// ```text
/// u_ik ← u_ik · ( [X Diag²(w) V]_ik + α_s^p Σ_j v_jk v*_jk )
///              / ( [U Vᵀ Diag²(w) V]_ik + α_s^p (Σ_l u_lk)(Σ_j v²_jk) + guard )
/// ```
///
/// Strictly positive input entries stay strictly positive: the numerator and
/// denominator are nonnegative and the guard keeps the denominator positive.
pub fn update_basis(ctx: &ViewContext) -> Array2<f64> {
    let ap = alpha_pow(ctx.alpha_s, ctx.p);
    let wsq = ctx.w.mapv(|w| w * w);
    let wsq_col = wsq.view().insert_axis(Axis(1));

    // [X Diag²(w) V]: scale observation columns of X by w², then multiply V.
    let xw2 = ctx.x * &wsq;
    let mut numerator = xw2.dot(ctx.v);

    // [U Vᵀ Diag²(w) V] via the K×K Gram matrix Vᵀ Diag²(w) V.
    let vw = ctx.v * &wsq_col;
    let gram = ctx.v.t().dot(&vw);
    let mut denominator = ctx.u.dot(&gram);

    if ap != 0.0 {
        let cross = (ctx.v * ctx.consensus).sum_axis(Axis(0)) * ap;
        let u_col_sums = column_sums(ctx.u);
        let v_sq_col_sums = ctx.v.mapv(|x| x * x).sum_axis(Axis(0));
        let pull = u_col_sums * v_sq_col_sums * ap;
        numerator += &cross;
        denominator += &pull;
    }
    denominator += ctx.denom_guard;

    let updated = ctx.u * &(numerator / denominator);
    debug_assert!(updated.iter().all(|&x| x.is_finite() && x >= 0.0));
    updated
}

/// One multiplicative update of the coefficients `V⁽ˢ⁾`.
///
/// ```text
/// v_jk ← v_jk · ( [Diag²(w) Xᵀ U]_jk + α_s^p [V* Qᵀ]_jk + β [A V]_jk )
///              / ( [Diag²(w) V Uᵀ U]_jk + α_s^p [V Q Qᵀ]_jk + β [D V]_jk + guard )
/// ```
///
/// `Q`-products are column scalings by the basis column sums; `D V` is a row
/// scaling by the degrees; `A V` exploits the sparsity of the kNN adjacency.
pub fn update_coefficients(ctx: &ViewContext) -> Array2<f64> {
    let ap = alpha_pow(ctx.alpha_s, ctx.p);
    let wsq = ctx.w.mapv(|w| w * w);
    let wsq_col = wsq.view().insert_axis(Axis(1));

    // [Diag²(w) Xᵀ U]: rows of XᵀU scaled by w².
    let xtu = ctx.x.t().dot(ctx.u);
    let mut numerator = &xtu * &wsq_col;

    // [Diag²(w) V Uᵀ U].
    let gram_u = ctx.u.t().dot(ctx.u);
    let vw = ctx.v * &wsq_col;
    let mut denominator = vw.dot(&gram_u);

    if ap != 0.0 {
        let q = column_sums(ctx.u);
        numerator += &((ctx.consensus * &q) * ap); // [V* Qᵀ]
        let q_sq = &q * &q;
        denominator += &((ctx.v * &q_sq) * ap); // [V Q Qᵀ]
    }
    if let Some(lap) = ctx.laplacian {
        if ctx.beta != 0.0 {
            numerator += &(matmul_skipping_zeros(&lap.adjacency, ctx.v) * ctx.beta);
            let degree_col = lap.degree.view().insert_axis(Axis(1));
            denominator += &((ctx.v * &degree_col) * ctx.beta);
        }
    }
    denominator += ctx.denom_guard;

    let updated = ctx.v * &(numerator / denominator);
    debug_assert!(updated.iter().all(|&x| x.is_finite() && x >= 0.0));
    updated
}

/// Closed-form view weights from consensus distances.
///
/// Minimizes `Σ_s α_s^p d_s` over the probability simplex, where
/// `d_s = ‖V⁽ˢ⁾Q⁽ˢ⁾ − V*‖²_F`. For `p > 1` the minimizer is
/// `α_s = 1 / Σ_{s'} (d_s/d_{s'})^{1/(p−1)}`; at `p = 1` it degenerates to
/// the indicator of the smallest distance (ties to the lowest index).
///
/// Views at exactly zero distance would take unbounded relative weight; as
/// the continuous limit, weight 1 is split equally over the zero-distance
/// views (uniform over all views when every distance is zero).
pub fn solve_view_weights(distances: &Array1<f64>, p: f64) -> Array1<f64> {
    debug_assert!(distances.iter().all(|&d| d.is_finite() && d >= 0.0));
    debug_assert!(p >= 1.0);
    let n_v = distances.len();
    let zero_count = distances.iter().filter(|&&d| d == 0.0).count();
    if zero_count > 0 {
        let share = 1.0 / zero_count as f64;
        return distances.mapv(|d| if d == 0.0 { share } else { 0.0 });
    }
    if p == 1.0 {
        let mut best = 0;
        for (s, &d) in distances.iter().enumerate() {
            if d < distances[best] {
                best = s;
            }
        }
        let mut alpha = Array1::zeros(n_v);
        alpha[best] = 1.0;
        return alpha;
    }
    let exponent = 1.0 / (p - 1.0);
    Array1::from_shape_fn(n_v, |s| {
        let denom: f64 = distances.iter().map(|&d| (distances[s] / d).powf(exponent)).sum();
        // denom ≥ 1 always (the s' = s term is 1); an infinite denominator
        // correctly sends this view's weight to 0.
        1.0 / denom
    })
}

/// Closed-form observation weights from per-view column residuals.
///
/// `residuals` has one row per view and one column per observation:
/// `residuals[[s, i]] = Σ_j (X⁽ˢ⁾ − U⁽ˢ⁾V⁽ˢ⁾ᵀ)²_{j,i}`. For each observation
/// the returned row minimizes `Σ_s w_s² r_s` over the simplex:
/// `w_i⁽ˢ⁾ = ( Σ_{s'} r_{s,i} / r_{s',i} )⁻¹`, so better-reconstructed views
/// earn larger weight. A view with exactly zero residual receives the whole
/// weight (split equally if several views are exact).
pub fn solve_observation_weights(residuals: &Array2<f64>) -> Array2<f64> {
    debug_assert!(residuals.iter().all(|&r| r.is_finite() && r >= 0.0));
    let (n_v, n) = residuals.dim();
    let mut weights = Array2::zeros((n, n_v));
    for i in 0..n {
        let column = residuals.column(i);
        let zero_count = column.iter().filter(|&&r| r == 0.0).count();
        if zero_count > 0 {
            let share = 1.0 / zero_count as f64;
            for s in 0..n_v {
                weights[[i, s]] = if column[s] == 0.0 { share } else { 0.0 };
            }
            continue;
        }
        for s in 0..n_v {
            let denom: f64 = column.iter().map(|&r| column[s] / r).sum();
            weights[[i, s]] = 1.0 / denom;
        }
    }
    weights
}

/// Closed-form consensus update.
///
/// `V* = Σ_s α_s^p V⁽ˢ⁾Q⁽ˢ⁾ / Σ_s α_s^p` — the α-weighted average of the
/// scale-aligned coefficient matrices, hence always a convex combination of
/// them.
pub fn solve_consensus(
    coefficients: &[Array2<f64>],
    q_diags: &[Array1<f64>],
    alpha: &Array1<f64>,
    p: f64,
) -> Result<Array2<f64>> {
    debug_assert_eq!(coefficients.len(), q_diags.len());
    debug_assert_eq!(coefficients.len(), alpha.len());
    let (n, k) = coefficients[0].dim();
    let mut numerator = Array2::<f64>::zeros((n, k));
    let mut denominator = 0.0;
    for ((v, q), &a) in coefficients.iter().zip(q_diags).zip(alpha.iter()) {
        let ap = alpha_pow(a, p);
        if ap != 0.0 {
            numerator += &((v * q) * ap);
            denominator += ap;
        }
    }
    if denominator < 1e-300 {
        return Err(Error::DegenerateAlpha { sum: denominator });
    }
    Ok(numerator / denominator)
}

/// Per-observation squared reconstruction residuals of one view.
///
/// Entry `i` is `Σ_j (X − U Vᵀ)²_{j,i}` — the unweighted squared error of
/// observation `i`'s reconstruction.
pub fn column_residuals(x: &Array2<f64>, u: &Array2<f64>, v: &Array2<f64>) -> Array1<f64> {
    let recon = u.dot(&v.t());
    let diff = x - &recon;
    diff.mapv(|e| e * e).sum_axis(Axis(0))
}

/// `tr(Vᵀ L V)` for one view, computed as `Σ (V ∘ DV) − Σ (V ∘ AV)`.
pub fn manifold_trace(v: &Array2<f64>, lap: &LaplacianTriple) -> f64 {
    let av = matmul_skipping_zeros(&lap.adjacency, v);
    let degree_col = lap.degree.view().insert_axis(Axis(1));
    let dv = v * &degree_col;
    (v * &dv).sum() - (v * &av).sum()
}

/// `‖V Q − V*‖²_F` for one view, with `Q` applied as a column scaling.
pub fn consensus_distance(v: &Array2<f64>, q: &Array1<f64>, consensus: &Array2<f64>) -> f64 {
    let vq = v * q;
    crate::matrix::frob_dist_sq(&vq, consensus)
}

/// The single-view objective `O₀` — view `s`'s summand of the total
/// objective. This is the quantity whose decrease drives the inner
/// (per-view) convergence test.
pub fn objective_single_view(ctx: &ViewContext) -> f64 {
    let ap = alpha_pow(ctx.alpha_s, ctx.p);
    let colres = column_residuals(ctx.x, ctx.u, ctx.v);
    let wsq = ctx.w.mapv(|w| w * w);
    let mut total = wsq.dot(&colres);
    if ap != 0.0 {
        total += ap * consensus_distance(ctx.v, &column_sums(ctx.u), ctx.consensus);
    }
    if let Some(lap) = ctx.laplacian {
        if ctx.beta != 0.0 {
            total += ctx.beta * manifold_trace(ctx.v, lap);
        }
    }
    total
}

/// The three summand groups of the total objective, reported separately so
/// runs can show where the objective mass sits (and ablation modes can prove
/// their manifold term is genuinely off).
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ObjectiveBreakdown {
    /// `Σ_s ‖(X⁽ˢ⁾ − U⁽ˢ⁾V⁽ˢ⁾ᵀ) Diag(w⁽ˢ⁾)‖²_F`
    pub reconstruction: f64,
    /// `Σ_s α_s^p ‖V⁽ˢ⁾Q⁽ˢ⁾ − V*‖²_F`
    pub consensus: f64,
    /// `β Σ_s tr(V⁽ˢ⁾ᵀ L⁽ˢ⁾ V⁽ˢ⁾)`
    pub manifold: f64,
}

impl ObjectiveBreakdown {
    /// Sum of the three groups.
    pub fn total(&self) -> f64 {
        self.reconstruction + self.consensus + self.manifold
    }
}

/// Evaluates the total objective with its decomposition, from raw arrays.
///
/// `laplacians` must be `Some` with one triple per view whenever
/// `beta != 0`. All inputs are read-only; the views must already be
/// normalized if the value is to be compared with a solver trace.
#[allow(clippy::too_many_arguments)]
pub fn objective_breakdown(
    views: &[Array2<f64>],
    basis: &[Array2<f64>],
    coefficients: &[Array2<f64>],
    consensus: &Array2<f64>,
    alpha: &Array1<f64>,
    weights: &Array2<f64>,
    laplacians: Option<&[LaplacianTriple]>,
    beta: f64,
    p: f64,
) -> ObjectiveBreakdown {
    let mut out = ObjectiveBreakdown::default();
    for s in 0..views.len() {
        let colres = column_residuals(&views[s], &basis[s], &coefficients[s]);
        let w_col = weights.column(s);
        out.reconstruction += colres
            .iter()
            .zip(w_col.iter())
            .map(|(&r, &w)| w * w * r)
            .sum::<f64>();
        let ap = alpha_pow(alpha[s], p);
        if ap != 0.0 {
            out.consensus +=
                ap * consensus_distance(&coefficients[s], &column_sums(&basis[s]), consensus);
        }
        if beta != 0.0 {
            if let Some(laps) = laplacians {
                out.manifold += beta * manifold_trace(&coefficients[s], &laps[s]);
            }
        }
    }
    out
}

/// Evaluates the total objective for a factorization state against a
/// (normalized) dataset.
pub fn objective_total(
    state: &crate::state::FactorizationState,
    dataset: &crate::dataset::MultiViewDataset,
    laplacians: Option<&[LaplacianTriple]>,
    hp: &crate::params::HyperParams,
) -> f64 {
    let views: Vec<Array2<f64>> = dataset.views().cloned().collect();
    let basis: Vec<Array2<f64>> = state.basis.iter().map(|m| m.array().clone()).collect();
    let coefficients: Vec<Array2<f64>> =
        state.coefficients.iter().map(|m| m.array().clone()).collect();
    objective_breakdown(
        &views,
        &basis,
        &coefficients,
        state.consensus.array(),
        &state.alpha,
        &state.weights,
        laplacians,
        hp.beta,
        hp.p,
    )
    .total()
}
