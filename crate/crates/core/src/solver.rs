//! The alternating solver: per-view multiplicative inner loops wrapped in
//! outer refreshes of the view weights, observation weights, and consensus.
//!
//! One outer iteration performs, in order:
//!
//! 1. for each view: repeat { update `U⁽ˢ⁾`; update `V⁽ˢ⁾` } until the
//!    single-view objective `O₀` stops moving (or `inner_max` is reached);
//! 2. refresh `α` from the consensus distances (closed form);
//! 3. refresh `W` from the reconstruction residuals (closed form);
//! 4. refresh `V*` (closed form);
//!
//! then the total objective is recorded and convergence is declared when its
//! absolute decrease falls below `conv_threshold`. The shared quantities
//! (`α`, `W`, `V*`) seen by the inner loops are snapshots taken at the start
//! of the outer iteration, so the per-view loops are independent of one
//! another. Similarity graphs are built once, from the normalized data,
//! before iteration begins.

use std::time::{Duration, Instant};

use ndarray::{Array1, Array2};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::graph::{laplacian_for_view, LaplacianTriple};
use crate::matrix::NonnegMatrix;
use crate::params::HyperParams;
use crate::state::{init_state, FactorizationState};
use crate::synth::SynthSpec;
use crate::updates::{
    alpha_pow, column_residuals, column_sums, consensus_distance, manifold_trace,
    objective_single_view, solve_consensus, solve_observation_weights, solve_view_weights,
    update_basis, update_coefficients, ObjectiveBreakdown, ViewContext,
};

/// Relative slack within which the objective trace must be nonincreasing.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

/// Everything a completed fit reports.
#[derive(Clone, Debug)]
pub struct SolverRun {
    /// The learned factors and weights, with the objective history attached.
    pub final_state: FactorizationState,
    /// Whether the outer loop hit the convergence threshold before its budget.
    pub converged: bool,
    /// Outer iterations executed.
    pub outer_iterations: usize,
    /// `inner_iterations[outer][view]`: inner iterations spent per view in
    /// each outer iteration.
    pub inner_iterations: Vec<Vec<usize>>,
    /// Total wall time of the fit (including graph construction).
    pub wall_time: Duration,
    /// Objective after initialization and after each outer iteration.
    pub objective_trace: Vec<f64>,
    /// Decomposition of the final objective value by term group.
    pub breakdown: ObjectiveBreakdown,
}

/// A point in the solver's execution that instrumentation can observe.
#[derive(Clone, Copy)]
pub enum FitEvent<'a> {
    /// A basis matrix was just replaced by its multiplicative update.
    BasisUpdated { outer: usize, view: usize, inner: usize, basis: &'a Array2<f64> },
    /// A coefficient matrix was just replaced by its multiplicative update.
    CoefficientsUpdated { outer: usize, view: usize, inner: usize, coefficients: &'a Array2<f64> },
    /// An outer iteration finished (all shared quantities refreshed).
    OuterCompleted {
        outer: usize,
        basis: &'a [Array2<f64>],
        coefficients: &'a [Array2<f64>],
        consensus: &'a Array2<f64>,
        alpha: &'a Array1<f64>,
        weights: &'a Array2<f64>,
        objective: f64,
    },
}

/// Receives [`FitEvent`]s during a fit. Implemented for any closure.
pub trait FitObserver {
    /// Called at each instrumentation point.
    fn observe(&mut self, event: FitEvent<'_>);
}

impl<F: FnMut(FitEvent<'_>)> FitObserver for F {
    fn observe(&mut self, event: FitEvent<'_>) {
        self(event)
    }
}

/// Runs the solver on a dataset.
///
/// The dataset is normalized internally; labels (if any) are untouched and
/// play no role in fitting. Identical `(dataset, hp)` inputs produce
/// bitwise-identical results.
pub fn fit(ds: &MultiViewDataset, hp: &HyperParams) -> Result<SolverRun> {
    fit_observed(ds, hp, &mut |_: FitEvent<'_>| {})
}

/// [`fit`] with an observer called after every update step and every outer
/// iteration. The observer sees borrowed working state; it cannot mutate the
/// run.
pub fn fit_observed<O: FitObserver>(
    ds: &MultiViewDataset,
    hp: &HyperParams,
    observer: &mut O,
) -> Result<SolverRun> {
    let started = Instant::now();
    hp.validate_for(ds)?;
    let normalized = ds.normalized()?;
    let n_v = normalized.n_views();
    let n = normalized.n_obs();

    // The ablation modes disable the manifold term outright; only build the
    // graphs when the term can contribute.
    let effective_beta = if hp.mode.uses_manifold() { hp.beta } else { 0.0 };
    let laplacians: Option<Vec<LaplacianTriple>> = if effective_beta > 0.0 {
        let mut triples = Vec::with_capacity(n_v);
        for view in normalized.views() {
            triples.push(laplacian_for_view(view, hp.knn, hp.sigma_sq)?);
        }
        Some(triples)
    } else {
        None
    };

    let init = init_state(&normalized, hp)?;
    let views: Vec<Array2<f64>> = normalized.views().cloned().collect();
    let mut basis: Vec<Array2<f64>> = init.basis.into_iter().map(NonnegMatrix::into_array).collect();
    let mut coefficients: Vec<Array2<f64>> =
        init.coefficients.into_iter().map(NonnegMatrix::into_array).collect();
    let mut consensus: Array2<f64> = init.consensus.into_array();
    let mut alpha = init.alpha;
    let mut weights = init.weights;

    // Mode fixtures: pinned α for the fixed-α modes, caller-supplied
    // overrides for either weight family's starting point.
    if let Some(fixed) = &hp.fixed_alpha {
        alpha = Array1::from_vec(fixed.clone());
    } else if let Some(pinned) = hp.mode.pinned_alpha(n_v) {
        alpha = Array1::from_elem(n_v, pinned);
    }
    if let Some(fixed) = &hp.fixed_w {
        for (i, row) in fixed.iter().enumerate() {
            for (s, &value) in row.iter().enumerate() {
                weights[[i, s]] = value;
            }
        }
    }

    let mut objective_trace = Vec::with_capacity(hp.outer_max + 1);
    let mut inner_iterations = Vec::new();

    let evaluate_breakdown = |basis: &[Array2<f64>],
                              coefficients: &[Array2<f64>],
                              consensus: &Array2<f64>,
                              alpha: &Array1<f64>,
                              weights: &Array2<f64>| {
        crate::updates::objective_breakdown(
            &views,
            basis,
            coefficients,
            consensus,
            alpha,
            weights,
            laplacians.as_deref(),
            effective_beta,
            hp.p,
        )
    };

    let mut breakdown = evaluate_breakdown(&basis, &coefficients, &consensus, &alpha, &weights);
    let mut previous_objective = breakdown.total();
    if !previous_objective.is_finite() {
        return Err(Error::NonFiniteObjective { outer: 0 });
    }
    objective_trace.push(previous_objective);

    let mut converged = false;
    let mut outer_iterations = 0;
    for outer in 0..hp.outer_max {
        // Shared-quantity snapshot for this outer iteration's inner loops.
        let consensus_snapshot = consensus.clone();
        let mut inner_counts = vec![0usize; n_v];

        for s in 0..n_v {
            let w_col: Array1<f64> = weights.column(s).to_owned();
            let lap = laplacians.as_ref().map(|l| &l[s]);
            macro_rules! context {
                () => {
                    ViewContext {
                        x: &views[s],
                        u: &basis[s],
                        v: &coefficients[s],
                        consensus: &consensus_snapshot,
                        alpha_s: alpha[s],
                        p: hp.p,
                        w: &w_col,
                        laplacian: lap,
                        beta: effective_beta,
                        denom_guard: hp.denom_guard,
                    }
                };
            }
            let mut previous_o0 = objective_single_view(&context!());
            for inner in 0..hp.inner_max {
                basis[s] = update_basis(&context!());
                observer.observe(FitEvent::BasisUpdated {
                    outer,
                    view: s,
                    inner,
                    basis: &basis[s],
                });
                coefficients[s] = update_coefficients(&context!());
                observer.observe(FitEvent::CoefficientsUpdated {
                    outer,
                    view: s,
                    inner,
                    coefficients: &coefficients[s],
                });
                inner_counts[s] = inner + 1;
                let o0 = objective_single_view(&context!());
                if !o0.is_finite() {
                    return Err(Error::NonFiniteObjective { outer });
                }
                if (previous_o0 - o0).abs() < hp.conv_threshold {
                    break;
                }
                previous_o0 = o0;
            }
        }

        // Closed-form refreshes, in the fixed order α → W → V*. The α update
        // measures distances to the consensus the inner loops actually saw.
        let q_diags: Vec<Array1<f64>> = basis.iter().map(column_sums).collect();
        if hp.mode.learns_alpha() {
            let distances = Array1::from_shape_fn(n_v, |s| {
                consensus_distance(&coefficients[s], &q_diags[s], &consensus_snapshot)
            });
            alpha = solve_view_weights(&distances, hp.p);
        }
        let mut residuals = Array2::<f64>::zeros((n_v, n));
        for s in 0..n_v {
            residuals
                .row_mut(s)
                .assign(&column_residuals(&views[s], &basis[s], &coefficients[s]));
        }
        if hp.mode.learns_w() {
            weights = solve_observation_weights(&residuals);
        }
        consensus = solve_consensus(&coefficients, &q_diags, &alpha, hp.p)?;

        // Assemble the objective from the pieces already computed; only the
        // consensus distances involve the refreshed V*.
        breakdown = ObjectiveBreakdown::default();
        for s in 0..n_v {
            let w_col = weights.column(s);
            breakdown.reconstruction += residuals
                .row(s)
                .iter()
                .zip(w_col.iter())
                .map(|(&r, &w)| w * w * r)
                .sum::<f64>();
            let ap = alpha_pow(alpha[s], hp.p);
            if ap != 0.0 {
                breakdown.consensus +=
                    ap * consensus_distance(&coefficients[s], &q_diags[s], &consensus);
            }
            if let Some(laps) = &laplacians {
                breakdown.manifold += effective_beta * manifold_trace(&coefficients[s], &laps[s]);
            }
        }
        let objective = breakdown.total();
        if !objective.is_finite() {
            return Err(Error::NonFiniteObjective { outer: outer + 1 });
        }
        objective_trace.push(objective);
        inner_iterations.push(inner_counts);
        outer_iterations = outer + 1;
        observer.observe(FitEvent::OuterCompleted {
            outer,
            basis: &basis,
            coefficients: &coefficients,
            consensus: &consensus,
            alpha: &alpha,
            weights: &weights,
            objective,
        });

        if (previous_objective - objective).abs() < hp.conv_threshold {
            converged = true;
            break;
        }
        previous_objective = objective;
    }

    let final_state = FactorizationState {
        basis: basis
            .into_iter()
            .enumerate()
            .map(|(s, m)| NonnegMatrix::new(m, &format!("basis U[{s}]")))
            .collect::<Result<Vec<_>>>()?,
        coefficients: coefficients
            .into_iter()
            .enumerate()
            .map(|(s, m)| NonnegMatrix::new(m, &format!("coefficients V[{s}]")))
            .collect::<Result<Vec<_>>>()?,
        consensus: NonnegMatrix::new(consensus, "consensus")?,
        alpha,
        weights,
        objective_history: objective_trace.clone(),
        outer_iters_run: outer_iterations,
    };
    Ok(SolverRun {
        final_state,
        converged,
        outer_iterations,
        inner_iterations,
        wall_time: started.elapsed(),
        objective_trace,
        breakdown,
    })
}

/// One recorded rise in an objective trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityViolation {
    /// Index in the trace where the rise was observed (the later point).
    pub index: usize,
    /// Value before the rise.
    pub previous: f64,
    /// Value after the rise.
    pub current: f64,
    /// `(current − previous) / max(|previous|, tiny)`.
    pub relative_rise: f64,
}

/// Scans a run's objective trace for rises beyond [`MONOTONICITY_SLACK`].
///
/// An empty report means the trace is nonincreasing within tolerance.
pub fn audit_monotonicity(run: &SolverRun) -> Vec<MonotonicityViolation> {
    audit_trace(&run.objective_trace)
}

/// [`audit_monotonicity`] on a bare trace.
pub fn audit_trace(trace: &[f64]) -> Vec<MonotonicityViolation> {
    let mut violations = Vec::new();
    for (index, window) in trace.windows(2).enumerate() {
        let (previous, current) = (window[0], window[1]);
        let rise = current - previous;
        if rise <= 0.0 {
            continue;
        }
        let relative_rise = rise / previous.abs().max(f64::MIN_POSITIVE);
        if relative_rise > MONOTONICITY_SLACK {
            violations.push(MonotonicityViolation {
                index: index + 1,
                previous,
                current,
                relative_rise,
            });
        }
    }
    violations
}

/// Which dataset/model dimension a scaling sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VaryDim {
    /// Number of observations N.
    Observations,
    /// Number of views n_v (view specs are cycled from the base spec).
    Views,
    /// Features per view M (applied to every view).
    Features,
    /// Factorization rank K.
    Rank,
}

/// One measured level of a scaling sweep.
#[derive(Clone, Copy, Debug)]
pub struct ScalingPoint {
    /// The varied dimension's value.
    pub level: usize,
    /// Wall time of the fit at this level, in seconds.
    pub seconds: f64,
}

/// Times `fit` across levels of one dimension, holding everything else fixed.
///
/// Each level's dataset is generated fresh from the modified spec (generation
/// time is excluded from the measurement). The convergence threshold is
/// forced to the smallest positive double so every run spends its full
/// iteration budget — the point is to measure a fixed amount of work.
pub fn scaling_benchmark(
    base: &SynthSpec,
    vary: VaryDim,
    levels: &[usize],
    hp: &HyperParams,
) -> Result<Vec<ScalingPoint>> {
    let mut points = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut spec = base.clone();
        let mut hp = hp.clone();
        hp.conv_threshold = f64::MIN_POSITIVE;
        match vary {
            VaryDim::Observations => spec.n_obs = level,
            VaryDim::Views => {
                let base_views = spec.views.clone();
                spec.views = (0..level).map(|i| base_views[i % base_views.len()].clone()).collect();
            }
            VaryDim::Features => {
                for view in &mut spec.views {
                    view.n_features = level;
                }
            }
            VaryDim::Rank => hp.k = level,
        }
        let ds = crate::synth::generate(&spec)?;
        let clock = Instant::now();
        fit(&ds, &hp)?;
        points.push(ScalingPoint { level, seconds: clock.elapsed().as_secs_f64() });
    }
    Ok(points)
}

/// Coefficient of determination of the best-fit line through `(x, y)` pairs.
///
/// Returns 1.0 for a degenerate vertical/flat cloud with zero total variance.
pub fn linear_fit_r2(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sst: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    if sst == 0.0 {
        return 1.0;
    }
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let fitted = mean_y + slope * (x - mean_x);
            (y - fitted) * (y - fitted)
        })
        .sum();
    1.0 - ssr / sst
}
