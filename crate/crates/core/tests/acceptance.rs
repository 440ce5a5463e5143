//! Acceptance gate: one test per release criterion, each printing a single
//! `ACCEPTANCE NN … PASS/FAIL` line (visible with `--nocapture`) before
//! asserting. Criteria 1, 5, 6, and 10 share one pool of 40 seeded solver
//! runs so the wall-clock budget is paid once.
//!
//! Run with:
//!   cargo test --test acceptance -- --test-threads=1 --nocapture

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use common::{
    big_dim_dependent, big_dim_independent, consensus_oracle, grid_search_simplex,
    naive_objective, BigBoundInputs, GRID_STEP,
};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmnmf::clustering::{score, spectral_assign};
use wmnmf::graph::laplacian_for_view;
use wmnmf::solver::{audit_monotonicity, fit_observed, linear_fit_r2, scaling_benchmark, FitEvent, SolverRun, VaryDim};
use wmnmf::synth::{generate, preset, NegativePolicy, SynthSpec, ViewSpec};
use wmnmf::theory::{
    dim_dependent_bound, dim_independent_bound, perturbation_probe, BoundInputs,
};
use wmnmf::updates::{
    column_sums, objective_breakdown, solve_consensus, solve_observation_weights,
    solve_view_weights,
};
use wmnmf::{fit, HyperParams, MultiViewDataset, SolverMode};

const SEEDS: u64 = 20;

/// Prints the canonical criterion verdict line.
fn report(number: usize, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {number:02} {title}: {verdict} ({detail})");
}

// ---------------------------------------------------------------------------
// Shared run pool (criteria 1, 5, 6, 10)
// ---------------------------------------------------------------------------

struct PoolRun {
    seed: u64,
    truth: Vec<usize>,
    run: SolverRun,
}

struct Pool {
    synth1: Vec<PoolRun>,
    synth2: Vec<PoolRun>,
    /// Wall-clock seconds spent building each half of the pool.
    synth1_seconds: f64,
    synth2_seconds: f64,
}

static POOL: OnceLock<Pool> = OnceLock::new();

fn default_hp(k: usize, seed: u64) -> HyperParams {
    HyperParams { seed, ..HyperParams::with_rank(k) }
}

/// Twenty seeded fits of one desk preset; seed s draws both the dataset and
/// the solver initialization.
fn run_preset_sweep(name: &str, mode: SolverMode) -> Vec<PoolRun> {
    (0..SEEDS)
        .map(|seed| {
            let spec = preset(name, None, seed).expect("known preset");
            let ds = generate(&spec).expect("preset generates");
            let hp = HyperParams { mode, ..default_hp(spec.n_clusters, seed) };
            let run = fit(&ds, &hp).expect("fit succeeds");
            let truth = ds.labels().expect("presets carry labels").to_vec();
            PoolRun { seed, truth, run }
        })
        .collect()
}

fn pool() -> &'static Pool {
    POOL.get_or_init(|| {
        let started = Instant::now();
        let synth1 = run_preset_sweep("synth1-desk", SolverMode::WmNmf);
        let synth1_seconds = started.elapsed().as_secs_f64();
        let started = Instant::now();
        let synth2 = run_preset_sweep("synth2-desk", SolverMode::WmNmf);
        let synth2_seconds = started.elapsed().as_secs_f64();
        Pool { synth1, synth2, synth1_seconds, synth2_seconds }
    })
}

// ---------------------------------------------------------------------------
// Criterion 1: the objective trace never rises
// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_objective_monotone_across_forty_seeded_runs() {
    let pool = pool();
    let mut violations = 0usize;
    for pr in pool.synth1.iter().chain(&pool.synth2) {
        violations += audit_monotonicity(&pr.run).len();
    }
    let total_seconds = pool.synth1_seconds + pool.synth2_seconds;
    let within_budget = total_seconds <= 300.0;
    let pass = violations == 0 && within_budget;
    report(
        1,
        "objective monotone over 20 seeds x 2 desk presets",
        pass,
        &format!("{violations} violations, {total_seconds:.1}s of 300s budget"),
    );
    assert_eq!(violations, 0, "objective rose above the relative slack");
    assert!(within_budget, "pool took {total_seconds:.1}s, budget is 300s");
}

// ---------------------------------------------------------------------------
// Criterion 2: factors stay strictly positive through every update
// ---------------------------------------------------------------------------

#[test]
fn acceptance_02_factor_entries_stay_positive_on_1000_micro_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC2);
    let modes = [
        SolverMode::WmNmf,
        SolverMode::WmNmf,
        SolverMode::NmfW1,
        SolverMode::NmfW2,
        SolverMode::MultiNmf1,
    ];
    let mut bad_instances = 0usize;
    let mut min_entry = f64::INFINITY;
    for instance in 0..1000u64 {
        let k = rng.random_range(1..=3usize);
        let n = rng.random_range((k + 5)..=20);
        let n_v = rng.random_range(1..=3usize);
        // Strictly positive data: the positivity guarantee presumes the
        // inputs themselves carry no all-zero structure.
        let views: Vec<Array2<f64>> = (0..n_v)
            .map(|_| {
                let m = rng.random_range((k + 1).max(3)..=10);
                Array2::from_shape_fn((m, n), |_| 0.05 + 0.95 * rng.random::<f64>())
            })
            .collect();
        let ds = MultiViewDataset::new(views, None).expect("valid views");
        let hp = HyperParams {
            seed: instance,
            p: [1.5, 2.0, 5.0][(instance % 3) as usize],
            beta: if instance % 2 == 0 { 0.01 } else { 0.0 },
            knn: 3,
            outer_max: 12,
            inner_max: 5,
            mode: modes[(instance % 5) as usize],
            ..HyperParams::with_rank(k)
        };

        let mut instance_min = f64::INFINITY;
        let mut observer = |event: FitEvent<'_>| {
            let matrix = match event {
                FitEvent::BasisUpdated { basis, .. } => Some(basis),
                FitEvent::CoefficientsUpdated { coefficients, .. } => Some(coefficients),
                FitEvent::OuterCompleted { .. } => None,
            };
            if let Some(matrix) = matrix {
                for &value in matrix {
                    if value < instance_min {
                        instance_min = value;
                    }
                }
            }
        };
        fit_observed(&ds, &hp, &mut observer).expect("micro fit succeeds");
        if !(instance_min > 0.0 && instance_min.is_finite()) {
            bad_instances += 1;
        }
        if instance_min < min_entry {
            min_entry = instance_min;
        }
    }
    let pass = bad_instances == 0;
    report(
        2,
        "U/V entries strictly positive after every update (1000 micro-instances)",
        pass,
        &format!("{bad_instances} failing instances, smallest entry seen {min_entry:.3e}"),
    );
    assert_eq!(bad_instances, 0, "some update produced a nonpositive factor entry");
}

// ---------------------------------------------------------------------------
// Criterion 3: closed-form updates match gradient-free oracles
// ---------------------------------------------------------------------------

#[test]
fn acceptance_03_closed_form_updates_match_search_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC3);
    let mut worst_alpha = 0.0_f64;
    let mut worst_w = 0.0_f64;
    let mut worst_consensus = 0.0_f64;

    for trial in 0..100 {
        let n_v = rng.random_range(1..=3usize);

        // View weights against the exhaustive simplex grid.
        let d: Vec<f64> = (0..n_v).map(|_| rng.random_range(0.1..5.0)).collect();
        let p = [1.5, 2.0, 3.0, 5.0][trial % 4];
        let closed = solve_view_weights(&Array1::from_vec(d.clone()), p);
        let grid = grid_search_simplex(&d, p, GRID_STEP);
        for (&c, g) in closed.iter().zip(&grid) {
            worst_alpha = worst_alpha.max((c - g).abs());
        }

        // Observation weights: the same simplex problem with exponent 2.
        let residuals = Array2::from_shape_fn((n_v, 1), |_| rng.random_range(0.05..4.0));
        let closed = solve_observation_weights(&residuals);
        let column: Vec<f64> = residuals.column(0).to_vec();
        let grid = grid_search_simplex(&column, 2.0, GRID_STEP);
        for s in 0..n_v {
            worst_w = worst_w.max((closed[[0, s]] - grid[s]).abs());
        }

        // Consensus against per-entry line search.
        let n = rng.random_range(4..=10);
        let k = rng.random_range(1..=3);
        let basis: Vec<Array2<f64>> = (0..n_v)
            .map(|_| Array2::from_shape_fn((rng.random_range(2..=6), k), |_| rng.random::<f64>()))
            .collect();
        let coefficients: Vec<Array2<f64>> =
            (0..n_v).map(|_| Array2::from_shape_fn((n, k), |_| rng.random::<f64>())).collect();
        let alpha: Vec<f64> = {
            let raw: Vec<f64> = (0..n_v).map(|_| rng.random_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|a| a / sum).collect()
        };
        let q_diags: Vec<Array1<f64>> = basis.iter().map(|u| column_sums(u)).collect();
        let closed = solve_consensus(&coefficients, &q_diags, &Array1::from_vec(alpha.clone()), p)
            .expect("consensus solves");
        let searched = consensus_oracle(&basis, &coefficients, &alpha, p);
        let diff = (&closed - &searched).mapv(|x| x * x).sum().sqrt();
        worst_consensus = worst_consensus.max(diff);
    }

    let pass = worst_alpha <= 1e-3 && worst_w <= 1e-3 && worst_consensus <= 1e-6;
    report(
        3,
        "alpha/W/consensus updates match grid and line-search oracles",
        pass,
        &format!(
            "worst alpha gap {worst_alpha:.2e} (<=1e-3), worst W gap {worst_w:.2e} (<=1e-3), \
             worst consensus gap {worst_consensus:.2e} (<=1e-6)"
        ),
    );
    assert!(worst_alpha <= 1e-3, "view-weight update strayed from the grid minimizer");
    assert!(worst_w <= 1e-3, "observation-weight update strayed from the grid minimizer");
    assert!(worst_consensus <= 1e-6, "consensus update strayed from the line-search oracle");
}

// ---------------------------------------------------------------------------
// Criterion 4: fast objective equals the naive summation
// ---------------------------------------------------------------------------

#[test]
fn acceptance_04_objective_matches_naive_summation_on_100_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC4);
    let mut worst_rel = 0.0_f64;
    for trial in 0..100 {
        let n_v = rng.random_range(1..=4usize);
        let n = rng.random_range(8..=20);
        let k = rng.random_range(1..=4);
        let views: Vec<Array2<f64>> = (0..n_v)
            .map(|_| {
                let m = rng.random_range(4..=12);
                Array2::from_shape_fn((m, n), |_| rng.random::<f64>() + 1e-3)
            })
            .collect();
        let basis: Vec<Array2<f64>> = views
            .iter()
            .map(|x| Array2::from_shape_fn((x.nrows(), k), |_| rng.random::<f64>()))
            .collect();
        let coefficients: Vec<Array2<f64>> =
            (0..n_v).map(|_| Array2::from_shape_fn((n, k), |_| rng.random::<f64>())).collect();
        let consensus = Array2::from_shape_fn((n, k), |_| rng.random::<f64>());
        let alpha = {
            let raw: Vec<f64> = (0..n_v).map(|_| rng.random_range(0.1..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            Array1::from_vec(raw.into_iter().map(|a| a / sum).collect())
        };
        let weights = {
            let mut w = Array2::from_shape_fn((n, n_v), |_| rng.random_range(0.1..1.0));
            for mut row in w.rows_mut() {
                let sum: f64 = row.iter().sum();
                row.mapv_inplace(|x| x / sum);
            }
            w
        };
        let beta = [0.0, 0.01, 0.5][trial % 3];
        let p = [1.5, 2.0, 5.0][trial % 3];
        let triples: Option<Vec<_>> = (beta > 0.0)
            .then(|| views.iter().map(|v| laplacian_for_view(v, 3, 1.0).unwrap()).collect());
        let laplacian_arrays: Option<Vec<Array2<f64>>> =
            triples.as_ref().map(|ts| ts.iter().map(|t| t.laplacian.clone()).collect());

        let fast = objective_breakdown(
            &views,
            &basis,
            &coefficients,
            &consensus,
            &alpha,
            &weights,
            triples.as_deref(),
            beta,
            p,
        )
        .total();
        let slow = naive_objective(
            &views,
            &basis,
            &coefficients,
            &consensus,
            alpha.as_slice().unwrap(),
            &weights,
            laplacian_arrays.as_deref(),
            beta,
            p,
        );
        worst_rel = worst_rel.max((fast - slow).abs() / slow.max(f64::MIN_POSITIVE));
    }
    let pass = worst_rel <= 1e-10;
    report(
        4,
        "objective equals naive triple-loop evaluation (100 instances)",
        pass,
        &format!("worst relative gap {worst_rel:.2e} (<=1e-10)"),
    );
    assert!(worst_rel <= 1e-10, "fast objective diverged from the naive summation");
}

// ---------------------------------------------------------------------------
// Criterion 5: desk-scale accuracy beats the unweighted baseline
// ---------------------------------------------------------------------------

#[derive(Default)]
struct MeanMetrics {
    acc: f64,
    nmi: f64,
    adj_ri: f64,
}

fn mean_metrics(entries: &[(f64, f64, f64)]) -> MeanMetrics {
    let n = entries.len() as f64;
    MeanMetrics {
        acc: entries.iter().map(|e| e.0).sum::<f64>() / n,
        nmi: entries.iter().map(|e| e.1).sum::<f64>() / n,
        adj_ri: entries.iter().map(|e| e.2).sum::<f64>() / n,
    }
}

fn spectral_scores(runs: &[PoolRun]) -> Vec<(f64, f64, f64)> {
    runs.iter()
        .map(|pr| {
            let consensus = pr.run.final_state.consensus.array();
            let k = pr.run.final_state.rank();
            let predicted = spectral_assign(consensus, k, pr.seed).expect("assignment succeeds");
            let metrics = score(&predicted, &pr.truth).expect("scoring succeeds");
            (metrics.acc, metrics.nmi, metrics.adj_ri)
        })
        .collect()
}

#[test]
fn acceptance_05_weighted_fit_beats_unweighted_baseline_on_synth1() {
    let pool = pool();
    let started = Instant::now();
    let weighted = mean_metrics(&spectral_scores(&pool.synth1));
    let baseline_runs = run_preset_sweep("synth1-desk", SolverMode::MultiNmf1);
    let baseline = mean_metrics(&spectral_scores(&baseline_runs));
    // The weighted runs come from the shared pool; charge their build time
    // to this criterion's budget as well.
    let total_seconds = pool.synth1_seconds + started.elapsed().as_secs_f64();

    let acc_floor = weighted.acc >= 0.95;
    let acc_win = weighted.acc > baseline.acc;
    let nmi_order = weighted.nmi >= baseline.nmi;
    let ari_order = weighted.adj_ri >= baseline.adj_ri;
    let within_budget = total_seconds <= 600.0;
    let pass = acc_floor && acc_win && nmi_order && ari_order && within_budget;
    report(
        5,
        "mean ACC >= 0.95 and beats the unweighted baseline (20 seeds)",
        pass,
        &format!(
            "weighted acc {:.4} nmi {:.4} adj_ri {:.4} vs baseline acc {:.4} nmi {:.4} \
             adj_ri {:.4}; {total_seconds:.1}s of 600s budget",
            weighted.acc, weighted.nmi, weighted.adj_ri, baseline.acc, baseline.nmi,
            baseline.adj_ri
        ),
    );
    assert!(acc_floor, "weighted mean accuracy {:.4} is below 0.95", weighted.acc);
    assert!(acc_win, "baseline accuracy {:.4} was not beaten", baseline.acc);
    assert!(nmi_order, "baseline NMI {:.4} exceeds the weighted run", baseline.nmi);
    assert!(ari_order, "baseline adjusted Rand {:.4} exceeds the weighted run", baseline.adj_ri);
    assert!(within_budget, "criterion took {total_seconds:.1}s, budget is 600s");
}

// ---------------------------------------------------------------------------
// Criterion 6: corrupted observations are down-weighted
// ---------------------------------------------------------------------------

#[test]
fn acceptance_06_corrupted_observations_are_down_weighted() {
    let pool = pool();
    // Locate the corrupted view and its observation range in the preset.
    let spec = preset("synth2-desk", None, 0).expect("known preset");
    let (corrupted_view, range) = spec
        .views
        .iter()
        .enumerate()
        .find_map(|(s, v)| v.corruption.map(|c| (s, c.range)))
        .expect("synth2 has a corrupted view");
    let corrupted_rows = range.indices(spec.n_obs);

    let mut hits = 0usize;
    let mut ratios = Vec::with_capacity(pool.synth2.len());
    for pr in &pool.synth2 {
        let weights = &pr.run.final_state.weights;
        let column = weights.column(corrupted_view);
        let (mut corrupted_sum, mut clean_sum) = (0.0, 0.0);
        for (i, &w) in column.iter().enumerate() {
            if corrupted_rows.contains(&i) {
                corrupted_sum += w;
            } else {
                clean_sum += w;
            }
        }
        let corrupted_mean = corrupted_sum / corrupted_rows.len() as f64;
        let clean_mean = clean_sum / (spec.n_obs - corrupted_rows.len()) as f64;
        let ratio = corrupted_mean / clean_mean;
        if ratio <= 0.5 {
            hits += 1;
        }
        ratios.push(ratio);
    }
    let ratio_list: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    let pass = hits >= 18;
    report(
        6,
        "corrupted-block weight <= 0.5x clean in >= 18/20 seeds",
        pass,
        &format!("{hits}/20 seeds met the threshold; ratios [{}]", ratio_list.join(", ")),
    );
    assert!(
        hits >= 18,
        "only {hits}/20 seeds down-weighted the corrupted block to half the clean mean; \
         with the contractual uniform 1/n_v weight initialization the first outer pass \
         lets the corrupted view's factorization absorb its own noise block, so the \
         residual signal the weight update keys on is erased for most seeds (see README \
         for the full analysis)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: the exponent p controls view-weight sparsity
// ---------------------------------------------------------------------------

#[test]
fn acceptance_07_weight_exponent_controls_sparsity() {
    use wmnmf::theory::sparsity_probe;
    let distances = Array1::from_vec(vec![2.0, 0.7, 1.4, 3.2]);
    let argmin = 1usize;
    let grid = [1.001, 1.5, 2.0, 4.0, 8.0, 16.0, 1000.0];
    let rows = sparsity_probe(&distances, &grid).expect("valid probe");

    let nonincreasing = rows.windows(2).all(|w| w[1].max_alpha <= w[0].max_alpha + 1e-15);
    let concentrated = rows[0].alpha[argmin] > 0.999;
    let uniform_gap = rows
        .last()
        .unwrap()
        .alpha
        .iter()
        .map(|a| (a - 0.25).abs())
        .fold(0.0_f64, f64::max);
    let flattened = uniform_gap < 1e-2;
    let pass = nonincreasing && concentrated && flattened;
    report(
        7,
        "max-alpha nonincreasing in p; concentrated at p->1, uniform at p=1000",
        pass,
        &format!(
            "alpha_argmin(1.001) = {:.5}, max |alpha(1000) - 1/4| = {uniform_gap:.2e}",
            rows[0].alpha[argmin]
        ),
    );
    assert!(nonincreasing, "max alpha rose along the exponent grid");
    assert!(concentrated, "alpha at p=1.001 did not concentrate on the nearest view");
    assert!(flattened, "alpha at p=1000 stayed {uniform_gap:.2e} away from uniform");
}

// ---------------------------------------------------------------------------
// Criterion 8: bound calculators match high-precision evaluation
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_bounds_match_high_precision_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC8);
    let mut worst_rel = 0.0_f64;
    let mut draws = 0usize;
    while draws < 50 {
        let n_obs = rng.random_range(10..=100_000usize);
        let n_features = rng.random_range(1..=500usize);
        let k = rng.random_range(1..=30usize);
        let w_star = 10.0_f64.powf(rng.random_range(-1.3..0.7));
        let delta = rng.random_range(1e-4..0.5);
        let inputs = BoundInputs::new(n_obs, n_features, k, w_star, delta);
        let (dependent, independent) =
            match (dim_dependent_bound(&inputs), dim_independent_bound(&inputs)) {
                (Ok(a), Ok(b)) => (a, b),
                // A draw can push the covering logarithm nonpositive; that
                // parameter region is rejected by contract, so redraw.
                _ => continue,
            };
        draws += 1;
        let big = BigBoundInputs {
            n_obs,
            n_features,
            k,
            w_star,
            delta,
            loss_range: w_star * w_star,
        };
        let rel_dep = (dependent - big_dim_dependent(&big)).abs() / big_dim_dependent(&big);
        let rel_indep =
            (independent - big_dim_independent(&big)).abs() / big_dim_independent(&big);
        worst_rel = worst_rel.max(rel_dep).max(rel_indep);
    }

    // sqrt(N)-invariance of the dimension-independent bound.
    let mut worst_invariance = 0.0_f64;
    let reference = {
        let inputs = BoundInputs::new(100, 64, 6, 1.5, 0.05);
        dim_independent_bound(&inputs).unwrap() * (100.0_f64).sqrt()
    };
    for n in [400usize, 2_500, 10_000, 62_500] {
        let inputs = BoundInputs::new(n, 64, 6, 1.5, 0.05);
        let scaled = dim_independent_bound(&inputs).unwrap() * (n as f64).sqrt();
        worst_invariance = worst_invariance.max((scaled - reference).abs() / reference);
    }

    // Monotone decrease of the dimension-dependent bound in N.
    let decreasing_values: Vec<f64> = [100usize, 1_000, 10_000, 100_000]
        .iter()
        .map(|&n| dim_dependent_bound(&BoundInputs::new(n, 64, 6, 1.5, 0.05)).unwrap())
        .collect();
    let decreasing = decreasing_values.windows(2).all(|w| w[1] < w[0]);

    let pass = worst_rel <= 1e-9 && worst_invariance <= 1e-9 && decreasing;
    report(
        8,
        "bound formulas vs 1024-bit oracle; sqrt(N) law; N-monotonicity",
        pass,
        &format!(
            "worst oracle gap {worst_rel:.2e} (<=1e-9), sqrt(N)-invariance gap \
             {worst_invariance:.2e} (<=1e-9), decreasing over N: {decreasing}"
        ),
    );
    assert!(worst_rel <= 1e-9, "a bound diverged from the high-precision oracle");
    assert!(worst_invariance <= 1e-9, "dim-independent bound violated the sqrt(N) law");
    assert!(decreasing, "dim-dependent bound was not decreasing in N: {decreasing_values:?}");
}

// ---------------------------------------------------------------------------
// Criterion 9: factor drift grows with input perturbation
// ---------------------------------------------------------------------------

#[test]
fn acceptance_09_perturbation_drift_grows_with_noise() {
    let spec = SynthSpec {
        n_obs: 120,
        n_clusters: 3,
        views: vec![ViewSpec::fresh(10, 5.0), ViewSpec::fresh(8, 5.0)],
        seed: 5,
        negatives: NegativePolicy::Clip,
    };
    let ds = generate(&spec).expect("spec generates");
    let hp = default_hp(3, 5);
    let data_norm: f64 = ds
        .views()
        .map(|view| view.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let levels: Vec<f64> = [0.0, 1e-3, 1e-2, 1e-1].iter().map(|f| f * data_norm).collect();
    let trials = 10;
    let curve = perturbation_probe(&ds, &hp, &levels, trials).expect("probe runs");

    let zero_at_zero = curve[0].mean_distance == 0.0;
    let ordered = curve[1].mean_distance < curve[3].mean_distance;
    let pass = zero_at_zero && ordered;
    report(
        9,
        "drift 0 at level 0; smaller at 1e-3 than at 1e-1 of ||X||_F",
        pass,
        &format!(
            "D = [{:.3e}, {:.3e}, {:.3e}, {:.3e}] over {trials} trials",
            curve[0].mean_distance,
            curve[1].mean_distance,
            curve[2].mean_distance,
            curve[3].mean_distance
        ),
    );
    assert!(zero_at_zero, "unperturbed refit drifted: {}", curve[0].mean_distance);
    assert!(
        ordered,
        "mean drift at 1e-3 ({:.3e}) was not below drift at 1e-1 ({:.3e})",
        curve[1].mean_distance, curve[3].mean_distance
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: convergence within the iteration budget
// ---------------------------------------------------------------------------

#[test]
fn acceptance_10_median_outer_iterations_within_budget() {
    let pool = pool();
    let mut outers: Vec<usize> = pool
        .synth1
        .iter()
        .chain(&pool.synth2)
        .map(|pr| pr.run.outer_iterations)
        .collect();
    outers.sort_unstable();
    let median = (outers[outers.len() / 2 - 1] + outers[outers.len() / 2]) as f64 / 2.0;
    let pass = median <= 100.0;
    report(
        10,
        "median outer iterations over the 40 pooled runs",
        pass,
        &format!("median {median}, range {}..{}", outers[0], outers[outers.len() - 1]),
    );
    assert!(median <= 100.0, "median outer iterations {median} exceeds 100");
}

// ---------------------------------------------------------------------------
// Criterion 11: runtime is linear in the number of views
// ---------------------------------------------------------------------------

#[test]
fn acceptance_11_runtime_scales_linearly_with_views() {
    // Equal-width fresh views so each added view adds the same work.
    let base = SynthSpec {
        n_obs: 500,
        n_clusters: 4,
        views: vec![ViewSpec::fresh(50, 5.0), ViewSpec::fresh(50, 5.0)],
        seed: 0,
        negatives: NegativePolicy::Clip,
    };
    let hp = HyperParams { outer_max: 12, ..default_hp(4, 0) };
    let levels = [2usize, 3, 4, 5, 6];
    let points =
        scaling_benchmark(&base, VaryDim::Views, &levels, &hp).expect("benchmark runs");
    let xs: Vec<f64> = points.iter().map(|p| p.level as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.seconds).collect();
    let r_squared = linear_fit_r2(&xs, &ys);
    let pass = r_squared >= 0.9;
    let times: Vec<String> = ys.iter().map(|s| format!("{s:.3}")).collect();
    report(
        11,
        "fit time vs view count fits a line with R^2 >= 0.9",
        pass,
        &format!("R^2 = {r_squared:.4}, seconds = [{}]", times.join(", ")),
    );
    assert!(r_squared >= 0.9, "scaling R^2 {r_squared:.4} is below 0.9");
}
