//! `fit`: factorize a manifest-described dataset and write results.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use wmnmf::clustering::{argmax_assign, score, spectral_assign};
use wmnmf::dataset::{write_labels_csv, write_matrix_csv, MultiViewDataset};
use wmnmf::params::{HyperParams, SolverMode};
use wmnmf::solver::{fit, SolverRun};

use crate::commands::{classify, ensure_out_dir};
use crate::manifest::Manifest;
use crate::output::{load_config, DatasetInfo, ResultBundle, RunRecord};
use crate::{computation_error, input_error, CliError};

/// How cluster labels are read off the consensus matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AssignRule {
    /// k-means on the rows of the consensus matrix.
    Spectral,
    /// Largest consensus entry per row.
    Argmax,
}

#[derive(Args)]
pub struct FitArgs {
    /// Dataset manifest (JSON listing view CSVs and optional labels).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory for results.json, weights.csv, and labels.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Base configuration file: either a bare configuration object or a
    /// results.json from an earlier run. Explicit flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Factorization rank. Defaults to the distinct label count when the
    /// manifest has labels; otherwise required (unless --config supplies it).
    #[arg(long)]
    pub k: Option<usize>,
    /// View-weight sparsity exponent p > 1.
    #[arg(long)]
    pub p: Option<f64>,
    /// Manifold regularization strength β ≥ 0.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Solver variant: wm-nmf, nmf-w1, nmf-w2, multinmf1, or multinmf2.
    #[arg(long)]
    pub mode: Option<SolverMode>,
    /// Base RNG seed for initialization and cluster assignment.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Outer iteration budget.
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// Inner multiplicative updates per view per outer iteration.
    #[arg(long)]
    pub max_inner: Option<usize>,
    /// Relative objective-change convergence threshold.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Cluster-assignment rule applied to the consensus matrix.
    #[arg(long, value_enum, default_value_t = AssignRule::Spectral)]
    pub assign: AssignRule,
    /// Number of replications; run r uses seed + r.
    #[arg(long, default_value_t = 1)]
    pub replications: u64,
}

/// Resolves the effective hyperparameters from config file, flags, and the
/// dataset's labels (flag > config > default).
fn resolve_hyperparams(args: &FitArgs, ds: &MultiViewDataset) -> Result<HyperParams, CliError> {
    let mut hp = match &args.config {
        Some(path) => load_config(path)?,
        None => {
            let k = match args.k {
                Some(k) => k,
                None => match ds.labels() {
                    Some(labels) => labels.iter().collect::<BTreeSet<_>>().len(),
                    None => {
                        return Err(input_error(
                            "--k is required when the manifest has no labels and no --config is given",
                        ))
                    }
                },
            };
            HyperParams::with_rank(k)
        }
    };
    if let Some(k) = args.k {
        hp.k = k;
    }
    if let Some(p) = args.p {
        hp.p = p;
    }
    if let Some(beta) = args.beta {
        hp.beta = beta;
    }
    if let Some(mode) = args.mode {
        hp.mode = mode;
    }
    if let Some(seed) = args.seed {
        hp.seed = seed;
    }
    if let Some(max_outer) = args.max_outer {
        hp.outer_max = max_outer;
    }
    if let Some(max_inner) = args.max_inner {
        hp.inner_max = max_inner;
    }
    if let Some(tol) = args.tol {
        hp.conv_threshold = tol;
    }
    Ok(hp)
}

/// Derives predicted labels from a finished run.
pub fn assign_labels(
    run: &SolverRun,
    rule: AssignRule,
    k: usize,
    seed: u64,
) -> Result<Vec<usize>, CliError> {
    match rule {
        AssignRule::Spectral => {
            spectral_assign(run.final_state.consensus.array(), k, seed).map_err(computation_error)
        }
        AssignRule::Argmax => Ok(argmax_assign(run.final_state.consensus.array())),
    }
}

fn record_run(
    run: &SolverRun,
    hp: &HyperParams,
    rule: AssignRule,
    labels: Option<&[usize]>,
) -> Result<(RunRecord, Vec<usize>), CliError> {
    let predicted = assign_labels(run, rule, hp.k, hp.seed)?;
    let metrics = match labels {
        Some(truth) => Some(score(&predicted, truth).map_err(computation_error)?),
        None => None,
    };
    let record = RunRecord {
        seed: hp.seed,
        converged: run.converged,
        outer_iterations: run.outer_iterations,
        final_objective: *run
            .objective_trace
            .last()
            .expect("objective trace is never empty"),
        breakdown: run.breakdown,
        alpha: run.final_state.alpha.to_vec(),
        objective_trace: run.objective_trace.clone(),
        metrics,
        seconds: run.wall_time.as_secs_f64(),
    };
    Ok((record, predicted))
}

pub fn run(args: FitArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let manifest = Manifest::load(&args.manifest)?;
    let ds = manifest.load_dataset(&args.manifest)?;
    let base_hp = resolve_hyperparams(&args, &ds)?;
    base_hp.validate_for(&ds).map_err(input_error)?;
    if args.replications == 0 {
        return Err(input_error("--replications must be at least 1"));
    }
    ensure_out_dir(&args.out)?;

    let mut runs = Vec::with_capacity(args.replications as usize);
    let mut base_artifacts = None;
    for r in 0..args.replications {
        let mut hp = base_hp.clone();
        hp.seed = base_hp.seed + r;
        let solver_run = fit(&ds, &hp).map_err(classify)?;
        let (record, predicted) = record_run(&solver_run, &hp, args.assign, ds.labels())?;
        if r == 0 {
            base_artifacts = Some((solver_run.final_state.weights.clone(), predicted));
        }
        runs.push(record);
    }

    let (weights, predicted) = base_artifacts.expect("at least one replication ran");
    write_matrix_csv(&args.out.join("weights.csv"), &weights, ',').map_err(input_error)?;
    write_labels_csv(&args.out.join("labels.csv"), &predicted).map_err(input_error)?;

    let bundle = ResultBundle {
        config: base_hp,
        assign: match args.assign {
            AssignRule::Spectral => "spectral".to_string(),
            AssignRule::Argmax => "argmax".to_string(),
        },
        dataset: DatasetInfo {
            n_obs: ds.n_obs(),
            n_views: ds.n_views(),
            view_dims: ds.view_dims().iter().map(|&(m, _)| m).collect(),
        },
        summary: ResultBundle::summarize(&runs),
        runs,
        total_seconds: started.elapsed().as_secs_f64(),
    };
    bundle.save(&args.out.join("results.json"))?;

    let first = &bundle.runs[0];
    println!(
        "fit: {} views, {} observations, rank {}",
        bundle.dataset.n_views, bundle.dataset.n_obs, bundle.config.k
    );
    println!(
        "objective {:.6e} after {} outer iterations (converged: {})",
        first.final_objective, first.outer_iterations, first.converged
    );
    let alpha: Vec<String> = first.alpha.iter().map(|a| format!("{a:.4}")).collect();
    println!("alpha [{}]", alpha.join(", "));
    if let Some(metrics) = &first.metrics {
        println!(
            "acc {:.4}  nmi {:.4}  adj_ri {:.4}  fscore {:.4}",
            metrics.acc, metrics.nmi, metrics.adj_ri, metrics.fscore
        );
    }
    if bundle.runs.len() > 1 {
        println!(
            "{} replications: objective {:.6e} ± {:.2e}",
            bundle.runs.len(),
            bundle.summary.final_objective.mean,
            bundle.summary.final_objective.std
        );
        if let Some(acc) = &bundle.summary.acc {
            println!("mean acc {:.4} ± {:.4}", acc.mean, acc.std);
        }
    }
    println!("wrote {}", args.out.join("results.json").display());
    Ok(())
}
