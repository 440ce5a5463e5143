//! `probe`: study probes printed as CSV — perturbation stability, view-weight
//! sparsity, objective monotonicity, and runtime scaling.

use clap::{Args, Subcommand, ValueEnum};
use ndarray::Array1;
use wmnmf::params::HyperParams;
use wmnmf::solver::{audit_monotonicity, fit, linear_fit_r2, scaling_benchmark, VaryDim};
use wmnmf::synth::{generate, preset, SynthSpec};
use wmnmf::theory::{perturbation_probe, sparsity_probe};

use crate::commands::{classify, parse_list};
use crate::{computation_error, input_error, CliError};

#[derive(Subcommand)]
pub enum ProbeCommand {
    /// Refit under injected noise and report mean factor drift per level.
    Perturbation(PerturbationArgs),
    /// Closed-form view weights across a grid of exponents p.
    Sparsity(SparsityArgs),
    /// Objective-trace audit across seeds: every rise beyond tolerance.
    Monotonicity(MonotonicityArgs),
    /// Wall-time of a fixed iteration budget across one varied dimension.
    Scaling(ScalingArgs),
}

/// Builds a preset spec and the default hyperparameters for it.
fn preset_setup(
    name: &str,
    clusters: Option<usize>,
    seed: u64,
) -> Result<(SynthSpec, HyperParams), CliError> {
    let spec = preset(name, clusters, seed).map_err(input_error)?;
    let hp = HyperParams {
        seed,
        ..HyperParams::with_rank(spec.n_clusters)
    };
    Ok((spec, hp))
}

#[derive(Args)]
pub struct PerturbationArgs {
    /// Synthetic preset to perturb.
    #[arg(long, default_value = "synth1-desk")]
    pub preset: String,
    /// Cluster-count override for the preset.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Noise levels as fractions of the data norm; must start at 0.
    #[arg(long, default_value = "0,1e-3,1e-2,1e-1")]
    pub levels: String,
    /// Refits per level.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct SparsityArgs {
    /// Per-view consensus distances, e.g. `1.0,3.0,2.0`.
    #[arg(long)]
    pub distances: String,
    /// Exponent grid (ascending, all > 1).
    #[arg(long, default_value = "1.5,2,4,8,16,1000")]
    pub grid: String,
}

#[derive(Args)]
pub struct MonotonicityArgs {
    /// Synthetic preset to fit.
    #[arg(long, default_value = "synth1-desk")]
    pub preset: String,
    /// Cluster-count override for the preset.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Number of seeds; seed s draws both the dataset and the initialization.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
}

/// Dimension choices for the scaling probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VaryChoice {
    Obs,
    Views,
    Features,
    Rank,
}

impl From<VaryChoice> for VaryDim {
    fn from(choice: VaryChoice) -> Self {
        match choice {
            VaryChoice::Obs => VaryDim::Observations,
            VaryChoice::Views => VaryDim::Views,
            VaryChoice::Features => VaryDim::Features,
            VaryChoice::Rank => VaryDim::Rank,
        }
    }
}

#[derive(Args)]
pub struct ScalingArgs {
    /// Base synthetic preset; the varied dimension is changed around it.
    #[arg(long, default_value = "synth1-desk")]
    pub preset: String,
    /// Which dimension to vary.
    #[arg(long, value_enum)]
    pub vary: VaryChoice,
    /// Levels for the varied dimension, e.g. `2,3,4,5,6`.
    #[arg(long)]
    pub levels: String,
    /// Fixed outer-iteration budget timed at every level.
    #[arg(long, default_value_t = 10)]
    pub outer: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(command: ProbeCommand) -> Result<(), CliError> {
    match command {
        ProbeCommand::Perturbation(args) => perturbation(args),
        ProbeCommand::Sparsity(args) => sparsity(args),
        ProbeCommand::Monotonicity(args) => monotonicity(args),
        ProbeCommand::Scaling(args) => scaling(args),
    }
}

fn perturbation(args: PerturbationArgs) -> Result<(), CliError> {
    let fractions: Vec<f64> = parse_list(&args.levels, "--levels")?;
    let (spec, hp) = preset_setup(&args.preset, args.clusters, args.seed)?;
    let ds = generate(&spec).map_err(classify)?;
    // The probe takes absolute Frobenius norms; the flag speaks in fractions
    // of the stacked data norm, so convert here.
    let data_norm: f64 = ds
        .views()
        .map(|view| view.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let levels: Vec<f64> = fractions.iter().map(|f| f * data_norm).collect();
    let points = perturbation_probe(&ds, &hp, &levels, args.trials).map_err(classify)?;
    println!("fraction,level,mean_distance");
    for (fraction, point) in fractions.iter().zip(points) {
        println!("{fraction},{},{}", point.level, point.mean_distance);
    }
    Ok(())
}

fn sparsity(args: SparsityArgs) -> Result<(), CliError> {
    let distances: Vec<f64> = parse_list(&args.distances, "--distances")?;
    let grid: Vec<f64> = parse_list(&args.grid, "--grid")?;
    let rows = sparsity_probe(&Array1::from(distances), &grid).map_err(classify)?;
    let n_views = rows.first().map_or(0, |row| row.alpha.len());
    let alpha_headers: Vec<String> = (0..n_views).map(|s| format!("alpha_{s}")).collect();
    println!("p,max_alpha,entropy,{}", alpha_headers.join(","));
    for row in rows {
        let alphas: Vec<String> = row.alpha.iter().map(|a| a.to_string()).collect();
        println!("{},{},{},{}", row.p, row.max_alpha, row.entropy, alphas.join(","));
    }
    Ok(())
}

fn monotonicity(args: MonotonicityArgs) -> Result<(), CliError> {
    if args.seeds == 0 {
        return Err(input_error("--seeds must be at least 1"));
    }
    println!("seed,outer_iterations,violations,worst_rise");
    let mut total = 0usize;
    for seed in 0..args.seeds {
        let (spec, hp) = preset_setup(&args.preset, args.clusters, seed)?;
        let ds = generate(&spec).map_err(classify)?;
        let run = fit(&ds, &hp).map_err(computation_error)?;
        let violations = audit_monotonicity(&run);
        let worst = violations
            .iter()
            .map(|v| v.relative_rise)
            .fold(0.0_f64, f64::max);
        println!("{seed},{},{},{:e}", run.outer_iterations, violations.len(), worst);
        total += violations.len();
    }
    println!("total,,{total},");
    Ok(())
}

fn scaling(args: ScalingArgs) -> Result<(), CliError> {
    let levels: Vec<usize> = parse_list(&args.levels, "--levels")?;
    let (spec, mut hp) = preset_setup(&args.preset, None, args.seed)?;
    hp.outer_max = args.outer;
    let points =
        scaling_benchmark(&spec, args.vary.into(), &levels, &hp).map_err(classify)?;
    println!("level,seconds");
    for point in &points {
        println!("{},{}", point.level, point.seconds);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.level as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.seconds).collect();
    println!("r_squared,{}", linear_fit_r2(&xs, &ys));
    Ok(())
}
