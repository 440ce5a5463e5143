//! `bounds`: evaluate the two generalization bounds, with per-term columns.

use clap::Args;

use wmnmf::theory::{dim_dependent_terms, dim_independent_terms, BoundInputs};

use crate::commands::parse_list;
use crate::{input_error, CliError};

#[derive(Args)]
pub struct BoundsArgs {
    /// Sample size N.
    #[arg(long)]
    pub n: usize,
    /// Feature count M.
    #[arg(long)]
    pub m: usize,
    /// Factorization rank K.
    #[arg(long)]
    pub k: usize,
    /// Basis-norm radius w*.
    #[arg(long, default_value_t = 1.0)]
    pub w_star: f64,
    /// Confidence parameter δ ∈ (0, 1).
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Loss range b (defaults to w*²).
    #[arg(long)]
    pub loss_range: Option<f64>,
    /// Data bound B (entry magnitudes are assumed ≤ B).
    #[arg(long)]
    pub data_bound: Option<f64>,
    /// Evaluate at these sample sizes instead of --n, e.g. `100,1000,10000`.
    #[arg(long)]
    pub sweep_n: Option<String>,
}

pub fn run(args: BoundsArgs) -> Result<(), CliError> {
    let sizes: Vec<usize> = match &args.sweep_n {
        Some(list) => parse_list(list, "--sweep-n")?,
        None => vec![args.n],
    };
    println!(
        "n,dim_dependent,dep_covering,dep_concentration,dim_independent,indep_complexity,indep_confidence"
    );
    for n in sizes {
        let mut inputs = BoundInputs::new(n, args.m, args.k, args.w_star, args.delta);
        if let Some(b) = args.loss_range {
            inputs = inputs.with_loss_range(b);
        }
        if let Some(b) = args.data_bound {
            inputs = inputs.with_data_bound(b);
        }
        let dep = dim_dependent_terms(&inputs).map_err(input_error)?;
        let indep = dim_independent_terms(&inputs).map_err(input_error)?;
        println!(
            "{n},{},{},{},{},{},{}",
            dep[0] + dep[1],
            dep[0],
            dep[1],
            indep[0] + indep[1],
            indep[0],
            indep[1]
        );
    }
    Ok(())
}
