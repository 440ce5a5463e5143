//! `synth`: materialize a synthetic dataset as CSV files plus a manifest.

use std::path::{Path, PathBuf};

use clap::Args;
use wmnmf::dataset::{write_labels_csv, write_matrix_csv};
use wmnmf::synth::{generate, preset, SynthSpec};

use crate::commands::{classify, ensure_out_dir};
use crate::manifest::Manifest;
use crate::{input_error, CliError};

#[derive(Args)]
pub struct SynthArgs {
    /// Preset name (synth1, synth1-desk, synth2, synth2-desk) or the path of
    /// a JSON spec file describing the views.
    pub source: String,
    /// Output directory for the view CSVs, labels.csv, and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
    /// RNG seed (overrides the seed stored in a spec file).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cluster-count override for presets that accept one.
    #[arg(long)]
    pub clusters: Option<usize>,
}

fn resolve_spec(args: &SynthArgs) -> Result<SynthSpec, CliError> {
    let path = Path::new(&args.source);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input_error(format!("cannot read spec {}: {e}", path.display())))?;
        let mut spec: SynthSpec = serde_json::from_str(&text)
            .map_err(|e| input_error(format!("malformed spec {}: {e}", path.display())))?;
        if let Some(seed) = args.seed {
            spec.seed = seed;
        }
        if let Some(k) = args.clusters {
            spec.n_clusters = k;
        }
        Ok(spec)
    } else {
        preset(&args.source, args.clusters, args.seed.unwrap_or(0)).map_err(|e| {
            input_error(format!(
                "{e} (expected a preset name or an existing spec file)"
            ))
        })
    }
}

pub fn run(args: SynthArgs) -> Result<(), CliError> {
    let spec = resolve_spec(&args)?;
    let ds = generate(&spec).map_err(classify)?;
    ensure_out_dir(&args.out)?;

    let mut view_files = Vec::with_capacity(ds.n_views());
    for (s, view) in ds.views().enumerate() {
        let name = format!("view_{}.csv", s + 1);
        write_matrix_csv(&args.out.join(&name), view, ',').map_err(input_error)?;
        view_files.push(PathBuf::from(name));
    }
    let labels = ds.labels().expect("synthetic datasets always carry labels");
    write_labels_csv(&args.out.join("labels.csv"), labels).map_err(input_error)?;

    let manifest = Manifest {
        views: view_files,
        labels: Some(PathBuf::from("labels.csv")),
        delimiter: ',',
        rows_are_features: true,
    };
    manifest.save(&args.out.join("manifest.json"))?;

    let dims: Vec<String> = ds.view_dims().iter().map(|&(m, n)| format!("{m}x{n}")).collect();
    println!(
        "generated {} views ({}) with {} observations in {} clusters",
        ds.n_views(),
        dims.join(", "),
        ds.n_obs(),
        spec.n_clusters
    );
    println!("wrote {}", args.out.join("manifest.json").display());
    Ok(())
}
