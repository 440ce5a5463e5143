//! `baseline`: k-means reference points on a labeled dataset — concatenated
//! views, each single view, and the best single view by accuracy.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use wmnmf::clustering::{kmeans, score, ClusteringReport};

use crate::commands::{classify, ensure_out_dir};
use crate::manifest::Manifest;
use crate::{input_error, CliError};

#[derive(Args)]
pub struct BaselineArgs {
    /// Dataset manifest; ground-truth labels are required.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory for results.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of clusters. Defaults to the distinct label count.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// One scored reference method.
#[derive(Debug, Clone, Serialize)]
struct BaselineEntry {
    name: String,
    acc: f64,
    nmi: f64,
    precision: f64,
    recall: f64,
    fscore: f64,
    adj_ri: f64,
}

impl BaselineEntry {
    fn from_report(name: String, report: &ClusteringReport) -> Self {
        BaselineEntry {
            name,
            acc: report.acc,
            nmi: report.nmi,
            precision: report.precision,
            recall: report.recall,
            fscore: report.fscore,
            adj_ri: report.adj_ri,
        }
    }
}

#[derive(Debug, Serialize)]
struct BaselineBundle {
    k: usize,
    seed: u64,
    methods: Vec<BaselineEntry>,
    best_single_view: String,
}

pub fn run(args: BaselineArgs) -> Result<(), CliError> {
    let manifest = Manifest::load(&args.manifest)?;
    let ds = manifest.load_dataset(&args.manifest)?;
    let truth: Vec<usize> = match ds.labels() {
        Some(labels) => labels.to_vec(),
        None => {
            return Err(input_error(
                "baseline scoring needs ground-truth labels in the manifest",
            ))
        }
    };
    let k = args
        .k
        .unwrap_or_else(|| truth.iter().collect::<std::collections::BTreeSet<_>>().len());
    if k == 0 {
        return Err(input_error("cluster count must be positive"));
    }
    ensure_out_dir(&args.out)?;

    let mut methods = Vec::new();
    let concatenated = ds.concatenated().map_err(classify)?;
    let concat_fit = kmeans(&concatenated.view(0).t().to_owned(), k, args.seed).map_err(classify)?;
    let concat_report = score(&concat_fit.assignments, &truth).map_err(classify)?;
    methods.push(BaselineEntry::from_report("concat-kmeans".to_string(), &concat_report));

    let mut best: Option<(usize, f64)> = None;
    for s in 0..ds.n_views() {
        let fit = kmeans(&ds.view(s).t().to_owned(), k, args.seed).map_err(classify)?;
        let report = score(&fit.assignments, &truth).map_err(classify)?;
        if best.is_none_or(|(_, acc)| report.acc > acc) {
            best = Some((s, report.acc));
        }
        methods.push(BaselineEntry::from_report(format!("view-{}-kmeans", s + 1), &report));
    }
    let best_single_view = format!("view-{}-kmeans", best.expect("at least one view").0 + 1);

    println!("method,acc,nmi,precision,recall,fscore,adj_ri");
    for entry in &methods {
        println!(
            "{},{},{},{},{},{},{}",
            entry.name, entry.acc, entry.nmi, entry.precision, entry.recall, entry.fscore,
            entry.adj_ri
        );
    }
    println!("best single view: {best_single_view}");

    let bundle = BaselineBundle { k, seed: args.seed, methods, best_single_view };
    let text = serde_json::to_string_pretty(&bundle)
        .map_err(|e| input_error(format!("cannot serialize baseline results: {e}")))?;
    std::fs::write(args.out.join("results.json"), text + "\n")
        .map_err(|e| input_error(format!("cannot write results.json: {e}")))?;
    println!("wrote {}", args.out.join("results.json").display());
    Ok(())
}
