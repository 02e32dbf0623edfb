//! Command line surface.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use exact_kmeans::{KnobConfig, Tree};
use kmeans_tuner::{
    compare_on_holdout, extract_features, read_records, write_records, Classifier,
    DecisionTreeModel, GroundTruthRecord, KnnModel, SelectiveOptions, Selector, FEATURE_NAMES,
    SELECTION_POOL,
};
use serde::{Deserialize, Serialize};

use crate::dataset::{gaussian_id, gen_gaussian, load_dataset, to_csv};
use crate::error::{BenchError, Result};
use crate::log::{read_logs, write_logs};
use crate::report::{report, Format};
use crate::runner::{run_benchmark, BenchDataset, BenchOptions, InitKind};
use crate::suite::{label_suite, synthetic_grid};

#[derive(Debug, Parser)]
#[command(
    name = "kmeans-bench",
    version,
    about = "Exact k-means benchmarks and configuration selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run configurations over datasets and write JSONL run logs.
    Bench(BenchArgs),
    /// Write a synthetic Gaussian dataset as CSV.
    Gen(GenArgs),
    /// Print the selection features of a dataset.
    Features(FeaturesArgs),
    /// Label datasets by timing the strategy pool.
    Truth(TruthArgs),
    /// Fit a selector on ground-truth records.
    Train(TrainArgs),
    /// Pick a configuration for a dataset.
    Predict(PredictArgs),
    /// Summarize run logs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset files (CSV or whitespace separated).
    pub datasets: Vec<PathBuf>,
    /// Generated datasets as `n,d,k_true,variance,seed`.
    #[arg(long = "gen", value_name = "SPEC")]
    pub generated: Vec<String>,
    /// Configurations, comma separated (e.g. `lloyd,hame,single+yinyang`).
    #[arg(long, value_delimiter = ',', default_value = "lloyd,unik")]
    pub algo: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    /// Number of initializations per cell, seeded 0, 1, ...
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    #[arg(long, default_value_t = 30)]
    pub capacity: usize,
    #[arg(long, value_enum, default_value_t = InitKind::Kmeanspp)]
    pub init: InitKind,
    /// JSONL output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run cells concurrently. Wall times stop being comparable.
    #[arg(long)]
    pub parallel: bool,
    /// Shadow-check bounds; violations exit with status 3.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k_true: usize,
    #[arg(long, default_value_t = 0.01)]
    pub variance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 30)]
    pub capacity: usize,
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    /// Dataset files to label, each with every `--k`.
    pub datasets: Vec<PathBuf>,
    /// Label the built-in synthetic grid instead of files.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    #[arg(long, default_value_t = 30)]
    pub capacity: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Tree,
    Knn,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Ground-truth JSONL.
    pub truth: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelKind::Tree)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 10)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 1)]
    pub min_leaf: usize,
    /// Also print hold-out scores of a 70/30 split with this seed.
    #[arg(long)]
    pub evaluate: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub model: PathBuf,
    pub dataset: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 30)]
    pub capacity: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run log files.
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Model file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelFile {
    Tree(Selector<DecisionTreeModel>),
    Knn(Selector<KnnModel>),
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dataset_id(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn parse_gen_spec(spec: &str) -> Result<BenchDataset> {
    let bad = || BenchError::Usage(format!("`{spec}`: expected n,d,k_true,variance,seed"));
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(bad());
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let (n, d, k_true) = (int(parts[0])?, int(parts[1])?, int(parts[2])?);
    let variance: f64 = parts[3].parse().map_err(|_| bad())?;
    let seed: u64 = parts[4].parse().map_err(|_| bad())?;
    Ok(BenchDataset {
        id: gaussian_id(n, d, k_true, variance, seed),
        data: gen_gaussian(n, d, k_true, variance, seed)?,
    })
}

fn bench(a: BenchArgs) -> Result<()> {
    let configs = a
        .algo
        .iter()
        .map(|s| {
            s.parse::<KnobConfig>()
                .map_err(|e| BenchError::Usage(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut datasets = Vec::new();
    for p in &a.datasets {
        datasets.push(BenchDataset {
            id: dataset_id(p),
            data: load_dataset(p)?,
        });
    }
    for spec in &a.generated {
        datasets.push(parse_gen_spec(spec)?);
    }
    if datasets.is_empty() {
        return Err(BenchError::Usage("no datasets given".into()));
    }
    let opts = BenchOptions {
        t_max: a.iters,
        capacity: a.capacity,
        init: a.init,
        seeds: (0..a.seeds.max(1)).collect(),
        audit: a.audit,
        parallel: a.parallel,
    };
    let logs = run_benchmark(&datasets, &a.k, &configs, &opts);
    let mut out = output(a.out.as_deref())?;
    write_logs(&mut out, &logs)?;
    out.flush()?;
    for l in logs.iter().filter(|l| l.error.is_some()) {
        eprintln!(
            "run {} failed: {}",
            l.run_id,
            l.error.as_deref().unwrap_or_default()
        );
    }
    if let Ok(table) = report(&logs, Format::Text) {
        eprint!("{table}");
    }
    let violations: u64 = logs.iter().filter_map(|l| l.bound_violations).sum();
    if violations > 0 {
        return Err(BenchError::Invariant(format!(
            "{violations} bound violations"
        )));
    }
    Ok(())
}

fn gen(a: GenArgs) -> Result<()> {
    let data = gen_gaussian(a.n, a.d, a.k_true, a.variance, a.seed)?;
    let mut out = output(a.out.as_deref())?;
    out.write_all(to_csv(&data).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn features(a: FeaturesArgs) -> Result<()> {
    let data = load_dataset(&a.dataset)?;
    let tree = Tree::build_ball(&data, a.capacity);
    let fv = extract_features(&data, a.k, &tree, a.capacity);
    let named: serde_json::Map<String, serde_json::Value> = FEATURE_NAMES
        .iter()
        .zip(fv.to_array())
        .map(|(n, v)| (n.to_string(), v.into()))
        .collect();
    println!("{}", serde_json::to_string_pretty(&named)?);
    Ok(())
}

fn truth(a: TruthArgs) -> Result<()> {
    let opts = SelectiveOptions {
        t_max: a.iters,
        repeats: a.repeats,
        capacity: a.capacity,
        seed: a.seed,
    };
    let log = |i: usize, r: &GroundTruthRecord| {
        eprintln!("{i}: {} k={} -> {}", r.dataset_id, r.k, r.ranking[0])
    };
    let records = if a.synthetic {
        label_suite(&synthetic_grid(a.seed), &SELECTION_POOL, &opts, log)?
    } else {
        if a.datasets.is_empty() || a.k.is_empty() {
            return Err(BenchError::Usage(
                "give datasets and --k, or --synthetic".into(),
            ));
        }
        let mut out = Vec::new();
        for p in &a.datasets {
            let data = load_dataset(p)?;
            for &k in &a.k {
                let mut r = kmeans_tuner::selective_run(&data, k, &SELECTION_POOL, &opts)?;
                r.dataset_id = dataset_id(p);
                log(out.len(), &r);
                out.push(r);
            }
        }
        out
    };
    let mut out = output(a.out.as_deref())?;
    write_records(&mut out, &records)?;
    out.flush()?;
    Ok(())
}

fn read_truth(path: &Path) -> Result<Vec<GroundTruthRecord>> {
    Ok(read_records(BufReader::new(File::open(path)?))?)
}

fn train(a: TrainArgs) -> Result<()> {
    let records = read_truth(&a.truth)?;
    let model = match a.model {
        ModelKind::Tree => ModelFile::Tree(Selector::<DecisionTreeModel>::train_with(
            &records,
            a.max_depth,
            a.min_leaf,
        )?),
        ModelKind::Knn => ModelFile::Knn(Selector::<KnnModel>::train(&records)?),
    };
    if let Some(seed) = a.evaluate {
        let c = compare_on_holdout(&records, seed)?;
        eprintln!(
            "hold-out MRR over {} records: tree {:.4}, knn {:.4}, rules {:.4}",
            c.n_test, c.tree_mrr, c.knn_mrr, c.baseline_mrr
        );
    }
    let mut out = output(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &model)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let model: ModelFile = serde_json::from_reader(BufReader::new(File::open(&a.model)?))?;
    let data = load_dataset(&a.dataset)?;
    let tree = Tree::build_ball(&data, a.capacity);
    let fv = extract_features(&data, a.k, &tree, a.capacity);
    fn pick(s: &Selector<impl Classifier>, fv: &kmeans_tuner::FeatureVector) -> Result<KnobConfig> {
        Ok(s.predict(fv)?)
    }
    let cfg = match &model {
        ModelFile::Tree(s) => pick(s, &fv)?,
        ModelFile::Knn(s) => pick(s, &fv)?,
    };
    println!("{cfg}");
    Ok(())
}

fn report_cmd(a: ReportArgs) -> Result<()> {
    let mut logs = Vec::new();
    for p in &a.logs {
        let (mut l, skipped) = read_logs(BufReader::new(File::open(p)?))?;
        for s in skipped {
            eprintln!("warning: {}: skipped {s}", p.display());
        }
        logs.append(&mut l);
    }
    print!("{}", report(&logs, a.format)?);
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench(a) => bench(a),
        Command::Gen(a) => gen(a),
        Command::Features(a) => features(a),
        Command::Truth(a) => truth(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Report(a) => report_cmd(a),
    }
}
