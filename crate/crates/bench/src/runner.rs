//! Runs every configuration on every (dataset, k, seed) cell.

use std::time::Instant;

use exact_kmeans::init::{kmeanspp_indices, random_indices};
use exact_kmeans::{run_engine_with, CentroidSet, DataSet, IndexMode, KnobConfig, RunOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::footprint::footprint_estimate;
use crate::log::{iteration_logs, RunLog, Totals, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Random,
    #[default]
    Kmeanspp,
}

pub struct BenchDataset {
    pub id: String,
    pub data: DataSet<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub t_max: usize,
    pub capacity: usize,
    pub init: InitKind,
    pub seeds: Vec<u64>,
    /// Shadow-check every stored bound.
    pub audit: bool,
    /// Run cells on all cores; wall times then interfere with each other.
    pub parallel: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            t_max: 10,
            capacity: 30,
            init: InitKind::Kmeanspp,
            seeds: vec![0],
            audit: false,
            parallel: false,
        }
    }
}

fn base_log(
    dataset: &BenchDataset,
    k: usize,
    config: &KnobConfig,
    seed: u64,
    opts: &BenchOptions,
) -> RunLog {
    let (n, d) = (dataset.data.n(), dataset.data.d());
    let config = config.with_capacity(opts.capacity).with_t_max(opts.t_max);
    let footprint = if config.index_mode != IndexMode::None || config.use_search {
        footprint_estimate(n, d, opts.capacity) * std::mem::size_of::<f64>() as f64
    } else {
        0.0
    };
    RunLog {
        schema_version: SCHEMA_VERSION,
        run_id: format!("{}/k{k}/s{seed}/{config}", dataset.id),
        dataset_id: dataset.id.clone(),
        n,
        d,
        k,
        config,
        init_seed: seed,
        init_indices: Vec::new(),
        setup_nanos: 0,
        iterations: Vec::new(),
        totals: Totals::default(),
        converged: false,
        footprint_bytes_estimate: footprint,
        bound_violations: None,
        error: None,
    }
}

/// Log of one run. The initial centroids are the rows `init_indices`.
pub fn run_one(
    dataset: &BenchDataset,
    k: usize,
    config: &KnobConfig,
    seed: u64,
    init_indices: &[usize],
    opts: &BenchOptions,
) -> RunLog {
    let mut log = base_log(dataset, k, config, seed, opts);
    log.init_indices = init_indices.to_vec();
    let data = &dataset.data;
    let init = CentroidSet::from_indices(data, init_indices);
    let run_opts = RunOptions {
        t_max: opts.t_max,
        audit: opts.audit,
        ..RunOptions::default()
    };
    let start = Instant::now();
    match run_engine_with(data, &init, &log.config, &run_opts) {
        Ok(res) => {
            let elapsed = start.elapsed().as_nanos() as u64;
            log.iterations = iteration_logs(&res, data.n(), k);
            log.totals = Totals::sum(&log.iterations);
            log.setup_nanos = elapsed.saturating_sub(log.totals.wall_nanos);
            log.converged = res.converged;
            log.bound_violations = res.audit.map(|a| a.violations);
        }
        Err(e) => log.error = Some(e.to_string()),
    }
    log
}

fn init_rows(
    data: &DataSet<f64>,
    k: usize,
    seed: u64,
    kind: InitKind,
) -> Result<Vec<usize>, String> {
    match kind {
        InitKind::Random => random_indices(data, k, seed),
        InitKind::Kmeanspp => kmeanspp_indices(data, k, seed),
    }
    .map_err(|e| e.to_string())
}

/// Every config on every (dataset, k, seed). Configs of one cell and seed
/// start from the same centroids. A failing run is logged, not raised.
pub fn run_benchmark(
    datasets: &[BenchDataset],
    ks: &[usize],
    configs: &[KnobConfig],
    opts: &BenchOptions,
) -> Vec<RunLog> {
    let mut jobs = Vec::new();
    for ds in datasets {
        for &k in ks {
            for &seed in &opts.seeds {
                let init = init_rows(&ds.data, k, seed, opts.init);
                for cfg in configs {
                    jobs.push((ds, k, seed, init.clone(), cfg));
                }
            }
        }
    }
    let run = |(ds, k, seed, init, cfg): &(
        &BenchDataset,
        usize,
        u64,
        Result<Vec<usize>, String>,
        &KnobConfig,
    )| {
        match init {
            Ok(rows) => run_one(ds, *k, cfg, *seed, rows, opts),
            Err(e) => RunLog {
                error: Some(e.clone()),
                ..base_log(ds, *k, cfg, *seed, opts)
            },
        }
    };
    if opts.parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    }
}
