//! Synthetic datasets for labelling and benchmarking.

use exact_kmeans::BoundStrategy;
use kmeans_tuner::{selective_run, GroundTruthRecord, SelectiveOptions};

use crate::dataset::{gaussian_id, gen_gaussian};
use crate::error::Result;

/// One generated dataset and the `k` to cluster it with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteEntry {
    pub n: usize,
    pub d: usize,
    pub k_true: usize,
    pub variance: f64,
    pub seed: u64,
    pub k: usize,
}

/// Grid over size, dimension, `k` and spread: 72 entries. Tight sets have
/// `k` true clusters, loose ones `k/4`.
pub fn synthetic_grid(seed: u64) -> Vec<SuiteEntry> {
    let mut out = Vec::new();
    for n in [2000, 6000] {
        for d in [2, 4, 8, 16, 32, 64] {
            for k in [10, 40, 100] {
                for (variance, k_true) in [(1e-3, k), (2e-2, (k / 4).max(2))] {
                    let s = seed.wrapping_add(out.len() as u64);
                    out.push(SuiteEntry {
                        n,
                        d,
                        k_true,
                        variance,
                        seed: s,
                        k,
                    });
                }
            }
        }
    }
    out
}

/// Labels every entry with [`selective_run`], one after another.
pub fn label_suite(
    entries: &[SuiteEntry],
    pool: &[BoundStrategy],
    opts: &SelectiveOptions,
    mut progress: impl FnMut(usize, &GroundTruthRecord),
) -> Result<Vec<GroundTruthRecord>> {
    let mut out = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let data = gen_gaussian(e.n, e.d, e.k_true, e.variance, e.seed)?;
        let mut rec = selective_run(&data, e.k, pool, opts)?;
        rec.dataset_id = gaussian_id(e.n, e.d, e.k_true, e.variance, e.seed);
        progress(i, &rec);
        out.push(rec);
    }
    Ok(out)
}
