//! Ground-truth labels from timing a short list of strong configurations.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Instant;

use exact_kmeans::engine::build_index;
use exact_kmeans::{
    init_kmeanspp, run_engine_with, BoundStrategy, DataSet, IndexMode, KnobConfig, RunOptions,
    Scalar,
};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TunerError};
use crate::features::{extract_features, FeatureVector};

/// Bound strategies that win often enough to be worth timing.
pub const SELECTION_POOL: [BoundStrategy; 5] = [
    BoundStrategy::Hame,
    BoundStrategy::Drak,
    BoundStrategy::Heap,
    BoundStrategy::Yinyang,
    BoundStrategy::Regroup,
];

/// Index labels: no index, pure traversal, single traversal, multiple
/// traversal.
pub const INDEX_NONE: u8 = 1;
pub const INDEX_PURE: u8 = 2;
pub const INDEX_SINGLE: u8 = 3;
pub const INDEX_MULTIPLE: u8 = 4;

/// One labelled dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub dataset_id: String,
    pub k: usize,
    pub features: FeatureVector,
    /// Fastest strategy of the pool.
    pub label: String,
    /// One of [`INDEX_NONE`], [`INDEX_PURE`], [`INDEX_SINGLE`],
    /// [`INDEX_MULTIPLE`].
    pub index_label: u8,
    /// Every timed configuration, fastest first.
    pub ranking: Vec<String>,
    /// Median wall time per configuration in milliseconds.
    pub timing_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectiveOptions {
    pub t_max: usize,
    /// Timed repeats per configuration; the median is kept.
    pub repeats: usize,
    /// Ball-tree leaf capacity for the features and the index runs.
    pub capacity: usize,
    /// Seed of the shared k-means++ initialization.
    pub seed: u64,
}

impl Default for SelectiveOptions {
    fn default() -> Self {
        Self {
            t_max: 10,
            repeats: 3,
            capacity: 30,
            seed: 0,
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Labels `data` clustered into `k` groups.
///
/// Times every strategy of `pool` without an index and the pure Ball-tree
/// traversal. If the traversal loses to the best strategy the index label is
/// [`INDEX_NONE`]; otherwise single and multiple traversal combined with the
/// best strategy are timed as well and the fastest of the three traversals
/// sets the label. Runs execute one after another.
pub fn selective_run<T: Scalar>(
    data: &DataSet<T>,
    k: usize,
    pool: &[BoundStrategy],
    opts: &SelectiveOptions,
) -> Result<GroundTruthRecord> {
    if pool.is_empty() {
        return Err(TunerError::InvalidArgument("empty strategy pool".into()));
    }
    let init = init_kmeanspp(data, k, opts.seed)?;
    let run_opts = RunOptions {
        t_max: opts.t_max,
        compute_sse: false,
        ..RunOptions::default()
    };
    let mut timing: BTreeMap<String, f64> = BTreeMap::new();
    let mut time = |cfg: KnobConfig| -> Result<f64> {
        let cfg = cfg.with_capacity(opts.capacity).with_t_max(opts.t_max);
        let mut samples = Vec::with_capacity(opts.repeats.max(1));
        for _ in 0..opts.repeats.max(1) {
            let start = Instant::now();
            run_engine_with(data, &init, &cfg, &run_opts)?;
            samples.push(start.elapsed().as_secs_f64() * 1e3);
        }
        let ms = median(samples);
        timing.insert(cfg.to_string(), ms);
        Ok(ms)
    };

    let mut best: Option<(BoundStrategy, f64)> = None;
    for &b in pool {
        let ms = time(KnobConfig::new(IndexMode::None, b))?;
        if best.is_none_or(|(_, m)| ms < m) {
            best = Some((b, ms));
        }
    }
    let (best_bound, best_ms) = best.expect("non-empty pool");
    let pure_ms = time(KnobConfig::new(IndexMode::Pure, BoundStrategy::None))?;
    let index_label = if pure_ms > best_ms {
        INDEX_NONE
    } else {
        let single = time(KnobConfig::new(IndexMode::IndexSingle, best_bound))?;
        let multiple = time(KnobConfig::new(IndexMode::IndexMultiple, best_bound))?;
        let mut label = (INDEX_PURE, pure_ms);
        for cand in [(INDEX_SINGLE, single), (INDEX_MULTIPLE, multiple)] {
            if cand.1 < label.1 {
                label = cand;
            }
        }
        label.0
    };

    let tree = build_index(
        data,
        &KnobConfig::new(IndexMode::Pure, BoundStrategy::None).with_capacity(opts.capacity),
    )
    .expect("index mode builds a tree");
    let mut ranking: Vec<(String, f64)> = timing.iter().map(|(c, &t)| (c.clone(), t)).collect();
    ranking.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(GroundTruthRecord {
        dataset_id: String::new(),
        k,
        features: extract_features(data, k, &tree, opts.capacity),
        label: best_bound.name().to_string(),
        index_label,
        ranking: ranking.into_iter().map(|(c, _)| c).collect(),
        timing_ms: timing,
    })
}

/// Writes one JSON record per line.
pub fn write_records<W: Write>(mut out: W, records: &[GroundTruthRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| TunerError::Json { line: 0, source: e })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads records written by [`write_records`]; blank lines are skipped.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<GroundTruthRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| TunerError::Json {
            line: i + 1,
            source: e,
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0]), 2.5);
    }

    #[test]
    fn records_round_trip() {
        let r = GroundTruthRecord {
            dataset_id: "g0".into(),
            k: 4,
            features: FeatureVector::from_array([1.0; 14]),
            label: "hame".into(),
            index_label: INDEX_NONE,
            ranking: vec!["hame".into(), "pure".into()],
            timing_ms: BTreeMap::from([("hame".into(), 1.0), ("pure".into(), 2.0)]),
        };
        let mut buf = Vec::new();
        write_records(&mut buf, &[r.clone(), r.clone()]).unwrap();
        let back = read_records(&buf[..]).unwrap();
        assert_eq!(back, vec![r.clone(), r]);
        let err = read_records(&b"{}\n"[..]).unwrap_err();
        assert!(matches!(err, TunerError::Json { line: 1, .. }));
    }
}
