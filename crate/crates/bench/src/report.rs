//! Summary tables over run logs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::log::RunLog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Aggregate of one (dataset, k, config) over its seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset_id: String,
    pub k: usize,
    pub config: String,
    pub runs: usize,
    pub mean_ms: f64,
    /// Lloyd time over this time, same dataset, k and seed; absent without
    /// a Lloyd run.
    pub mean_speedup: Option<f64>,
    pub median_speedup: Option<f64>,
    pub pruning_power: f64,
    pub data_accesses: f64,
    pub bound_accesses: f64,
    pub footprint_bytes: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / 2.0
    }
}

/// Lloyd time over each run's time, keyed by run id.
pub fn speedups(logs: &[RunLog]) -> BTreeMap<String, f64> {
    let mut lloyd: BTreeMap<(&str, usize, u64), u64> = BTreeMap::new();
    for l in logs
        .iter()
        .filter(|l| l.error.is_none() && l.config.is_lloyd())
    {
        lloyd.insert((&l.dataset_id, l.k, l.init_seed), l.total_nanos());
    }
    logs.iter()
        .filter(|l| l.error.is_none())
        .filter_map(|l| {
            let base = lloyd.get(&(l.dataset_id.as_str(), l.k, l.init_seed))?;
            Some((
                l.run_id.clone(),
                *base as f64 / l.total_nanos().max(1) as f64,
            ))
        })
        .collect()
}

/// Rows sorted by mean speedup, fastest first; rows without a speedup come
/// last. Failed runs are left out.
pub fn report_rows(logs: &[RunLog]) -> Vec<ReportRow> {
    let sp = speedups(logs);
    let mut groups: BTreeMap<(String, usize, String), Vec<&RunLog>> = BTreeMap::new();
    for l in logs.iter().filter(|l| l.error.is_none()) {
        groups
            .entry((l.dataset_id.clone(), l.k, l.config.to_string()))
            .or_default()
            .push(l);
    }
    let mut rows: Vec<ReportRow> = groups
        .into_iter()
        .map(|((dataset_id, k, config), runs)| {
            let col =
                |f: &dyn Fn(&RunLog) -> f64| mean(&runs.iter().map(|l| f(l)).collect::<Vec<_>>());
            let speed: Vec<f64> = runs
                .iter()
                .filter_map(|l| sp.get(&l.run_id).copied())
                .collect();
            ReportRow {
                dataset_id,
                k,
                config,
                runs: runs.len(),
                mean_ms: col(&|l| l.total_nanos() as f64 / 1e6),
                mean_speedup: (!speed.is_empty()).then(|| mean(&speed)),
                median_speedup: (!speed.is_empty()).then(|| median(&speed)),
                pruning_power: col(&|l| l.mean_pruning_power()),
                data_accesses: col(&|l| l.totals.data_accesses as f64),
                bound_accesses: col(&|l| l.totals.bound_accesses as f64),
                footprint_bytes: col(&|l| l.footprint_bytes_estimate),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        let key = |r: &ReportRow| r.mean_speedup.unwrap_or(f64::NEG_INFINITY);
        key(b).total_cmp(&key(a))
    });
    rows
}

const HEADER: [&str; 11] = [
    "dataset",
    "k",
    "config",
    "runs",
    "mean_ms",
    "speedup",
    "median_speedup",
    "pruning",
    "data_acc",
    "bound_acc",
    "footprint_b",
];

fn cells(r: &ReportRow) -> [String; 11] {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |s| format!("{s:.3}"));
    [
        r.dataset_id.clone(),
        r.k.to_string(),
        r.config.clone(),
        r.runs.to_string(),
        format!("{:.3}", r.mean_ms),
        opt(r.mean_speedup),
        opt(r.median_speedup),
        format!("{:.4}", r.pruning_power),
        format!("{:.0}", r.data_accesses),
        format!("{:.0}", r.bound_accesses),
        format!("{:.0}", r.footprint_bytes),
    ]
}

/// Renders the rows of [`report_rows`]. Errors when no run succeeded.
pub fn report(logs: &[RunLog], format: Format) -> Result<String> {
    let rows = report_rows(logs);
    if rows.is_empty() {
        return Err(BenchError::Data("no successful runs to report".into()));
    }
    let mut out = String::new();
    match format {
        Format::Json => out = serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            out.push_str(&HEADER.join(","));
            out.push('\n');
            for r in &rows {
                out.push_str(&cells(r).join(","));
                out.push('\n');
            }
        }
        Format::Text => {
            let body: Vec<[String; 11]> = rows.iter().map(cells).collect();
            let widths: Vec<usize> = (0..HEADER.len())
                .map(|c| {
                    body.iter()
                        .map(|r| r[c].len())
                        .chain([HEADER[c].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |fields: Vec<&str>| {
                let padded: Vec<String> = fields
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(c, (f, &w))| {
                        if c < 3 {
                            format!("{f:<w$}")
                        } else {
                            format!("{f:>w$}")
                        }
                    })
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(HEADER.to_vec())).expect("write to string");
            for r in &body {
                writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))
                    .expect("write to string");
            }
        }
    }
    Ok(out)
}
