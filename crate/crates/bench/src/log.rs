//! One JSON line per run.

use std::io::{BufRead, Write};

use exact_kmeans::{Counters, KnobConfig, RunResult, Scalar};
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iter: usize,
    pub wall_nanos: u64,
    pub assign_nanos: u64,
    pub refine_nanos: u64,
    pub dist_comps: u64,
    pub center_dist_comps: u64,
    pub data_accesses: u64,
    pub node_accesses: u64,
    pub bound_accesses: u64,
    pub bound_updates: u64,
    /// `1 − dist_comps/(n·k)`, clamped to `[0, 1]`.
    pub pruning_power: f64,
    pub changed: usize,
    pub sse: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub iterations: usize,
    pub wall_nanos: u64,
    pub assign_nanos: u64,
    pub refine_nanos: u64,
    pub dist_comps: u64,
    pub center_dist_comps: u64,
    pub data_accesses: u64,
    pub node_accesses: u64,
    pub bound_accesses: u64,
    pub bound_updates: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub schema_version: u32,
    pub run_id: String,
    pub dataset_id: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub config: KnobConfig,
    pub init_seed: u64,
    /// Rows the initial centroids were copied from.
    pub init_indices: Vec<usize>,
    /// Time spent before the first iteration (index construction).
    pub setup_nanos: u64,
    pub iterations: Vec<IterationLog>,
    pub totals: Totals,
    pub converged: bool,
    /// Scalars an index for this run would store, times their byte size.
    pub footprint_bytes_estimate: f64,
    /// Bound audit violations, when the audit ran.
    pub bound_violations: Option<u64>,
    /// Set when the run failed; counters are then empty.
    pub error: Option<String>,
}

/// `1 − comps/(n·k)`, clamped to `[0, 1]`.
pub fn pruning_power(dist_comps: u64, n: usize, k: usize) -> f64 {
    let full = (n * k) as f64;
    if full == 0.0 {
        return 0.0;
    }
    (1.0 - dist_comps as f64 / full).clamp(0.0, 1.0)
}

pub fn iteration_logs<T: Scalar>(result: &RunResult<T>, n: usize, k: usize) -> Vec<IterationLog> {
    result
        .iterations
        .iter()
        .map(|r| {
            let c: &Counters = &r.counters;
            IterationLog {
                iter: r.iter,
                wall_nanos: r.assign_nanos + r.refine_nanos,
                assign_nanos: r.assign_nanos,
                refine_nanos: r.refine_nanos,
                dist_comps: c.dist_comps,
                center_dist_comps: c.center_dist_comps,
                data_accesses: c.data_accesses,
                node_accesses: c.node_accesses,
                bound_accesses: c.bound_accesses,
                bound_updates: c.bound_updates,
                pruning_power: pruning_power(c.dist_comps, n, k),
                changed: r.changed,
                sse: r.sse.is_finite().then_some(r.sse),
            }
        })
        .collect()
}

impl Totals {
    pub fn sum(iters: &[IterationLog]) -> Self {
        iters.iter().fold(Totals::default(), |mut t, i| {
            t.iterations += 1;
            t.wall_nanos += i.wall_nanos;
            t.assign_nanos += i.assign_nanos;
            t.refine_nanos += i.refine_nanos;
            t.dist_comps += i.dist_comps;
            t.center_dist_comps += i.center_dist_comps;
            t.data_accesses += i.data_accesses;
            t.node_accesses += i.node_accesses;
            t.bound_accesses += i.bound_accesses;
            t.bound_updates += i.bound_updates;
            t
        })
    }
}

impl RunLog {
    /// Setup plus iteration wall time.
    pub fn total_nanos(&self) -> u64 {
        self.setup_nanos + self.totals.wall_nanos
    }

    /// Mean pruning power over all iterations.
    pub fn mean_pruning_power(&self) -> f64 {
        if self.iterations.is_empty() {
            return 0.0;
        }
        self.iterations.iter().map(|i| i.pruning_power).sum::<f64>() / self.iterations.len() as f64
    }
}

pub fn write_logs<W: Write>(mut out: W, logs: &[RunLog]) -> Result<()> {
    for l in logs {
        serde_json::to_writer(&mut out, l)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses every line; malformed lines are skipped and described in the
/// second vector.
pub fn read_logs<R: BufRead>(input: R) -> Result<(Vec<RunLog>, Vec<String>)> {
    let mut logs = Vec::new();
    let mut skipped = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RunLog>(&line) {
            Ok(l) => logs.push(l),
            Err(e) => skipped.push(format!("line {}: {e}", i + 1)),
        }
    }
    Ok((logs, skipped))
}
