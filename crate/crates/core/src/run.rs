//! The shared assign/refine loop and the per-run result record.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::context::{BoundAudit, Counters, RunContext};
use crate::data::{CentroidSet, DataSet};
use crate::lloyd::sse;
use crate::Scalar;

pub const DEFAULT_T_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub t_max: usize,
    /// Keep the label vector of every iteration in [`RunResult::history`].
    pub record_history: bool,
    /// Run the shadow bound audit.
    pub audit: bool,
    /// Evaluate the objective after every iteration (uncounted, untimed).
    pub compute_sse: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            record_history: false,
            audit: false,
            compute_sse: true,
        }
    }
}

impl RunOptions {
    pub fn with_t_max(t_max: usize) -> Self {
        Self {
            t_max,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Work done during this iteration only.
    pub counters: Counters,
    pub assign_nanos: u64,
    pub refine_nanos: u64,
    /// Points whose label changed in this iteration.
    pub changed: usize,
    /// Objective of this iteration's labels against the centroids they were
    /// assigned with; `NaN` when not computed.
    pub sse: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult<T> {
    pub centroids: CentroidSet<T>,
    pub labels: Vec<usize>,
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    /// Labels after each iteration, if requested.
    pub history: Vec<Vec<usize>>,
    pub totals: Counters,
    pub audit: Option<BoundAudit>,
}

impl<T> RunResult<T> {
    pub fn iteration_count(&self) -> usize {
        self.iterations.len()
    }
}

/// One algorithm plugged into [`drive`].
pub(crate) trait Stepper<T: Scalar> {
    /// Writes the nearest-centroid label of every point into `labels`.
    /// `labels` holds the previous labels (unspecified before iteration 1).
    fn assign(&mut self, ctx: &mut RunContext, centroids: &CentroidSet<T>, labels: &mut [usize]);

    /// Produces the next centroids from the new labels.
    fn refine(
        &mut self,
        ctx: &mut RunContext,
        labels: &[usize],
        previous: Option<&[usize]>,
        centroids: &mut CentroidSet<T>,
    );
}

pub(crate) fn drive<T: Scalar, S: Stepper<T>>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    opts: &RunOptions,
    stepper: &mut S,
) -> RunResult<T> {
    let mut ctx = if opts.audit {
        RunContext::with_audit()
    } else {
        RunContext::new()
    };
    let mut centroids = init.clone();
    let n = data.n();
    let mut labels = vec![0usize; n];
    let mut previous: Option<Vec<usize>> = None;
    let mut iterations = Vec::new();
    let mut history = Vec::new();
    let mut converged = false;

    for iter in 1..=opts.t_max.max(1) {
        let before = ctx.counters;
        let t0 = Instant::now();
        stepper.assign(&mut ctx, &centroids, &mut labels);
        let assign_nanos = t0.elapsed().as_nanos() as u64;

        let changed = match &previous {
            Some(p) => p.iter().zip(&labels).filter(|(a, b)| a != b).count(),
            None => n,
        };
        let objective = if opts.compute_sse {
            sse(data, &centroids, &labels)
        } else {
            f64::NAN
        };

        let mut refine_nanos = 0;
        if changed > 0 {
            let t1 = Instant::now();
            stepper.refine(&mut ctx, &labels, previous.as_deref(), &mut centroids);
            refine_nanos = t1.elapsed().as_nanos() as u64;
        }
        ctx.counters.iterations += 1;
        ctx.counters.wall_nanos += assign_nanos + refine_nanos;

        iterations.push(IterationRecord {
            iter,
            counters: ctx.counters.since(&before),
            assign_nanos,
            refine_nanos,
            changed,
            sse: objective,
        });
        if opts.record_history {
            history.push(labels.clone());
        }
        if changed == 0 {
            converged = true;
            break;
        }
        match previous.as_mut() {
            Some(p) => p.copy_from_slice(&labels),
            None => previous = Some(labels.clone()),
        }
    }

    RunResult {
        centroids,
        labels,
        iterations,
        converged,
        history,
        totals: ctx.counters,
        audit: ctx.audit().cloned(),
    }
}
