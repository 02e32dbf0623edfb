//! Plain Lloyd iteration: the reference every accelerated strategy must
//! reproduce label for label.

use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::error::{KmeansError, Result};
use crate::metric;
use crate::run::{drive, RunOptions, RunResult, Stepper};
use crate::Scalar;

/// Sum of squared distances of every point to its labelled centroid.
/// Uncounted.
pub fn sse<T: Scalar>(data: &DataSet<T>, centroids: &CentroidSet<T>, labels: &[usize]) -> f64 {
    data.rows()
        .zip(labels)
        .map(|(x, &j)| metric::sq_euclidean(x, centroids.center(j)).as_f64())
        .sum()
}

/// Nearest centroid of `x` by full scan; ties go to the lowest index.
#[inline]
pub(crate) fn nearest<T: Scalar>(
    ctx: &mut RunContext,
    x: &[T],
    centroids: &CentroidSet<T>,
) -> (usize, T) {
    let mut best = 0;
    let mut best_d = T::infinity();
    for (j, c) in centroids.centers().enumerate() {
        let d = ctx.dist(x, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    (best, best_d)
}

/// Assigns every point to its nearest centroid (lowest index on ties).
/// Performs exactly `n * k` counted distance evaluations.
pub fn assign_full<T: Scalar>(
    ctx: &mut RunContext,
    data: &DataSet<T>,
    centroids: &CentroidSet<T>,
) -> Vec<usize> {
    let mut labels = vec![0; data.n()];
    assign_full_into(ctx, data, centroids, &mut labels);
    labels
}

pub(crate) fn assign_full_into<T: Scalar>(
    ctx: &mut RunContext,
    data: &DataSet<T>,
    centroids: &CentroidSet<T>,
    labels: &mut [usize],
) {
    for (i, x) in data.rows().enumerate() {
        ctx.touch_point();
        labels[i] = nearest(ctx, x, centroids).0;
    }
}

/// Recomputes each centroid as the mean of its members; an empty cluster
/// keeps its previous centroid. Reads every point once.
pub fn refine_full<T: Scalar>(
    ctx: &mut RunContext,
    data: &DataSet<T>,
    labels: &[usize],
    prev: &CentroidSet<T>,
) -> CentroidSet<T> {
    let k = prev.k();
    let d = data.d();
    let mut sums = vec![T::zero(); k * d];
    let mut counts = vec![0usize; k];
    for (x, &j) in data.rows().zip(labels) {
        ctx.touch_point();
        counts[j] += 1;
        for (s, &v) in sums[j * d..(j + 1) * d].iter_mut().zip(x) {
            *s += v;
        }
    }
    let mut out = prev.clone();
    for j in 0..k {
        if counts[j] == 0 {
            continue;
        }
        let inv = T::from_usize_lossy(counts[j]);
        for (c, &s) in out.center_mut(j).iter_mut().zip(&sums[j * d..(j + 1) * d]) {
            *c = s / inv;
        }
    }
    out
}

struct LloydStepper<'a, T> {
    data: &'a DataSet<T>,
}

impl<T: Scalar> Stepper<T> for LloydStepper<'_, T> {
    fn assign(&mut self, ctx: &mut RunContext, centroids: &CentroidSet<T>, labels: &mut [usize]) {
        assign_full_into(ctx, self.data, centroids, labels);
    }

    fn refine(
        &mut self,
        ctx: &mut RunContext,
        labels: &[usize],
        _previous: Option<&[usize]>,
        centroids: &mut CentroidSet<T>,
    ) {
        *centroids = refine_full(ctx, self.data, labels, centroids);
    }
}

pub(crate) fn check_run_inputs<T: Scalar>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    opts: &RunOptions,
) -> Result<()> {
    if init.d() != data.d() {
        return Err(KmeansError::DimensionMismatch {
            expected: data.d(),
            got: init.d(),
        });
    }
    if opts.t_max == 0 {
        return Err(KmeansError::InvalidArgument(
            "t_max must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Alternates [`assign_full`] and [`refine_full`] until no label changes or
/// `opts.t_max` iterations have run.
pub fn run_lloyd<T: Scalar>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    opts: &RunOptions,
) -> Result<RunResult<T>> {
    check_run_inputs(data, init, opts)?;
    Ok(drive(data, init, opts, &mut LloydStepper { data }))
}
