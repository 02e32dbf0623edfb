//! Per-cluster min-heaps keyed by the gap between a point's lower and upper
//! bound, with drift applied lazily through one offset per cluster.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{reset_nan, Assigner, Motion};
use crate::context::{BoundAudit, RunContext};
use crate::data::{CentroidSet, DataSet};
use crate::metric;
use crate::Scalar;

#[derive(Debug, Clone, Copy)]
struct Entry<T> {
    key: T,
    point: usize,
}

impl<T: Scalar> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Entry<T> {}

impl<T: Scalar> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .partial_cmp(&other.key)
            .unwrap_or(Ordering::Equal)
            .then(self.point.cmp(&other.point))
    }
}

#[derive(Default)]
pub(crate) struct HeapAssigner<T: Scalar> {
    motion: Motion<T>,
    heaps: Vec<BinaryHeap<Reverse<Entry<T>>>>,
    /// Cumulative shrink of every gap stored in the cluster's heap.
    offset: Vec<T>,
    dist: Vec<T>,
    started: bool,
}

impl<T: Scalar> HeapAssigner<T> {
    fn rescan(&mut self, ctx: &mut RunContext, x: &[T], centroids: &CentroidSet<T>) -> (usize, T) {
        reset_nan(&mut self.dist);
        let r = super::scan_all(ctx, x, centroids, &mut self.dist);
        let gap = if r.d2.is_infinite() {
            T::infinity()
        } else {
            r.d2 - r.d1
        };
        (r.best, gap)
    }
}

impl<T: Scalar> Assigner<T> for HeapAssigner<T> {
    fn assign(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        self.motion.advance(ctx, centroids);
        let k = centroids.k();
        if !self.started {
            self.heaps = (0..k).map(|_| BinaryHeap::new()).collect();
            self.offset = vec![T::zero(); k];
            self.dist = vec![T::nan(); k];
            for (i, x) in data.rows().enumerate() {
                ctx.touch_point();
                let (a, gap) = self.rescan(ctx, x, centroids);
                labels[i] = a;
                self.heaps[a].push(Reverse(Entry { key: gap, point: i }));
            }
            ctx.write_bounds(data.n() as u64);
            self.started = true;
            return;
        }
        for j in 0..k {
            self.offset[j] += self.motion.drift[j] + self.motion.max_other(j);
        }

        let mut moved: Vec<(usize, usize, T)> = Vec::new();
        for j in 0..k {
            while let Some(Reverse(top)) = self.heaps[j].peek() {
                if top.key - self.offset[j] > T::zero() {
                    break;
                }
                let i = top.point;
                self.heaps[j].pop();
                ctx.read_bounds(1);
                ctx.touch_point();
                let x = data.row(i);
                let (a, gap) = self.rescan(ctx, x, centroids);
                labels[i] = a;
                moved.push((i, a, gap));
            }
        }
        if ctx.auditing() {
            for j in 0..k {
                for Reverse(e) in self.heaps[j].iter() {
                    let x = data.row(e.point);
                    let gap = (e.key - self.offset[j]).as_f64();
                    let mut d: Vec<f64> = centroids
                        .centers()
                        .map(|c| metric::euclidean(x, c).as_f64())
                        .collect();
                    let da = d[j];
                    d.remove(j);
                    let d2 = d.iter().cloned().fold(f64::INFINITY, f64::min);
                    ctx.audit_check(|| d2 - da >= gap - BoundAudit::tolerance(d2));
                }
            }
        }
        for (i, a, gap) in moved {
            self.heaps[a].push(Reverse(Entry {
                key: gap + self.offset[a],
                point: i,
            }));
            ctx.write_bounds(1);
        }
    }
}
