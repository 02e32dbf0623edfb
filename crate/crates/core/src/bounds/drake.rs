//! A short sorted list of lower bounds per point plus one bound for the rest.

use super::{better, floor0, reset_nan, Assigner, Motion};
use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::Scalar;

/// Number of sorted bounds kept per point: `⌈k/4⌉`, at least one and at most
/// `k − 1`.
pub fn drake_width(k: usize) -> usize {
    k.div_ceil(4).clamp(1, k.saturating_sub(1).max(1))
}

#[derive(Default)]
pub(crate) struct Drake<T: Scalar> {
    motion: Motion<T>,
    b: usize,
    ub: Vec<T>,
    /// `b` entries per point: bound and centroid, ascending by bound.
    lb: Vec<(T, usize)>,
    /// Bound on every centroid outside the list and the assigned one.
    rest: Vec<T>,
    dist: Vec<T>,
    started: bool,
}

impl<T: Scalar> Drake<T> {
    /// Rebuilds the list of point `i` from the complete distance row.
    fn rebuild(&mut self, i: usize, labels: &mut [usize]) {
        let k = self.dist.len();
        let mut order: Vec<usize> = (0..k).collect();
        let dist = &self.dist;
        order.sort_by(|&p, &q| dist[p].partial_cmp(&dist[q]).unwrap().then(p.cmp(&q)));
        let a = order[0];
        labels[i] = a;
        self.ub[i] = dist[a];
        let b = self.b;
        for (z, &j) in order[1..].iter().take(b).enumerate() {
            self.lb[i * b + z] = (dist[j], j);
        }
        self.rest[i] = order.get(b + 1).map_or(T::infinity(), |&j| dist[j]);
    }
}

impl<T: Scalar> Assigner<T> for Drake<T> {
    fn assign(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        self.motion.advance(ctx, centroids);
        let (n, k) = (data.n(), centroids.k());
        if !self.started {
            self.b = drake_width(k);
            self.ub = vec![T::zero(); n];
            self.lb = vec![(T::infinity(), 0); n * self.b];
            self.rest = vec![T::infinity(); n];
            self.dist = vec![T::nan(); k];
            for (i, x) in data.rows().enumerate() {
                ctx.touch_point();
                reset_nan(&mut self.dist);
                super::scan_all(ctx, x, centroids, &mut self.dist);
                self.rebuild(i, labels);
            }
            ctx.write_bounds((n * (self.b + 2)) as u64);
            self.started = true;
            return;
        }
        let b = self.b;
        if k == 1 {
            return;
        }
        let max_drift = self.motion.max();

        for (i, x) in data.rows().enumerate() {
            let a = labels[i];
            let mut ub = self.ub[i] + self.motion.drift[a];
            // decay, then make the list non-decreasing and capped by `rest`
            let mut cap = floor0(self.rest[i] - max_drift);
            self.rest[i] = cap;
            let list = &mut self.lb[i * b..(i + 1) * b];
            for e in list.iter_mut().rev() {
                let v = floor0(e.0 - self.motion.drift[e.1]).min(cap);
                e.0 = v;
                cap = v;
            }
            ctx.read_bounds((b + 2) as u64);
            ctx.write_bounds((b + 2) as u64);

            if list[0].0 > ub {
                self.ub[i] = ub;
                ctx.check_upper(x, centroids.center(a), ub);
                ctx.check_lower_all(
                    x,
                    centroids
                        .centers()
                        .enumerate()
                        .filter(|&(j, _)| j != a)
                        .map(|(_, c)| c),
                    list[0].0,
                );
                continue;
            }
            ctx.touch_point();
            reset_nan(&mut self.dist);
            ub = ctx.dist(x, centroids.center(a));
            self.dist[a] = ub;

            let mut best = a;
            let mut stop = None;
            for z in 0..b {
                let (l, j) = list[z];
                if l > ub {
                    stop = Some(z);
                    break;
                }
                let d = ctx.dist(x, centroids.center(j));
                self.dist[j] = d;
                if better(d, j, ub, best) {
                    best = j;
                    ub = d;
                }
            }
            let stop = match stop {
                Some(z) => z,
                None if self.rest[i] > ub => b,
                None => {
                    super::scan_all(ctx, x, centroids, &mut self.dist);
                    self.rebuild(i, labels);
                    ctx.write_bounds((b + 2) as u64);
                    continue;
                }
            };
            if ctx.auditing() {
                let bound = if stop < b { list[stop].0 } else { self.rest[i] };
                let skipped: Vec<usize> = (0..k).filter(|&j| self.dist[j].is_nan()).collect();
                for j in skipped {
                    ctx.check_lower(x, centroids.center(j), bound);
                }
            }
            // measured entries and the old assignment trade places with the new best
            let mut entries: Vec<(T, usize)> = Vec::with_capacity(b + 1);
            entries.push((self.dist[a], a));
            entries.extend(list[..stop].iter().map(|&(_, j)| (self.dist[j], j)));
            entries.extend_from_slice(&list[stop..]);
            entries.retain(|e| e.1 != best);
            let rest = self.rest[i];
            for e in entries.iter_mut() {
                e.0 = e.0.min(rest);
            }
            entries.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap().then(p.1.cmp(&q.1)));
            list.copy_from_slice(&entries[..b]);
            labels[i] = best;
            self.ub[i] = ub;
            ctx.write_bounds((b + 1) as u64);
        }
    }
}
