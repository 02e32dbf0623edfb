//! One global lower bound per point, optionally narrowing the rescan to a
//! candidate set.

use super::candidates::{annulus_candidates, exponion_candidates, pami20_candidates, NormIndex};
use super::{floor0, reset_nan, Assigner, Geometry, Motion, Nearest2};
use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::metric;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Filter {
    None,
    /// Norm annulus around the point.
    Annulus,
    /// Ball of radius `2·ub` around the assigned centroid.
    Exponion,
    /// Ball around the assigned centroid sized by its cluster radius.
    Pami20,
}

pub(crate) struct Hamerly<T> {
    filter: Filter,
    motion: Motion<T>,
    geo: Geometry<T>,
    ub: Vec<T>,
    lb: Vec<T>,
    second: Vec<usize>,
    x_norm: Vec<T>,
    radius: Vec<T>,
    dist: Vec<T>,
    started: bool,
}

impl<T: Scalar> Hamerly<T> {
    pub fn new(filter: Filter) -> Self {
        Self {
            filter,
            motion: Motion::default(),
            geo: Geometry::default(),
            ub: Vec::new(),
            lb: Vec::new(),
            second: Vec::new(),
            x_norm: Vec::new(),
            radius: Vec::new(),
            dist: Vec::new(),
            started: false,
        }
    }

    fn seed(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        let n = data.n();
        self.ub = vec![T::zero(); n];
        self.lb = vec![T::zero(); n];
        self.second = vec![0; n];
        self.dist = vec![T::nan(); centroids.k()];
        for (i, x) in data.rows().enumerate() {
            ctx.touch_point();
            reset_nan(&mut self.dist);
            let r = super::scan_all(ctx, x, centroids, &mut self.dist);
            labels[i] = r.best;
            self.ub[i] = r.d1;
            self.lb[i] = r.d2;
            self.second[i] = if r.second == usize::MAX {
                r.best
            } else {
                r.second
            };
        }
        ctx.write_bounds(2 * n as u64);
        if self.filter == Filter::Annulus {
            self.x_norm = data.rows().map(metric::norm).collect();
        }
        self.started = true;
    }
}

impl<T: Scalar> Assigner<T> for Hamerly<T> {
    fn assign(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        self.motion.advance(ctx, centroids);
        if !self.started {
            self.seed(ctx, data, centroids, labels);
            return;
        }
        self.geo.compute(ctx, centroids);
        let k = centroids.k();
        let n = data.n();

        for i in 0..n {
            let a = labels[i];
            self.ub[i] += self.motion.drift[a];
            self.lb[i] = floor0(self.lb[i] - self.motion.max_other(a));
        }
        ctx.read_bounds(2 * n as u64);
        ctx.write_bounds(2 * n as u64);

        let norms = match self.filter {
            Filter::Annulus => Some(NormIndex::new(centroids)),
            _ => None,
        };
        match self.filter {
            Filter::Exponion => self.geo.sort_rows(),
            Filter::Pami20 => {
                self.radius.clear();
                self.radius.resize(k, T::zero());
                for i in 0..n {
                    let r = &mut self.radius[labels[i]];
                    *r = r.max(self.ub[i]);
                }
            }
            _ => {}
        }

        for (i, x) in data.rows().enumerate() {
            let a = labels[i];
            let m = self.geo.s[a].max(self.lb[i]);
            if m > self.ub[i] {
                ctx.check_upper(x, centroids.center(a), self.ub[i]);
                ctx.check_lower_all(x, other_centers(centroids, a), self.lb[i]);
                continue;
            }
            ctx.touch_point();
            reset_nan(&mut self.dist);
            let ub = ctx.dist(x, centroids.center(a));
            self.dist[a] = ub;
            self.ub[i] = ub;
            ctx.write_bounds(1);
            if m > ub {
                ctx.check_lower_all(x, other_centers(centroids, a), self.lb[i]);
                continue;
            }

            // lower bound for every centroid left unmeasured
            let mut outside = T::infinity();
            match self.filter {
                Filter::None => {
                    super::scan_all(ctx, x, centroids, &mut self.dist);
                }
                Filter::Annulus => {
                    let j2 = self.second[i];
                    if self.dist[j2].is_nan() {
                        self.dist[j2] = ctx.dist(x, centroids.center(j2));
                    }
                    let thr = ub.max(self.dist[j2]);
                    let idx = norms.as_ref().expect("norm index built");
                    let xn = self.x_norm[i];
                    for &j in annulus_candidates(xn, thr, idx) {
                        if self.dist[j].is_nan() {
                            self.dist[j] = ctx.dist(x, centroids.center(j));
                        }
                    }
                    let (lo, hi) = idx.range(xn, thr);
                    outside = idx.outside_gap(xn, lo, hi);
                }
                Filter::Exponion | Filter::Pami20 => {
                    let cand = if self.filter == Filter::Exponion {
                        exponion_candidates(a, ub, T::zero(), self.geo.sorted_row(a))
                    } else {
                        pami20_candidates(a, self.radius[a], self.geo.row(a))
                    };
                    for &j in &cand {
                        if self.dist[j].is_nan() {
                            self.dist[j] = ctx.dist(x, centroids.center(j));
                        }
                    }
                    // an unmeasured c_j satisfies d(x, c_j) ≥ ‖c_j − c_a‖ − ub
                    for (j, &c) in self.geo.row(a).iter().enumerate() {
                        if self.dist[j].is_nan() {
                            outside = outside.min(c - ub);
                        }
                    }
                }
            }
            let mut near = Nearest2::empty();
            for (j, &d) in self.dist.iter().enumerate() {
                if !d.is_nan() {
                    near.offer(d, j);
                }
            }
            labels[i] = near.best;
            self.ub[i] = near.d1;
            self.lb[i] = floor0(near.d2.min(outside));
            self.second[i] = if near.second == usize::MAX {
                near.best
            } else {
                near.second
            };
            ctx.write_bounds(2);
        }
    }
}

fn other_centers<T: Scalar>(centroids: &CentroidSet<T>, a: usize) -> impl Iterator<Item = &[T]> {
    centroids
        .centers()
        .enumerate()
        .filter(move |&(j, _)| j != a)
        .map(|(_, c)| c)
}
