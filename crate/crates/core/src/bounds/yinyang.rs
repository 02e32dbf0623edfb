//! Group lower bounds over clusters of centroids, with an optional regrouping
//! pass every iteration.

use super::{better, floor0, reset_nan, Assigner, Motion};
use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::Scalar;

/// Number of centroid groups: `⌈k/10⌉`.
pub fn group_count(k: usize) -> usize {
    k.div_ceil(10).max(1)
}

const GROUPING_ITERS: usize = 5;

/// Clusters the centroids into `t` groups with a few Lloyd iterations,
/// starting from evenly spaced centroids. Returns the group of every
/// centroid and the flat `t × d` group centers.
pub fn group_centroids<T: Scalar>(
    ctx: &mut RunContext,
    centroids: &CentroidSet<T>,
    t: usize,
) -> (Vec<usize>, Vec<T>) {
    let (k, d) = (centroids.k(), centroids.d());
    let t = t.clamp(1, k);
    let mut centers: Vec<T> = (0..t)
        .flat_map(|g| centroids.center(g * k / t).to_vec())
        .collect();
    let mut group = vec![0; k];
    for _ in 0..GROUPING_ITERS {
        let changed = nearest_groups(ctx, centroids, &centers, &mut group);
        group_means(centroids, &group, &mut centers);
        if !changed {
            break;
        }
    }
    debug_assert_eq!(centers.len(), t * d);
    (group, centers)
}

pub(crate) fn nearest_groups<T: Scalar>(
    ctx: &mut RunContext,
    centroids: &CentroidSet<T>,
    centers: &[T],
    group: &mut [usize],
) -> bool {
    let d = centroids.d();
    let mut changed = false;
    for (j, c) in centroids.centers().enumerate() {
        let mut best = (0, T::infinity());
        for (g, gc) in centers.chunks_exact(d).enumerate() {
            let v = ctx.center_dist(c, gc);
            if v < best.1 {
                best = (g, v);
            }
        }
        if group[j] != best.0 {
            changed = true;
            group[j] = best.0;
        }
    }
    changed
}

pub(crate) fn group_means<T: Scalar>(
    centroids: &CentroidSet<T>,
    group: &[usize],
    centers: &mut [T],
) {
    let d = centroids.d();
    let t = centers.len() / d;
    let mut sums = vec![T::zero(); t * d];
    let mut counts = vec![0usize; t];
    for (j, c) in centroids.centers().enumerate() {
        counts[group[j]] += 1;
        for (s, &v) in sums[group[j] * d..(group[j] + 1) * d].iter_mut().zip(c) {
            *s += v;
        }
    }
    for g in 0..t {
        if counts[g] > 0 {
            let m = T::from_usize_lossy(counts[g]);
            for (o, &s) in centers[g * d..(g + 1) * d]
                .iter_mut()
                .zip(&sums[g * d..(g + 1) * d])
            {
                *o = s / m;
            }
        }
    }
}

pub(crate) struct Yinyang<T> {
    regroup: bool,
    motion: Motion<T>,
    t: usize,
    group: Vec<usize>,
    centers: Vec<T>,
    members: Vec<Vec<usize>>,
    ub: Vec<T>,
    glb: Vec<T>,
    prev: Vec<T>,
    dist: Vec<T>,
    examined: Vec<bool>,
    started: bool,
}

impl<T: Scalar> Yinyang<T> {
    pub fn new(regroup: bool) -> Self {
        Self {
            regroup,
            motion: Motion::default(),
            t: 0,
            group: Vec::new(),
            centers: Vec::new(),
            members: Vec::new(),
            ub: Vec::new(),
            glb: Vec::new(),
            prev: Vec::new(),
            dist: Vec::new(),
            examined: Vec::new(),
            started: false,
        }
    }

    fn rebuild_members(&mut self) {
        self.members = vec![Vec::new(); self.t];
        for (j, &g) in self.group.iter().enumerate() {
            self.members[g].push(j);
        }
    }

    /// Group bounds of point `i` from a complete distance row.
    fn bounds_from_row(&mut self, i: usize, best: usize) {
        let t = self.t;
        let row = &mut self.glb[i * t..(i + 1) * t];
        row.iter_mut().for_each(|v| *v = T::infinity());
        for (j, &d) in self.dist.iter().enumerate() {
            if j != best {
                let g = self.group[j];
                row[g] = row[g].min(d);
            }
        }
    }
}

impl<T: Scalar> Assigner<T> for Yinyang<T> {
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
            let (group, centers) = group_centroids(ctx, centroids, group_count(k));
            self.t = centers.len() / centroids.d();
            self.group = group;
            self.centers = centers;
            self.rebuild_members();
            self.ub = vec![T::zero(); n];
            self.glb = vec![T::infinity(); n * self.t];
            self.prev = vec![T::zero(); self.t];
            self.dist = vec![T::nan(); k];
            self.examined = vec![false; self.t];
            for (i, x) in data.rows().enumerate() {
                ctx.touch_point();
                reset_nan(&mut self.dist);
                let r = super::scan_all(ctx, x, centroids, &mut self.dist);
                labels[i] = r.best;
                self.ub[i] = r.d1;
                self.bounds_from_row(i, r.best);
            }
            ctx.write_bounds((n * (self.t + 1)) as u64);
            self.started = true;
            return;
        }
        let t = self.t;
        let old_group = self.group.clone();
        if self.regroup {
            group_means(centroids, &self.group, &mut self.centers);
            nearest_groups(ctx, centroids, &self.centers, &mut self.group);
            self.rebuild_members();
        }
        // largest drift for every (old group, new group) pair that has members
        let mut pairs: Vec<(usize, usize, T)> = Vec::new();
        for j in 0..k {
            let (g, h, v) = (old_group[j], self.group[j], self.motion.drift[j]);
            match pairs.iter_mut().find(|p| p.0 == g && p.1 == h) {
                Some(p) => p.2 = p.2.max(v),
                None => pairs.push((g, h, v)),
            }
        }

        for (i, x) in data.rows().enumerate() {
            let a = labels[i];
            let mut ub = self.ub[i] + self.motion.drift[a];
            let row = &mut self.glb[i * t..(i + 1) * t];
            self.prev.copy_from_slice(row);
            row.iter_mut().for_each(|v| *v = T::infinity());
            for &(g, h, v) in &pairs {
                row[h] = row[h].min(floor0(self.prev[g] - v));
            }
            ctx.read_bounds((t + 1) as u64);
            ctx.write_bounds((t + 1) as u64);

            let global = row.iter().cloned().fold(T::infinity(), T::min);
            if global > ub {
                self.ub[i] = ub;
                ctx.check_upper(x, centroids.center(a), ub);
                ctx.check_lower_all(
                    x,
                    centroids
                        .centers()
                        .enumerate()
                        .filter(|&(j, _)| j != a)
                        .map(|(_, c)| c),
                    global,
                );
                continue;
            }
            ctx.touch_point();
            reset_nan(&mut self.dist);
            ub = ctx.dist(x, centroids.center(a));
            self.dist[a] = ub;
            if global > ub {
                self.ub[i] = ub;
                ctx.check_lower_all(
                    x,
                    centroids
                        .centers()
                        .enumerate()
                        .filter(|&(j, _)| j != a)
                        .map(|(_, c)| c),
                    global,
                );
                continue;
            }

            let mut best = a;
            self.examined.iter_mut().for_each(|e| *e = false);
            for h in 0..t {
                if row[h] > ub {
                    ctx.check_lower_all(
                        x,
                        self.members[h]
                            .iter()
                            .filter(|&&j| j != a)
                            .map(|&j| centroids.center(j)),
                        row[h],
                    );
                    continue;
                }
                self.examined[h] = true;
                for &j in &self.members[h] {
                    if !self.dist[j].is_nan() {
                        continue;
                    }
                    let local = floor0(self.prev[old_group[j]] - self.motion.drift[j]);
                    if local > ub {
                        ctx.check_lower(x, centroids.center(j), local);
                        continue;
                    }
                    let d = ctx.dist(x, centroids.center(j));
                    self.dist[j] = d;
                    if better(d, j, ub, best) {
                        best = j;
                        ub = d;
                    }
                }
            }
            // unmeasured members keep their decayed local bound
            for h in 0..t {
                if !self.examined[h] {
                    continue;
                }
                let mut m = T::infinity();
                for &j in &self.members[h] {
                    if j == best {
                        continue;
                    }
                    let v = self.dist[j];
                    let bound = if v.is_nan() {
                        floor0(self.prev[old_group[j]] - self.motion.drift[j])
                    } else {
                        v
                    };
                    m = m.min(bound);
                }
                row[h] = m;
            }
            if best != a {
                let ha = self.group[a];
                if !self.examined[ha] {
                    row[ha] = row[ha].min(self.dist[a]);
                }
            }
            labels[i] = best;
            self.ub[i] = ub;
            ctx.write_bounds((t + 1) as u64);
        }
    }
}
