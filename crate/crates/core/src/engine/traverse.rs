//! Queue-driven assignment over tree nodes and points.

use std::collections::VecDeque;
use std::rc::Rc;
use std::time::Instant;

use super::cluster::{incremental_refine, transfer, ClusterRecord};
use super::config::{IndexMode, KnobConfig};
use super::Knobs;
use crate::bounds::{
    better, floor0, geometric_lb_2d, group_centroids, group_count, group_means, nearest_groups,
    Geometry,
};
use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::metric;
use crate::run::Stepper;
use crate::tree::{box_dominates, Tree, TreeKind};
use crate::Scalar;

const BLOCKS: usize = 2;

/// Where an iteration starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Start {
    /// Everything back in one cluster as the root (or all points).
    Root,
    /// Whatever each cluster held after the previous iteration.
    Held,
}

/// What a split node hands to its children.
struct Parent<T> {
    n1: usize,
    d1: T,
    /// Lower bound (or exact distance) from the parent pivot to every centroid.
    vals: Vec<T>,
    /// `min` of `vals` over centroids other than `n1`.
    lbg: T,
    /// Same, per centroid group.
    grp: Vec<T>,
}

struct Item<T> {
    obj: usize,
    holder: usize,
    /// Centroids that can still be nearest for some point of the object;
    /// `None` means all.
    cand: Option<Rc<[usize]>>,
    parent: Option<Rc<Parent<T>>>,
    psi: T,
}

/// Bounds stored per object (nodes first, then points) between iterations.
#[derive(Default)]
struct Slots<T> {
    valid: Vec<bool>,
    stamp: Vec<usize>,
    ub: Vec<T>,
    bc: Vec<usize>,
    lbg: Vec<T>,
    grp: Vec<T>,
    lbc: Vec<T>,
}

pub(super) struct Traversal<'a, T: Scalar, F> {
    data: &'a DataSet<T>,
    tree: Option<&'a Tree<T>>,
    mode: IndexMode,
    kd: bool,
    knobs: Knobs,
    k: usize,
    n_nodes: usize,
    clusters: Vec<ClusterRecord<T>>,
    slots: Slots<T>,
    /// Centroid version of the current assignment.
    version: usize,
    prev: Option<CentroidSet<T>>,
    /// Cumulative drift per centroid, `(version + 1) × k`.
    cum: Vec<T>,
    cum_max: Vec<T>,
    /// Cumulative largest drift per group, `(version + 1) × t`.
    cum_grp: Vec<T>,
    /// First version of the current grouping.
    epoch: usize,
    geo: Geometry<T>,
    t: usize,
    group: Vec<usize>,
    group_centers: Vec<T>,
    obj_norm: Vec<T>,
    obj_blocks: Vec<T>,
    c_norm: Vec<T>,
    c_blocks: Vec<T>,
    iteration: usize,
    first_nanos: u128,
    committed: Option<Start>,
    queue: VecDeque<Item<T>>,
    vals: Vec<T>,
    inspect: F,
}

impl<'a, T: Scalar, F: FnMut(&[ClusterRecord<T>])> Traversal<'a, T, F> {
    pub fn new(
        data: &'a DataSet<T>,
        tree: Option<&'a Tree<T>>,
        init: &CentroidSet<T>,
        config: &KnobConfig,
        inspect: F,
    ) -> Self {
        let (n, d, k) = (data.n(), data.d(), init.k());
        let knobs = if config.index_mode == IndexMode::Pure {
            Knobs::default()
        } else {
            let mut kn = Knobs::for_strategy(config.bound_strategy);
            kn.drift2d &= d == 2;
            kn
        };
        let n_nodes = tree.map_or(0, |t| t.len());
        let m = n_nodes + n;
        let t = if knobs.group {
            group_count(k).min(k)
        } else {
            0
        };
        let mut slots = Slots::default();
        if knobs.any() {
            slots.valid = vec![false; m];
            slots.stamp = vec![0; m];
            slots.ub = vec![T::zero(); m];
            slots.bc = vec![0; m];
            if knobs.global {
                slots.lbg = vec![T::zero(); m];
            }
            if knobs.group {
                slots.grp = vec![T::zero(); m * t];
            }
            if knobs.local {
                slots.lbc = vec![T::zero(); m * k];
            }
        }
        let pivot = |o: usize| -> &[T] {
            match tree {
                Some(tr) if o < n_nodes => &tr.node(o).pivot,
                _ => data.row(o - n_nodes),
            }
        };
        let obj_norm = if knobs.annulus || knobs.vector {
            (0..m).map(|o| metric::norm(pivot(o))).collect()
        } else {
            Vec::new()
        };
        let obj_blocks = if knobs.vector {
            (0..m)
                .flat_map(|o| metric::block_norms(pivot(o), BLOCKS))
                .collect()
        } else {
            Vec::new()
        };

        let mut s = Self {
            data,
            tree,
            mode: config.index_mode,
            kd: config.index_kind == TreeKind::Kd,
            knobs,
            k,
            n_nodes,
            clusters: vec![ClusterRecord::empty(d); k],
            slots,
            version: 0,
            prev: None,
            cum: vec![T::zero(); k],
            cum_max: vec![T::zero()],
            cum_grp: vec![T::zero(); t],
            epoch: 0,
            geo: Geometry::default(),
            t,
            group: Vec::new(),
            group_centers: Vec::new(),
            obj_norm,
            obj_blocks,
            c_norm: Vec::new(),
            c_blocks: Vec::new(),
            iteration: 0,
            first_nanos: 0,
            committed: None,
            queue: VecDeque::new(),
            vals: vec![T::zero(); k],
            inspect,
        };
        s.seed_root();
        s
    }

    /// Puts everything into cluster 0 as a single held object.
    fn seed_root(&mut self) {
        self.clusters.iter_mut().for_each(ClusterRecord::clear);
        let c0 = &mut self.clusters[0];
        match self.tree {
            Some(tr) => {
                c0.add(&tr.root().sv, tr.root().num);
                c0.nodes.push(0);
            }
            None => {
                c0.add(&self.data.column_sums(), self.data.n());
                c0.points.extend(0..self.data.n());
            }
        }
    }

    fn start_for(&self, iteration: usize) -> Start {
        match self.mode {
            IndexMode::Pure | IndexMode::IndexMultiple => Start::Root,
            IndexMode::None | IndexMode::IndexSingle => Start::Held,
            IndexMode::Adaptive => match iteration {
                1 => Start::Root,
                2 => Start::Held,
                _ => self.committed.unwrap_or(Start::Held),
            },
        }
    }

    /// The traversal adaptive mode settled on, once decided.
    #[cfg(test)]
    fn committed(&self) -> Option<Start> {
        self.committed
    }

    fn pivot(&self, obj: usize) -> &'a [T] {
        match self.tree {
            Some(tr) if obj < self.n_nodes => &tr.node(obj).pivot,
            _ => self.data.row(obj - self.n_nodes),
        }
    }

    /// Drift bookkeeping, inter-center table and grouping for a new version.
    fn advance(&mut self, ctx: &mut RunContext, centroids: &CentroidSet<T>) {
        let k = self.k;
        if let Some(prev) = &self.prev {
            self.version += 1;
            let base = (self.version - 1) * k;
            let mut mx = T::zero();
            let mut gmax = vec![T::zero(); self.t];
            for j in 0..k {
                let dj = ctx.center_dist(prev.center(j), centroids.center(j));
                let v = self.cum[base + j] + dj;
                self.cum.push(v);
                mx = mx.max(dj);
                if self.t > 0 {
                    let g = self.group[j];
                    gmax[g] = gmax[g].max(dj);
                }
            }
            let last = *self.cum_max.last().unwrap();
            self.cum_max.push(last + mx);
            if self.knobs.regroup && self.t > 1 {
                group_means(centroids, &self.group, &mut self.group_centers);
                if nearest_groups(ctx, centroids, &self.group_centers, &mut self.group) {
                    self.epoch = self.version;
                }
            }
            let gbase = (self.version - 1) * self.t;
            for (g, m) in gmax.iter().enumerate() {
                let v = self.cum_grp[gbase + g] + *m;
                self.cum_grp.push(v);
            }
        } else if self.t > 0 {
            let (group, centers) = group_centroids(ctx, centroids, self.t);
            self.group = group;
            self.group_centers = centers;
        }
        if self.knobs.any() {
            self.geo.compute(ctx, centroids);
        }
        if self.knobs.annulus || self.knobs.vector {
            self.c_norm = centroids.centers().map(metric::norm).collect();
        }
        if self.knobs.vector {
            self.c_blocks = centroids
                .centers()
                .flat_map(|c| metric::block_norms(c, BLOCKS))
                .collect();
        }
    }

    #[inline]
    fn drift_since(&self, stamp: usize, j: usize) -> T {
        self.cum[self.version * self.k + j] - self.cum[stamp * self.k + j]
    }

    /// Fills `vals` with lower bounds at the object's pivot and returns the
    /// upper bound, assigned centroid and global bound, or `None` when the
    /// object carries no bounds.
    fn load_view(
        &mut self,
        ctx: &mut RunContext,
        centroids: &CentroidSet<T>,
        item: &Item<T>,
    ) -> Option<(T, usize, T)> {
        if !self.knobs.any() {
            return None;
        }
        let (k, kn) = (self.k, self.knobs);
        if let Some(p) = &item.parent {
            let psi = item.psi;
            let lbg = floor0(p.lbg - psi);
            for j in 0..k {
                let mut v = T::zero();
                if kn.local {
                    v = v.max(p.vals[j] - psi);
                }
                if j != p.n1 {
                    if kn.group {
                        v = v.max(p.grp[self.group[j]] - psi);
                    }
                    if kn.global {
                        v = v.max(lbg);
                    }
                }
                self.vals[j] = floor0(v);
            }
            ctx.read_bounds(k as u64);
            let g = if kn.global { lbg } else { T::neg_infinity() };
            let (ub, bc) = (p.d1 + psi, p.n1);
            self.audit_view(ctx, centroids, item.obj, ub, bc);
            return Some((ub, bc, g));
        }
        let o = item.obj;
        if !self.slots.valid[o] {
            return None;
        }
        let stamp = self.slots.stamp[o];
        let bc = self.slots.bc[o];
        let ub = self.slots.ub[o] + self.drift_since(stamp, bc);
        let lbg = if kn.global {
            floor0(self.slots.lbg[o] - (self.cum_max[self.version] - self.cum_max[stamp]))
        } else {
            T::neg_infinity()
        };
        let groups_ok = kn.group && stamp >= self.epoch;
        let geometric = kn.drift2d && kn.local && stamp + 1 == self.version;
        for j in 0..k {
            let mut v = T::zero();
            if kn.local {
                let stored = self.slots.lbc[o * k + j];
                v = v.max(stored - self.drift_since(stamp, j));
                if geometric {
                    let prev = self.prev.as_ref().expect("previous centroids");
                    let gb = geometric_lb_2d(
                        prev.center(j),
                        stored,
                        centroids.center(bc),
                        ub,
                        centroids.center(j),
                    );
                    v = v.max(gb);
                }
            }
            if j != bc {
                if groups_ok {
                    let g = self.group[j];
                    let decay =
                        self.cum_grp[self.version * self.t + g] - self.cum_grp[stamp * self.t + g];
                    v = v.max(self.slots.grp[o * self.t + g] - decay);
                }
                if kn.global {
                    v = v.max(lbg);
                }
            }
            self.vals[j] = floor0(v);
        }
        ctx.read_bounds((k + self.t + 2) as u64);
        self.audit_view(ctx, centroids, o, ub, bc);
        Some((ub, bc, lbg))
    }

    fn audit_view(
        &self,
        ctx: &mut RunContext,
        centroids: &CentroidSet<T>,
        obj: usize,
        ub: T,
        bc: usize,
    ) {
        if !ctx.auditing() {
            return;
        }
        let pivot = self.pivot(obj);
        ctx.check_upper(pivot, centroids.center(bc), ub);
        for (j, &lb) in self.vals.iter().enumerate() {
            ctx.check_lower(pivot, centroids.center(j), lb);
        }
    }

    /// Stores `vals` as the object's bounds at the current version.
    fn store(&mut self, ctx: &mut RunContext, obj: usize, n1: usize, ub: T) {
        if !self.knobs.any() {
            return;
        }
        let (k, t) = (self.k, self.t);
        let s = &mut self.slots;
        s.valid[obj] = true;
        s.stamp[obj] = self.version;
        s.ub[obj] = ub;
        s.bc[obj] = n1;
        let mut lbg = T::infinity();
        for (j, &v) in self.vals.iter().enumerate() {
            if j != n1 {
                lbg = lbg.min(v);
            }
        }
        if self.knobs.global {
            s.lbg[obj] = lbg;
        }
        if self.knobs.group {
            let row = &mut s.grp[obj * t..(obj + 1) * t];
            row.iter_mut().for_each(|v| *v = T::infinity());
            for (j, &v) in self.vals.iter().enumerate() {
                if j != n1 {
                    let g = self.group[j];
                    row[g] = row[g].min(v);
                }
            }
        }
        if self.knobs.local {
            s.lbc[obj * k..(obj + 1) * k].copy_from_slice(&self.vals);
        }
        ctx.write_bounds((k + t + 2) as u64);
    }

    /// Hands the object to cluster `j` and records it there.
    fn settle(&mut self, obj: usize, holder: usize, j: usize, labels: &mut [usize]) {
        match self.tree {
            Some(tr) if obj < self.n_nodes => {
                let node = tr.node(obj);
                transfer(&mut self.clusters, holder, j, &node.sv, node.num);
                for &p in tr.covered(obj) {
                    labels[p] = j;
                }
                self.clusters[j].nodes.push(obj);
            }
            _ => {
                let p = obj - self.n_nodes;
                transfer(&mut self.clusters, holder, j, self.data.row(p), 1);
                labels[p] = j;
                self.clusters[j].points.push(p);
            }
        }
    }

    fn process(
        &mut self,
        ctx: &mut RunContext,
        centroids: &CentroidSet<T>,
        item: Item<T>,
        labels: &mut [usize],
    ) {
        let k = self.k;
        let obj = item.obj;
        let is_node = obj < self.n_nodes;
        let r = match self.tree {
            Some(tr) if is_node => tr.node(obj).radius,
            _ => T::zero(),
        };
        if is_node {
            ctx.touch_node();
        } else {
            ctx.touch_point();
        }
        let pivot = self.pivot(obj);
        let cand: Vec<usize> = match &item.cand {
            Some(c) => c.to_vec(),
            None => (0..k).collect(),
        };
        let view = self.load_view(ctx, centroids, &item);
        if view.is_none() {
            self.vals.iter_mut().for_each(|v| *v = T::zero());
        }
        if item.cand.is_some() && cand.len() == 1 {
            let ub = view.map_or(T::infinity(), |v| v.0);
            self.settle(obj, item.holder, cand[0], labels);
            self.store(ctx, obj, cand[0], ub);
            return;
        }

        let (mut n1, mut d1) = (usize::MAX, T::infinity());
        if let Some((ub, bc, lbg)) = view {
            let gate = (lbg - r).max(self.geo.s[bc]);
            if gate > ub + r {
                ctx.check_upper(pivot, centroids.center(bc), ub);
                self.settle(obj, item.holder, bc, labels);
                self.store(ctx, obj, bc, ub);
                return;
            }
            let exact = ctx.dist(pivot, centroids.center(bc));
            self.vals[bc] = exact;
            if gate > exact + r {
                self.settle(obj, item.holder, bc, labels);
                self.store(ctx, obj, bc, exact);
                return;
            }
            n1 = bc;
            d1 = exact;
        }

        let kn = self.knobs;
        for &j in &cand {
            if j == n1 {
                continue;
            }
            if let Some((_, bc, _)) = view {
                let mut lb = self.vals[j];
                if kn.annulus {
                    lb = lb.max((self.c_norm[j] - self.obj_norm[obj]).abs());
                }
                if kn.exponion {
                    lb = lb.max(self.geo.cc(bc, j) - self.vals[bc]);
                }
                if lb - r > d1 + r {
                    ctx.check_lower(pivot, centroids.center(j), lb);
                    self.vals[j] = lb;
                    continue;
                }
                if kn.vector {
                    let vb = metric::block_lower_bound(
                        self.obj_norm[obj],
                        self.c_norm[j],
                        &self.obj_blocks[obj * BLOCKS..(obj + 1) * BLOCKS],
                        &self.c_blocks[j * BLOCKS..(j + 1) * BLOCKS],
                    );
                    lb = lb.max(vb);
                    if lb - r > d1 + r {
                        ctx.check_lower(pivot, centroids.center(j), lb);
                        self.vals[j] = lb;
                        continue;
                    }
                }
            }
            let dj = ctx.dist(pivot, centroids.center(j));
            self.vals[j] = dj;
            if better(dj, j, d1, n1) {
                n1 = j;
                d1 = dj;
            }
        }

        if !is_node || cand.len() == 1 {
            self.settle(obj, item.holder, n1, labels);
            self.store(ctx, obj, n1, d1);
            return;
        }
        let mut d2 = T::infinity();
        for &j in &cand {
            if j != n1 {
                d2 = d2.min(self.vals[j]);
            }
        }
        if d2 - r > d1 + r {
            self.settle(obj, item.holder, n1, labels);
            self.store(ctx, obj, n1, d1);
            return;
        }
        let tree = self.tree.expect("nodes come from a tree");
        let node = tree.node(obj);
        let mut survivors: Vec<usize> = cand
            .iter()
            .copied()
            .filter(|&j| self.vals[j] - r <= d1 + r)
            .collect();
        if self.kd {
            let (lo, hi) = node.bbox.as_ref().expect("kd node has a box");
            let best = centroids.center(n1);
            survivors.retain(|&j| j == n1 || !box_dominates(lo, hi, best, centroids.center(j)));
        }
        if survivors.len() == 1 {
            self.settle(obj, item.holder, n1, labels);
            self.store(ctx, obj, n1, d1);
            return;
        }
        if obj == 0 {
            self.store(ctx, obj, n1, d1);
        }
        let parent = kn.any().then(|| {
            let mut lbg = T::infinity();
            let mut grp = vec![T::infinity(); self.t];
            for (j, &v) in self.vals.iter().enumerate() {
                if j != n1 {
                    lbg = lbg.min(v);
                    if self.t > 0 {
                        let g = self.group[j];
                        grp[g] = grp[g].min(v);
                    }
                }
            }
            Rc::new(Parent {
                n1,
                d1,
                vals: self.vals.clone(),
                lbg,
                grp,
            })
        });
        // each child only needs the survivors its own ball can reach
        let vals = &self.vals;
        let reach = |extent: T| -> Rc<[usize]> {
            survivors
                .iter()
                .copied()
                .filter(|&j| vals[j] - extent <= d1 + extent)
                .collect()
        };
        let mut children = Vec::new();
        if node.is_leaf() {
            for &p in tree.covered(obj) {
                let psi = tree.point_psi(p);
                children.push((self.n_nodes + p, psi, reach(psi)));
            }
        } else {
            for &c in &node.children {
                let child = tree.node(c);
                children.push((c, child.psi, reach(child.psi + child.radius)));
            }
        }
        for (child, psi, cand) in children {
            self.queue.push_back(Item {
                obj: child,
                holder: item.holder,
                cand: Some(cand),
                parent: parent.clone(),
                psi,
            });
        }
    }
}

impl<T: Scalar, F: FnMut(&[ClusterRecord<T>])> Stepper<T> for Traversal<'_, T, F> {
    fn assign(&mut self, ctx: &mut RunContext, centroids: &CentroidSet<T>, labels: &mut [usize]) {
        let t0 = Instant::now();
        self.iteration += 1;
        self.advance(ctx, centroids);
        if self.start_for(self.iteration) == Start::Root {
            self.seed_root();
        }
        for j in 0..self.k {
            let rec = &mut self.clusters[j];
            let nodes = std::mem::take(&mut rec.nodes);
            let points = std::mem::take(&mut rec.points);
            for obj in nodes {
                self.queue.push_back(Item {
                    obj,
                    holder: j,
                    cand: None,
                    parent: None,
                    psi: T::zero(),
                });
            }
            for p in points {
                self.queue.push_back(Item {
                    obj: self.n_nodes + p,
                    holder: j,
                    cand: None,
                    parent: None,
                    psi: T::zero(),
                });
            }
        }
        while let Some(item) = self.queue.pop_front() {
            self.process(ctx, centroids, item, labels);
        }
        self.prev = Some(centroids.clone());

        if self.mode == IndexMode::Adaptive {
            let spent = t0.elapsed().as_nanos();
            match self.iteration {
                1 => self.first_nanos = spent,
                2 => {
                    self.committed = Some(if self.first_nanos >= spent {
                        Start::Held
                    } else {
                        Start::Root
                    });
                }
                _ => {}
            }
        }
    }

    fn refine(
        &mut self,
        _: &mut RunContext,
        _: &[usize],
        _: Option<&[usize]>,
        centroids: &mut CentroidSet<T>,
    ) {
        *centroids = incremental_refine(&self.clusters, centroids);
        (self.inspect)(&self.clusters);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::{drive, RunOptions};

    fn line() -> (DataSet<f64>, CentroidSet<f64>) {
        let rows: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                [
                    (i % 8) as f64 + if i < 32 { 0.0 } else { 50.0 },
                    (i / 8) as f64,
                ]
            })
            .collect();
        let data = DataSet::from_rows(&rows).unwrap();
        let init = CentroidSet::from_rows(&[[0.0, 0.0], [1.0, 1.0], [60.0, 5.0]]).unwrap();
        (data, init)
    }

    #[test]
    fn adaptive_commits_after_two_iterations() {
        let (data, init) = line();
        let tree = Tree::build_ball(&data, 4);
        let cfg = KnobConfig::adaptive_yinyang();
        let mut st = Traversal::new(&data, Some(&tree), &init, &cfg, |_| {});
        assert_eq!(st.committed(), None);
        let res = drive(&data, &init, &RunOptions::with_t_max(5), &mut st);
        assert!(res.iterations.len() >= 2);
        assert!(st.committed().is_some());
    }

    #[test]
    fn far_cluster_settles_as_whole_nodes() {
        let (data, init) = line();
        let tree = Tree::build_ball(&data, 4);
        let cfg = KnobConfig::new(IndexMode::Pure, crate::BoundStrategy::None);
        let mut st = Traversal::new(&data, Some(&tree), &init, &cfg, |_| {});
        let res = drive(&data, &init, &RunOptions::with_t_max(1), &mut st);
        assert!(res.totals.dist_comps < (data.n() * init.k()) as u64);
        assert!(res.labels[32..].iter().all(|&l| l == 2));
    }
}
