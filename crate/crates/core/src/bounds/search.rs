//! Pre-assignment by range search: a point strictly closer to `c_j` than
//! half the distance from `c_j` to its nearest other centroid belongs to
//! `c_j`. Everything else gets a full scan.

use super::{reset_nan, Assigner, Geometry};
use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::tree::Tree;
use crate::Scalar;

/// Captures points around every centroid. `cache` (`n × k`, NaN = unknown)
/// receives every point distance measured on the way.
fn capture<T: Scalar>(
    ctx: &mut RunContext,
    data: &DataSet<T>,
    centroids: &CentroidSet<T>,
    s: &[T],
    tree: &Tree<T>,
    out: &mut [Option<usize>],
    cache: &mut [T],
) {
    let k = centroids.k();
    let mut stack = Vec::new();
    for (j, c) in centroids.centers().enumerate() {
        let radius = s[j];
        if radius.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
            continue;
        }
        stack.clear();
        stack.push(0usize);
        while let Some(id) = stack.pop() {
            ctx.touch_node();
            let node = tree.node(id);
            let dp = ctx.dist(c, &node.pivot);
            if dp - node.radius >= radius {
                continue;
            }
            if dp + node.radius < radius {
                for &p in tree.covered(id) {
                    out[p] = Some(j);
                }
                continue;
            }
            if !node.is_leaf() {
                stack.extend(node.children.iter().rev());
                continue;
            }
            for &p in tree.covered(id) {
                let psi = tree.point_psi(p);
                if (dp - psi).abs() >= radius {
                    continue;
                }
                if dp + psi < radius {
                    out[p] = Some(j);
                    continue;
                }
                ctx.touch_point();
                let d = ctx.dist(c, data.row(p));
                cache[p * k + j] = d;
                if d < radius {
                    out[p] = Some(j);
                }
            }
        }
    }
}

/// Labels every point whose nearest centroid a range search proves; `None`
/// for the rest.
pub fn search_preassign<T: Scalar>(
    ctx: &mut RunContext,
    data: &DataSet<T>,
    centroids: &CentroidSet<T>,
    tree: &Tree<T>,
) -> Vec<Option<usize>> {
    let mut geo = Geometry::default();
    geo.compute(ctx, centroids);
    let mut out = vec![None; data.n()];
    let mut cache = vec![T::nan(); data.n() * centroids.k()];
    capture(ctx, data, centroids, &geo.s, tree, &mut out, &mut cache);
    out
}

/// Search pre-assignment followed by a full scan of the remaining points.
pub struct SearchAssigner<'a, T> {
    tree: &'a Tree<T>,
    geo: Geometry<T>,
    cache: Vec<T>,
    found: Vec<Option<usize>>,
}

impl<'a, T: Scalar> SearchAssigner<'a, T> {
    pub fn new(tree: &'a Tree<T>) -> Self {
        Self {
            tree,
            geo: Geometry::default(),
            cache: Vec::new(),
            found: Vec::new(),
        }
    }
}

impl<T: Scalar> Assigner<T> for SearchAssigner<'_, T> {
    fn assign(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        let (n, k) = (data.n(), centroids.k());
        self.geo.compute(ctx, centroids);
        self.cache.resize(n * k, T::nan());
        reset_nan(&mut self.cache);
        self.found.clear();
        self.found.resize(n, None);
        capture(
            ctx,
            data,
            centroids,
            &self.geo.s,
            self.tree,
            &mut self.found,
            &mut self.cache,
        );
        for (i, x) in data.rows().enumerate() {
            match self.found[i] {
                Some(j) => labels[i] = j,
                None => {
                    ctx.touch_point();
                    let row = &mut self.cache[i * k..(i + 1) * k];
                    labels[i] = super::scan_all(ctx, x, centroids, row).best;
                }
            }
        }
    }
}
