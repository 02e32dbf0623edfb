//! Ball-tree and kd-tree over a data set, with the per-node statistics the
//! batch assignment needs: pivot, radius, sum vector, count, offset ψ to the
//! parent pivot and depth.

mod build;
mod query;

use crate::data::DataSet;
use crate::metric;
use crate::Scalar;

pub use query::{balltree_node_test, box_dominates, kdtree_filter, range_search};

/// Default leaf capacity of a Ball-tree.
pub const DEFAULT_CAPACITY: usize = 30;
/// Default leaf capacity of a kd-tree.
pub const DEFAULT_KD_CAPACITY: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Ball,
    Kd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node<T> {
    /// Mean of the covered points.
    pub pivot: Vec<T>,
    /// Distance from the pivot to the farthest covered point.
    pub radius: T,
    pub sv: Vec<T>,
    /// Distance from this pivot to the parent pivot; zero at the root.
    pub psi: T,
    pub children: Vec<usize>,
    /// Covered points are `tree.points()[start..end]`.
    pub start: usize,
    pub end: usize,
    pub num: usize,
    /// Depth below the root.
    pub height: usize,
    /// Axis-aligned bounding box (kd-trees only).
    pub bbox: Option<(Vec<T>, Vec<T>)>,
}

impl<T> Node<T> {
    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// An index tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone)]
pub struct Tree<T> {
    kind: TreeKind,
    capacity: usize,
    nodes: Vec<Node<T>>,
    /// Point ids in an order where every node covers a contiguous range.
    points: Vec<usize>,
    /// Distance from each point to the pivot of its leaf, by point id.
    point_psi: Vec<T>,
}

pub type BallTree<T> = Tree<T>;

impl<T: Scalar> Tree<T> {
    /// Metric-tree split: seed A is the point farthest from the node mean,
    /// seed B the point farthest from A, points go to the nearer seed (ties
    /// to A). Nodes of identical points become leaves regardless of size.
    pub fn build_ball(data: &DataSet<T>, capacity: usize) -> Self {
        build::build(data, capacity.max(1), TreeKind::Ball)
    }

    /// Median split on the coordinate of widest spread.
    pub fn build_kd(data: &DataSet<T>, capacity: usize) -> Self {
        build::build(data, capacity.max(1), TreeKind::Kd)
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn root(&self) -> &Node<T> {
        &self.nodes[0]
    }

    #[inline]
    pub fn node(&self, id: usize) -> &Node<T> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// Point ids covered by a node.
    pub fn covered(&self, id: usize) -> &[usize] {
        let n = &self.nodes[id];
        &self.points[n.start..n.end]
    }

    #[inline]
    pub fn point_psi(&self, point: usize) -> T {
        self.point_psi[point]
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node<T>> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Largest node depth.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.height).max().unwrap_or(0)
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len() - self.leaves().count()
    }

    /// Checks every structural invariant against the data exhaustively.
    pub fn check_invariants(&self, data: &DataSet<T>) -> Result<(), String> {
        let d = data.d();
        let mut seen = vec![false; data.n()];
        for &p in &self.points {
            if std::mem::replace(&mut seen[p], true) {
                return Err(format!("point {p} listed twice"));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err("some point is not covered".into());
        }
        if self.root().num != data.n() {
            return Err("root does not cover every point".into());
        }
        for (id, node) in self.nodes.iter().enumerate() {
            let cov = self.covered(id);
            if node.num != cov.len() || node.num == 0 {
                return Err(format!(
                    "node {id}: num {} vs {} covered",
                    node.num,
                    cov.len()
                ));
            }
            let mut sv = vec![0.0f64; d];
            for &p in cov {
                for (s, &v) in sv.iter_mut().zip(data.row(p)) {
                    *s += v.as_f64();
                }
            }
            for z in 0..d {
                let got = node.sv[z].as_f64();
                if (got - sv[z]).abs() > 1e-9 * (1.0 + sv[z].abs()) {
                    return Err(format!("node {id}: sv[{z}] = {got}, expected {}", sv[z]));
                }
                let mean = got / node.num as f64;
                let p = node.pivot[z].as_f64();
                if (p - mean).abs() > 1e-9 * (1.0 + mean.abs()) {
                    return Err(format!("node {id}: pivot[{z}] = {p}, expected {mean}"));
                }
            }
            let r = node.radius.as_f64();
            for &p in cov {
                let dist = metric::euclidean(&node.pivot, data.row(p)).as_f64();
                if dist > r + 1e-9 * (1.0 + r) {
                    return Err(format!("node {id}: point {p} at {dist} outside radius {r}"));
                }
                if node.is_leaf() {
                    let psi = self.point_psi[p].as_f64();
                    if (psi - dist).abs() > 1e-9 * (1.0 + dist) {
                        return Err(format!("point {p}: psi {psi} vs {dist}"));
                    }
                }
            }
            if node.is_leaf() {
                let first = data.row(cov[0]);
                if node.num > self.capacity && cov.iter().any(|&p| data.row(p) != first) {
                    return Err(format!(
                        "leaf {id} holds {} > {} distinct points",
                        node.num, self.capacity
                    ));
                }
                continue;
            }
            let mut count = 0;
            let mut next = node.start;
            for &c in &node.children {
                let child = &self.nodes[c];
                if child.start != next || child.height != node.height + 1 {
                    return Err(format!("node {id}: child {c} misplaced"));
                }
                next = child.end;
                count += child.num;
                let psi = metric::euclidean(&child.pivot, &node.pivot).as_f64();
                if (child.psi.as_f64() - psi).abs() > 1e-9 * (1.0 + psi) {
                    return Err(format!("node {c}: psi {} vs {psi}", child.psi));
                }
            }
            if next != node.end || count != node.num {
                return Err(format!("node {id}: children do not partition its points"));
            }
            if let Some((lo, hi)) = &node.bbox {
                for &p in cov {
                    for (z, &v) in data.row(p).iter().enumerate() {
                        if v < lo[z] || v > hi[z] {
                            return Err(format!("node {id}: point {p} outside its box"));
                        }
                    }
                }
            }
        }
        if self.nodes[0].psi != T::zero() {
            return Err("root psi must be zero".into());
        }
        Ok(())
    }
}

pub fn build_balltree<T: Scalar>(data: &DataSet<T>, capacity: usize) -> BallTree<T> {
    Tree::build_ball(data, capacity)
}

pub fn build_kdtree<T: Scalar>(data: &DataSet<T>, capacity: usize) -> Tree<T> {
    Tree::build_kd(data, capacity)
}
