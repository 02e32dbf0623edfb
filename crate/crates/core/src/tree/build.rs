use super::{Node, Tree, TreeKind};
use crate::data::DataSet;
use crate::metric;
use crate::Scalar;

fn make_node<T: Scalar>(
    data: &DataSet<T>,
    ids: &[usize],
    start: usize,
    height: usize,
    parent_pivot: Option<&[T]>,
    kind: TreeKind,
) -> Node<T> {
    let d = data.d();
    let mut sv = vec![T::zero(); d];
    for &p in ids {
        for (s, &v) in sv.iter_mut().zip(data.row(p)) {
            *s += v;
        }
    }
    let num = ids.len();
    let m = T::from_usize_lossy(num);
    let pivot: Vec<T> = sv.iter().map(|&s| s / m).collect();
    let radius = ids
        .iter()
        .map(|&p| metric::euclidean(&pivot, data.row(p)))
        .fold(T::zero(), T::max);
    let psi = parent_pivot.map_or(T::zero(), |pp| metric::euclidean(pp, &pivot));
    let bbox = (kind == TreeKind::Kd).then(|| {
        let mut lo = data.row(ids[0]).to_vec();
        let mut hi = lo.clone();
        for &p in &ids[1..] {
            for (z, &v) in data.row(p).iter().enumerate() {
                lo[z] = lo[z].min(v);
                hi[z] = hi[z].max(v);
            }
        }
        (lo, hi)
    });
    Node {
        pivot,
        radius,
        sv,
        psi,
        children: Vec::new(),
        start,
        end: start + num,
        num,
        height,
        bbox,
    }
}

/// Point of `ids` farthest from `from`; the lowest id wins ties.
fn farthest<T: Scalar>(data: &DataSet<T>, ids: &[usize], from: &[T]) -> usize {
    let mut best = (usize::MAX, T::neg_infinity());
    for &p in ids {
        let v = metric::euclidean(from, data.row(p));
        if v > best.1 || (v == best.1 && p < best.0) {
            best = (p, v);
        }
    }
    best.0
}

/// Reorders `ids` so the first part is nearer to seed A; returns its length.
fn split_ball<T: Scalar>(data: &DataSet<T>, ids: &mut [usize], pivot: &[T]) -> usize {
    let a = farthest(data, ids, pivot);
    let b = farthest(data, ids, data.row(a));
    let (ra, rb) = (data.row(a), data.row(b));
    let (left, right): (Vec<usize>, Vec<usize>) = ids.iter().partition(|&&p| {
        metric::sq_euclidean(data.row(p), ra) <= metric::sq_euclidean(data.row(p), rb)
    });
    let mid = left.len();
    ids[..mid].copy_from_slice(&left);
    ids[mid..].copy_from_slice(&right);
    mid
}

/// Sorts `ids` along the widest coordinate and splits at the median.
fn split_kd<T: Scalar>(data: &DataSet<T>, ids: &mut [usize], bbox: &(Vec<T>, Vec<T>)) -> usize {
    let (lo, hi) = bbox;
    let mut axis = 0;
    for z in 1..lo.len() {
        if hi[z] - lo[z] > hi[axis] - lo[axis] {
            axis = z;
        }
    }
    ids.sort_by(|&p, &q| {
        data.row(p)[axis]
            .partial_cmp(&data.row(q)[axis])
            .unwrap()
            .then(p.cmp(&q))
    });
    ids.len() / 2
}

pub(super) fn build<T: Scalar>(data: &DataSet<T>, capacity: usize, kind: TreeKind) -> Tree<T> {
    let n = data.n();
    let mut points: Vec<usize> = (0..n).collect();
    let mut nodes = vec![make_node(data, &points, 0, 0, None, kind)];
    let mut stack = vec![0];
    while let Some(id) = stack.pop() {
        let node = &nodes[id];
        if node.num <= capacity || node.radius == T::zero() {
            continue;
        }
        let (start, end, height) = (node.start, node.end, node.height);
        let ids = &mut points[start..end];
        let mid = match kind {
            TreeKind::Ball => split_ball(data, ids, &node.pivot),
            TreeKind::Kd => split_kd(data, ids, node.bbox.as_ref().expect("kd node has a box")),
        };
        if mid == 0 || mid == ids.len() {
            continue;
        }
        let parent_pivot = node.pivot.clone();
        let left = make_node(
            data,
            &points[start..start + mid],
            start,
            height + 1,
            Some(&parent_pivot),
            kind,
        );
        let right = make_node(
            data,
            &points[start + mid..end],
            start + mid,
            height + 1,
            Some(&parent_pivot),
            kind,
        );
        let (l, r) = (nodes.len(), nodes.len() + 1);
        nodes.push(left);
        nodes.push(right);
        nodes[id].children = vec![l, r];
        stack.push(r);
        stack.push(l);
    }
    let mut point_psi = vec![T::zero(); n];
    for node in nodes.iter().filter(|n| n.is_leaf()) {
        for &p in &points[node.start..node.end] {
            point_psi[p] = metric::euclidean(&node.pivot, data.row(p));
        }
    }
    Tree {
        kind,
        capacity,
        nodes,
        points,
        point_psi,
    }
}
