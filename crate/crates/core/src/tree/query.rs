use super::Tree;
use crate::context::RunContext;
use crate::data::CentroidSet;
use crate::metric;
use crate::Scalar;

/// True iff every point within `radius` of `pivot` is strictly closer to
/// `c1` than to `c2`: `‖p − c1‖ + r < ‖p − c2‖ − r`.
pub fn balltree_node_test<T: Scalar>(pivot: &[T], radius: T, c1: &[T], c2: &[T]) -> bool {
    metric::euclidean(pivot, c1) + radius < metric::euclidean(pivot, c2) - radius
}

/// True iff every point of the box `[lo, hi]` is strictly closer to `best`
/// than to `other`. The difference of squared distances is linear in the
/// point, so it suffices to test the corner extreme in the direction
/// `other − best`.
pub fn box_dominates<T: Scalar>(lo: &[T], hi: &[T], best: &[T], other: &[T]) -> bool {
    let mut db = T::zero();
    let mut dc = T::zero();
    for z in 0..lo.len() {
        let v = if other[z] > best[z] { hi[z] } else { lo[z] };
        let (a, b) = (v - best[z], v - other[z]);
        db += a * a;
        dc += b * b;
    }
    db < dc
}

/// Drops every candidate dominated over the box by the candidate nearest to
/// the box center. Uncounted; the survivors always include the nearest
/// candidate of every point in the box.
pub fn kdtree_filter<T: Scalar>(
    lo: &[T],
    hi: &[T],
    candidates: &[usize],
    centroids: &CentroidSet<T>,
) -> Vec<usize> {
    if candidates.len() <= 1 {
        return candidates.to_vec();
    }
    let half = T::lit(0.5);
    let mid: Vec<T> = lo.iter().zip(hi).map(|(&a, &b)| (a + b) * half).collect();
    let mut star = candidates[0];
    let mut sd = metric::sq_euclidean(&mid, centroids.center(star));
    for &j in &candidates[1..] {
        let v = metric::sq_euclidean(&mid, centroids.center(j));
        if v < sd || (v == sd && j < star) {
            star = j;
            sd = v;
        }
    }
    candidates
        .iter()
        .copied()
        .filter(|&j| {
            j == star || !box_dominates(lo, hi, centroids.center(star), centroids.center(j))
        })
        .collect()
}

/// Ids of all points within `radius` (inclusive) of `center`. Node visits
/// and pivot or point distances are counted.
pub fn range_search<T: Scalar>(
    ctx: &mut RunContext,
    tree: &Tree<T>,
    data: &crate::DataSet<T>,
    center: &[T],
    radius: T,
) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        ctx.touch_node();
        let node = tree.node(id);
        let dp = ctx.dist(center, &node.pivot);
        if dp - node.radius > radius {
            continue;
        }
        if dp + node.radius <= radius {
            out.extend_from_slice(tree.covered(id));
            continue;
        }
        if node.is_leaf() {
            for &p in tree.covered(id) {
                let psi = tree.point_psi(p);
                if (dp - psi).abs() > radius {
                    continue;
                }
                if dp + psi <= radius {
                    out.push(p);
                    continue;
                }
                ctx.touch_point();
                if ctx.dist(center, data.row(p)) <= radius {
                    out.push(p);
                }
            }
        } else {
            stack.extend(node.children.iter().rev());
        }
    }
    out
}
