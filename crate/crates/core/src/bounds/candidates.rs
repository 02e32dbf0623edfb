//! Candidate-set filters: every centroid outside the returned set is provably
//! farther from the point than the current best.

use crate::data::CentroidSet;
use crate::metric;
use crate::Scalar;

/// Widens a threshold by a few ulps of the magnitudes involved so rounding
/// never excludes a centroid sitting exactly on the boundary.
#[inline]
fn widen<T: Scalar>(threshold: T, scale: T) -> T {
    threshold + (threshold.abs() + scale.abs()) * T::epsilon() * T::lit(16.0)
}

/// Centroids ordered by their norm.
#[derive(Debug, Clone, Default)]
pub struct NormIndex<T> {
    order: Vec<usize>,
    norms: Vec<T>,
}

impl<T: Scalar> NormIndex<T> {
    pub fn new(centroids: &CentroidSet<T>) -> Self {
        let mut pairs: Vec<(T, usize)> = centroids.centers().map(metric::norm).zip(0..).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        Self {
            order: pairs.iter().map(|p| p.1).collect(),
            norms: pairs.iter().map(|p| p.0).collect(),
        }
    }

    /// Positions `lo..hi` in norm order with `|‖c‖ − x_norm| ≤ threshold`.
    pub fn range(&self, x_norm: T, threshold: T) -> (usize, usize) {
        let t = widen(threshold, x_norm);
        let lo = self.norms.partition_point(|&v| v < x_norm - t);
        let hi = self.norms.partition_point(|&v| v <= x_norm + t);
        (lo, hi.max(lo))
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn norm_at(&self, pos: usize) -> T {
        self.norms[pos]
    }

    /// Smallest `|‖c‖ − x_norm|` over centroids outside positions `lo..hi`.
    pub fn outside_gap(&self, x_norm: T, lo: usize, hi: usize) -> T {
        let mut g = T::infinity();
        if lo > 0 {
            g = g.min((x_norm - self.norms[lo - 1]).abs());
        }
        if hi < self.norms.len() {
            g = g.min((self.norms[hi] - x_norm).abs());
        }
        g
    }
}

/// Centroids whose norm lies within `threshold` of the point norm, found by
/// binary search. With `threshold ≥ max(ub, ‖x − c_second‖)` this contains
/// the nearest and the second nearest centroid.
pub fn annulus_candidates<T: Scalar>(x_norm: T, threshold: T, index: &NormIndex<T>) -> &[usize] {
    let (lo, hi) = index.range(x_norm, threshold);
    &index.order[lo..hi]
}

/// The assigned centroid plus every centroid within `2·ub + drift` of it.
/// `sorted_row` lists the other centroids by ascending distance to the
/// assigned one.
pub fn exponion_candidates<T: Scalar>(
    assigned: usize,
    ub: T,
    drift: T,
    sorted_row: &[(T, usize)],
) -> Vec<usize> {
    let radius = widen(ub + ub + drift, T::zero());
    let end = sorted_row.partition_point(|&(d, _)| d <= radius);
    std::iter::once(assigned)
        .chain(sorted_row[..end].iter().map(|&(_, j)| j))
        .collect()
}

/// Centroids `j` with `‖c_j − c_assigned‖ / 2 ≤ radius`, where `radius`
/// bounds the distance from the assigned centroid to every member of its
/// cluster. Shared by all members. `cc_row[j]` is `‖c_j − c_assigned‖`.
pub fn pami20_candidates<T: Scalar>(assigned: usize, radius: T, cc_row: &[T]) -> Vec<usize> {
    let r = widen(radius + radius, T::zero());
    cc_row
        .iter()
        .enumerate()
        .filter(|&(j, &d)| j == assigned || d <= r)
        .map(|(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_example() {
        let c = CentroidSet::from_rows(&[[20.0, 0.0], [4.0, 3.0], [0.0, 7.0]]).unwrap();
        let idx = NormIndex::new(&c);
        let mut got = annulus_candidates(5.0, 3.0, &idx).to_vec();
        got.sort();
        assert_eq!(got, vec![1, 2]);
        let mut all = annulus_candidates(5.0, 100.0, &idx).to_vec();
        all.sort();
        assert_eq!(all, vec![0, 1, 2]);
        assert_eq!(idx.outside_gap(5.0, 0, 2), 15.0);
    }

    #[test]
    fn exponion_example() {
        let row = [(2.0, 1), (2.5, 3), (3.0, 2)];
        assert_eq!(exponion_candidates(0, 1.0, 0.5, &row), vec![0, 1, 3]);
        assert_eq!(exponion_candidates(0, 0.0, 0.0, &row), vec![0]);
    }

    #[test]
    fn pami20_example() {
        // half distances 1.5 and 2.5
        let row = [0.0, 3.0, 5.0];
        assert_eq!(pami20_candidates(0, 2.0, &row), vec![0, 1]);
        assert_eq!(pami20_candidates(0, 0.0, &row), vec![0]);
    }
}
