//! Memory estimate of a Ball-tree, counted in stored scalars.

use exact_kmeans::{Scalar, Tree};

/// `n + L·(2d+4) + q·(2d+6)` with `L = n/f` leaves and
/// `q = L·(1 − 2^(1 − log2 L))` internal nodes, `q` floored at zero.
pub fn footprint_estimate(n: usize, d: usize, f: usize) -> f64 {
    let leaves = n as f64 / f.max(1) as f64;
    let internal = (leaves * (1.0 - 2f64.powf(1.0 - leaves.log2()))).max(0.0);
    let d = d as f64;
    n as f64 + leaves * (2.0 * d + 4.0) + internal * (2.0 * d + 6.0)
}

/// The same count taken from the nodes a build produced.
pub fn footprint_measured<T: Scalar>(tree: &Tree<T>, n: usize, d: usize) -> f64 {
    let leaves = tree.leaves().count() as f64;
    let internal = tree.internal_count() as f64;
    let d = d as f64;
    n as f64 + leaves * (2.0 * d + 4.0) + internal * (2.0 * d + 6.0)
}
