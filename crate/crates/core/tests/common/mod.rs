#![allow(dead_code)]

use exact_kmeans::{init_kmeanspp, CentroidSet, DataSet, RunResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Gaussian blobs with centers uniform in the unit cube.
pub fn blobs(n: usize, d: usize, k_true: usize, sigma: f64, seed: u64) -> DataSet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..k_true)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut flat = Vec::with_capacity(n * d);
    for i in 0..n {
        let c = &centers[i % k_true];
        flat.extend(c.iter().map(|&v| v + noise.sample(&mut rng)));
    }
    DataSet::from_flat(flat, d).unwrap()
}

pub fn seeded(data: &DataSet<f64>, k: usize, seed: u64) -> CentroidSet<f64> {
    init_kmeanspp(data, k, seed).unwrap()
}

/// Same labels every iteration, centroids within `1e-6` relative.
pub fn assert_same_run(name: &str, reference: &RunResult<f64>, got: &RunResult<f64>) {
    assert_eq!(
        reference.history.len(),
        got.history.len(),
        "{name}: iteration count"
    );
    for (t, (a, b)) in reference.history.iter().zip(&got.history).enumerate() {
        let diff = a.iter().zip(b).filter(|(x, y)| x != y).count();
        assert_eq!(
            diff,
            0,
            "{name}: {diff} labels differ in iteration {}",
            t + 1
        );
    }
    let rel = reference.centroids.max_relative_diff(&got.centroids);
    assert!(rel <= 1e-6, "{name}: centroid difference {rel}");
}
