//! Seeded centroid initialization.
//!
//! Every generator is a `ChaCha8Rng` seeded from the caller's 64-bit seed, so
//! a given `(data, k, seed)` yields the same centers on every platform.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{CentroidSet, DataSet};
use crate::error::{KmeansError, Result};
use crate::metric;
use crate::Scalar;

/// Name of the generator behind every seeded routine in this crate.
pub const RNG_NAME: &str = "ChaCha8Rng";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_k<T: Scalar>(data: &DataSet<T>, k: usize) -> Result<()> {
    if k == 0 {
        return Err(KmeansError::InvalidArgument("k must be at least 1".into()));
    }
    if k > data.n() {
        return Err(KmeansError::InvalidArgument(format!(
            "k = {k} exceeds the number of points {}",
            data.n()
        )));
    }
    Ok(())
}

/// Row indices picked by [`init_random`].
pub fn random_indices<T: Scalar>(data: &DataSet<T>, k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(data, k)?;
    let mut rng = rng_from_seed(seed);
    Ok(index::sample(&mut rng, data.n(), k).into_vec())
}

/// `k` distinct rows chosen uniformly without replacement.
pub fn init_random<T: Scalar>(data: &DataSet<T>, k: usize, seed: u64) -> Result<CentroidSet<T>> {
    let idx = random_indices(data, k, seed)?;
    Ok(CentroidSet::from_indices(data, &idx))
}

/// Row indices picked by [`init_kmeanspp`].
pub fn kmeanspp_indices<T: Scalar>(data: &DataSet<T>, k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(data, k)?;
    let n = data.n();
    let mut rng = rng_from_seed(seed);
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];

    let first = rng.random_range(0..n);
    chosen.push(first);
    taken[first] = true;

    let mut d2: Vec<f64> = (0..n)
        .map(|i| metric::sq_euclidean(data.row(i), data.row(first)).as_f64())
        .collect();

    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total mass has a positive entry")
        } else {
            // every remaining point coincides with a chosen center
            let remaining: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            remaining[rng.random_range(0..remaining.len())]
        };
        chosen.push(next);
        taken[next] = true;
        let c = data.row(next);
        for (i, w) in d2.iter_mut().enumerate() {
            let v = metric::sq_euclidean(data.row(i), c).as_f64();
            if v < *w {
                *w = v;
            }
        }
        d2[next] = 0.0;
    }
    Ok(chosen)
}

/// k-means++ seeding: the first center is uniform, each further center is
/// drawn with probability proportional to its squared distance to the
/// nearest center chosen so far.
pub fn init_kmeanspp<T: Scalar>(data: &DataSet<T>, k: usize, seed: u64) -> Result<CentroidSet<T>> {
    let idx = kmeanspp_indices(data, k, seed)?;
    Ok(CentroidSet::from_indices(data, &idx))
}
