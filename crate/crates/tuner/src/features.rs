//! Dataset and index statistics used to pick a configuration.

use exact_kmeans::{DataSet, Scalar, Tree};
use serde::{Deserialize, Serialize};

/// Number of entries in a [`FeatureVector`].
pub const FEATURE_COUNT: usize = 14;

/// Entry names in array order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "n",
    "k",
    "d",
    "h_t",
    "n_internal",
    "n_leaf",
    "mu_h",
    "sigma_h",
    "mu_r",
    "sigma_r",
    "mu_psi",
    "sigma_psi",
    "mu_lp",
    "sigma_lp",
];

/// Raw sizes plus normalized Ball-tree shape statistics.
///
/// Heights are divided by `log2(n/f)`, node counts by `n/f`, leaf radius and
/// ψ by the root radius, leaf occupancy by `f`. Serializes as a plain array
/// in [`FEATURE_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; FEATURE_COUNT]", into = "[f64; FEATURE_COUNT]")]
pub struct FeatureVector {
    pub n: f64,
    pub k: f64,
    pub d: f64,
    pub h_t: f64,
    pub n_internal: f64,
    pub n_leaf: f64,
    pub mu_h: f64,
    pub sigma_h: f64,
    pub mu_r: f64,
    pub sigma_r: f64,
    pub mu_psi: f64,
    pub sigma_psi: f64,
    pub mu_lp: f64,
    pub sigma_lp: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.n,
            self.k,
            self.d,
            self.h_t,
            self.n_internal,
            self.n_leaf,
            self.mu_h,
            self.sigma_h,
            self.mu_r,
            self.sigma_r,
            self.mu_psi,
            self.sigma_psi,
            self.mu_lp,
            self.sigma_lp,
        ]
    }

    pub fn from_array(a: [f64; FEATURE_COUNT]) -> Self {
        Self {
            n: a[0],
            k: a[1],
            d: a[2],
            h_t: a[3],
            n_internal: a[4],
            n_leaf: a[5],
            mu_h: a[6],
            sigma_h: a[7],
            mu_r: a[8],
            sigma_r: a[9],
            mu_psi: a[10],
            sigma_psi: a[11],
            mu_lp: a[12],
            sigma_lp: a[13],
        }
    }
}

impl From<[f64; FEATURE_COUNT]> for FeatureVector {
    fn from(a: [f64; FEATURE_COUNT]) -> Self {
        Self::from_array(a)
    }
}

impl From<FeatureVector> for [f64; FEATURE_COUNT] {
    fn from(v: FeatureVector) -> Self {
        v.to_array()
    }
}

/// Population mean and standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
    (mean, var.sqrt())
}

/// Features of `data` clustered into `k` groups, from `tree` built with
/// leaf capacity `f`. A non-positive `log2(n/f)` or a zero root radius is
/// replaced by 1.
pub fn extract_features<T: Scalar>(
    data: &DataSet<T>,
    k: usize,
    tree: &Tree<T>,
    f: usize,
) -> FeatureVector {
    let n = data.n() as f64;
    let per_leaf = n / f.max(1) as f64;
    let height_norm = match per_leaf.log2() {
        l if l > 0.0 => l,
        _ => 1.0,
    };
    let root_r = match tree.root().radius.as_f64() {
        r if r > 0.0 => r,
        _ => 1.0,
    };
    let leaves: Vec<_> = tree.leaves().collect();
    let leaf_count = leaves.len() as f64;
    let stat = |f: &dyn Fn(&exact_kmeans::tree::Node<T>) -> f64| {
        mean_std(&leaves.iter().map(|l| f(l)).collect::<Vec<_>>())
    };
    let (mu_h, sigma_h) = stat(&|l| l.height as f64);
    let (mu_r, sigma_r) = stat(&|l| l.radius.as_f64());
    let (mu_psi, sigma_psi) = stat(&|l| l.psi.as_f64());
    let (mu_lp, sigma_lp) = stat(&|l| l.num as f64);
    let f = f.max(1) as f64;
    FeatureVector {
        n,
        k: k as f64,
        d: data.d() as f64,
        h_t: tree.height() as f64 / height_norm,
        n_internal: tree.internal_count() as f64 / per_leaf,
        n_leaf: leaf_count / per_leaf,
        mu_h: mu_h / height_norm,
        sigma_h: sigma_h / height_norm,
        mu_r: mu_r / root_r,
        sigma_r: sigma_r / root_r,
        mu_psi: mu_psi / root_r,
        sigma_psi: sigma_psi / root_r,
        mu_lp: mu_lp / f,
        sigma_lp: sigma_lp / f,
    }
}
