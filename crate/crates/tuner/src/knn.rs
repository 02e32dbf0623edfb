//! Nearest-neighbour vote on standardized features.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cart::Classifier;
use crate::error::{Result, TunerError};

pub const DEFAULT_NEIGHBOURS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub neighbours: usize,
    pub mean: Vec<f64>,
    /// Per-feature spread; constant features use 1.
    pub scale: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl KnnModel {
    pub fn fit<X: AsRef<[f64]>>(xs: &[X], labels: &[String], neighbours: usize) -> Result<Self> {
        if xs.is_empty() || xs.len() != labels.len() {
            return Err(TunerError::InvalidArgument(format!(
                "need matching non-empty rows and labels, got {} and {}",
                xs.len(),
                labels.len()
            )));
        }
        let d = xs[0].as_ref().len();
        let m = xs.len() as f64;
        let mean: Vec<f64> = (0..d)
            .map(|f| xs.iter().map(|x| x.as_ref()[f]).sum::<f64>() / m)
            .collect();
        let scale: Vec<f64> = (0..d)
            .map(|f| {
                let var = xs
                    .iter()
                    .map(|x| (x.as_ref()[f] - mean[f]).powi(2))
                    .sum::<f64>()
                    / m;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let mut model = Self {
            neighbours: neighbours.max(1),
            mean,
            scale,
            rows: Vec::new(),
            labels: labels.to_vec(),
        };
        model.rows = xs.iter().map(|x| model.standardize(x.as_ref())).collect();
        Ok(model)
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect()
    }
}

impl Classifier for KnnModel {
    /// Majority among the nearest rows; a tied vote goes to the tied label
    /// with the nearest member.
    fn predict(&self, x: &[f64]) -> &str {
        let z = self.standardize(x);
        let mut by_dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                (
                    r.iter()
                        .zip(&z)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>(),
                    i,
                )
            })
            .collect();
        by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let near = &by_dist[..self.neighbours.min(by_dist.len())];
        let mut votes: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for (rank, &(_, i)) in near.iter().enumerate() {
            let e = votes.entry(self.labels[i].as_str()).or_insert((0, rank));
            e.0 += 1;
        }
        votes
            .into_iter()
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
            .map(|(l, _)| l)
            .expect("at least one neighbour")
    }
}
