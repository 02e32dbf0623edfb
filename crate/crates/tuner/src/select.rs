//! Turning classifier outputs into configurations, and scoring them.

use exact_kmeans::{BoundStrategy, IndexMode, KnobConfig};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::cart::{train_tree, Classifier, DecisionTreeModel, DEFAULT_MAX_DEPTH, DEFAULT_MIN_LEAF};
use crate::error::{Result, TunerError};
use crate::features::FeatureVector;
use crate::knn::{KnnModel, DEFAULT_NEIGHBOURS};
use crate::truth::{GroundTruthRecord, INDEX_MULTIPLE, INDEX_NONE, INDEX_PURE, INDEX_SINGLE};

/// Configuration for a bound label and an index label. A pure traversal
/// ignores the bound.
pub fn combine(bound: &str, index_label: u8) -> Result<KnobConfig> {
    let b: BoundStrategy = bound.parse()?;
    let cfg = match index_label {
        INDEX_NONE => KnobConfig::new(IndexMode::None, b),
        INDEX_PURE => KnobConfig::new(IndexMode::Pure, BoundStrategy::None),
        INDEX_SINGLE => KnobConfig::new(IndexMode::IndexSingle, b),
        INDEX_MULTIPLE => KnobConfig::new(IndexMode::IndexMultiple, b),
        other => {
            return Err(TunerError::InvalidArgument(format!(
                "unknown index label {other}"
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Asks the bound head, then the index head, and combines the answers.
pub fn predict_config(
    bound_model: &impl Classifier,
    index_model: &impl Classifier,
    features: &FeatureVector,
) -> Result<KnobConfig> {
    let x = features.to_array();
    let index: u8 = index_model.predict(&x).parse().map_err(|_| {
        TunerError::InvalidArgument(format!("index head returned `{}`", index_model.predict(&x)))
    })?;
    combine(bound_model.predict(&x), index)
}

/// Hand-written rule set: a pure index below 20 dimensions, otherwise group
/// bounds for large `k` and a single global bound for small `k`.
pub fn baseline_bdt(features: &FeatureVector) -> KnobConfig {
    if features.d < 20.0 {
        KnobConfig::new(IndexMode::Pure, BoundStrategy::None)
    } else if features.k >= 50.0 {
        KnobConfig::new(IndexMode::None, BoundStrategy::Yinyang)
    } else {
        KnobConfig::new(IndexMode::None, BoundStrategy::Hame)
    }
}

/// 1-based position of `prediction` in `ranking`.
pub fn rank_of(prediction: &str, ranking: &[String]) -> Result<usize> {
    ranking
        .iter()
        .position(|r| r == prediction)
        .map(|p| p + 1)
        .ok_or_else(|| TunerError::InvalidArgument(format!("`{prediction}` is not in the ranking")))
}

/// Mean reciprocal rank of each prediction in its ranking.
pub fn mrr<S: AsRef<str>>(predictions: &[S], rankings: &[Vec<String>]) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != rankings.len() {
        return Err(TunerError::InvalidArgument(format!(
            "{} predictions for {} rankings",
            predictions.len(),
            rankings.len()
        )));
    }
    let ranks = predictions
        .iter()
        .zip(rankings)
        .map(|(p, r)| rank_of(p.as_ref(), r))
        .collect::<Result<Vec<usize>>>()?;
    Ok(mrr_from_ranks(&ranks))
}

pub fn mrr_from_ranks(ranks: &[usize]) -> f64 {
    ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64
}

/// Like [`mrr`], except a configuration that was never timed counts as one
/// place below the last timed one.
pub fn mrr_untimed_last<S: AsRef<str>>(predictions: &[S], rankings: &[Vec<String>]) -> f64 {
    let ranks: Vec<usize> = predictions
        .iter()
        .zip(rankings)
        .map(|(p, r)| rank_of(p.as_ref(), r).unwrap_or(r.len() + 1))
        .collect();
    mrr_from_ranks(&ranks)
}

/// Seeded shuffle, then the first `train_fraction` of the records train.
pub fn split_records(
    records: &[GroundTruthRecord],
    train_fraction: f64,
    seed: u64,
) -> (Vec<GroundTruthRecord>, Vec<GroundTruthRecord>) {
    let mut shuffled = records.to_vec();
    shuffled.shuffle(&mut exact_kmeans::init::rng_from_seed(seed));
    let cut = ((records.len() as f64 * train_fraction).round() as usize).min(records.len());
    let test = shuffled.split_off(cut);
    (shuffled, test)
}

/// Bound head and index head of one model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selector<M> {
    pub bound: M,
    pub index: M,
}

fn heads(records: &[GroundTruthRecord]) -> (Vec<[f64; 14]>, Vec<String>, Vec<String>) {
    let xs = records.iter().map(|r| r.features.to_array()).collect();
    let bound = records.iter().map(|r| r.label.clone()).collect();
    let index = records.iter().map(|r| r.index_label.to_string()).collect();
    (xs, bound, index)
}

impl Selector<DecisionTreeModel> {
    pub fn train(records: &[GroundTruthRecord]) -> Result<Self> {
        Self::train_with(records, DEFAULT_MAX_DEPTH, DEFAULT_MIN_LEAF)
    }

    pub fn train_with(
        records: &[GroundTruthRecord],
        max_depth: usize,
        min_leaf: usize,
    ) -> Result<Self> {
        let (xs, b, i) = heads(records);
        Ok(Self {
            bound: train_tree(&xs, &b, max_depth, min_leaf)?,
            index: train_tree(&xs, &i, max_depth, min_leaf)?,
        })
    }
}

impl Selector<KnnModel> {
    pub fn train(records: &[GroundTruthRecord]) -> Result<Self> {
        let (xs, b, i) = heads(records);
        Ok(Self {
            bound: KnnModel::fit(&xs, &b, DEFAULT_NEIGHBOURS)?,
            index: KnnModel::fit(&xs, &i, DEFAULT_NEIGHBOURS)?,
        })
    }
}

impl<M: Classifier> Selector<M> {
    pub fn predict(&self, features: &FeatureVector) -> Result<KnobConfig> {
        predict_config(&self.bound, &self.index, features)
    }
}

/// Hold-out scores of the learned selectors and the rule set on one split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub n_train: usize,
    pub n_test: usize,
    pub tree_mrr: f64,
    pub knn_mrr: f64,
    pub baseline_mrr: f64,
}

fn holdout_mrr(
    test: &[GroundTruthRecord],
    mut predict: impl FnMut(&FeatureVector) -> Result<KnobConfig>,
) -> Result<f64> {
    let preds = test
        .iter()
        .map(|r| predict(&r.features).map(|c| c.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let rankings: Vec<Vec<String>> = test.iter().map(|r| r.ranking.clone()).collect();
    Ok(mrr_untimed_last(&preds, &rankings))
}

/// Trains on a seeded 70/30 split and scores every selector on the
/// held-out part.
pub fn compare_on_holdout(records: &[GroundTruthRecord], seed: u64) -> Result<Comparison> {
    let (train, test) = split_records(records, 0.7, seed);
    if train.is_empty() || test.is_empty() {
        return Err(TunerError::InvalidArgument(format!(
            "{} records are too few to split",
            records.len()
        )));
    }
    let tree = Selector::<DecisionTreeModel>::train(&train)?;
    let knn = Selector::<KnnModel>::train(&train)?;
    Ok(Comparison {
        n_train: train.len(),
        n_test: test.len(),
        tree_mrr: holdout_mrr(&test, |f| tree.predict(f))?,
        knn_mrr: holdout_mrr(&test, |f| knn.predict(f))?,
        baseline_mrr: holdout_mrr(&test, |f| Ok(baseline_bdt(f)))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(d: f64, k: f64) -> FeatureVector {
        let mut a = [0.0; 14];
        a[1] = k;
        a[2] = d;
        FeatureVector::from_array(a)
    }

    #[test]
    fn combine_mapping() {
        assert_eq!(
            combine("yinyang", 1).unwrap(),
            KnobConfig::new(IndexMode::None, BoundStrategy::Yinyang)
        );
        assert_eq!(
            combine("yinyang", 2).unwrap(),
            KnobConfig::new(IndexMode::Pure, BoundStrategy::None)
        );
        assert_eq!(
            combine("regroup", 3).unwrap(),
            KnobConfig::new(IndexMode::IndexSingle, BoundStrategy::Regroup)
        );
        assert_eq!(
            combine("hame", 4).unwrap(),
            KnobConfig::new(IndexMode::IndexMultiple, BoundStrategy::Hame)
        );
        assert!(combine("hame", 5).is_err());
        assert!(combine("nope", 1).is_err());
    }

    #[test]
    fn baseline_rules() {
        assert_eq!(baseline_bdt(&fv(2.0, 10.0)).to_string(), "pure");
        assert_eq!(baseline_bdt(&fv(60.0, 100.0)).to_string(), "yinyang");
        assert_eq!(baseline_bdt(&fv(60.0, 10.0)).to_string(), "hame");
    }

    #[test]
    fn mrr_values() {
        let r = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let ranking = r(&["a", "b", "c", "d", "e"]);
        let rankings = vec![ranking.clone(); 3];
        assert!((mrr(&["a", "b", "d"], &rankings).unwrap() - 0.5833333333333334).abs() < 1e-12);
        assert_eq!(mrr(&["a", "a", "a"], &rankings).unwrap(), 1.0);
        assert!((mrr(&["e"], std::slice::from_ref(&ranking)).unwrap() - 0.2).abs() < 1e-12);
        assert!(mrr(&["z"], std::slice::from_ref(&ranking)).is_err());
        assert!(mrr::<&str>(&[], &[]).is_err());
        assert!((mrr_untimed_last(&["z"], &[ranking]) - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn split_is_seeded_and_complete() {
        let recs: Vec<GroundTruthRecord> = (0..10)
            .map(|i| GroundTruthRecord {
                dataset_id: i.to_string(),
                k: 2,
                features: fv(2.0, 2.0),
                label: "hame".into(),
                index_label: 1,
                ranking: vec!["hame".into()],
                timing_ms: Default::default(),
            })
            .collect();
        let (a, b) = split_records(&recs, 0.7, 3);
        assert_eq!((a.len(), b.len()), (7, 3));
        assert_eq!(split_records(&recs, 0.7, 3), (a.clone(), b.clone()));
        let mut ids: Vec<String> = a.iter().chain(&b).map(|r| r.dataset_id.clone()).collect();
        ids.sort();
        let mut want: Vec<String> = (0..10).map(|i| i.to_string()).collect();
        want.sort();
        assert_eq!(ids, want);
    }
}
