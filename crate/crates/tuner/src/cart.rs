//! Binary classification tree grown greedily on Gini impurity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TunerError};

pub const DEFAULT_MAX_DEPTH: usize = 10;
pub const DEFAULT_MIN_LEAF: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    /// Samples with `x[feature_index] <= threshold` go left.
    Split {
        feature_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    pub n_features: usize,
    pub root: TreeNode,
}

/// Anything that maps a feature row to a label.
pub trait Classifier {
    fn predict(&self, x: &[f64]) -> &str;
}

impl DecisionTreeModel {
    pub fn depth(&self) -> usize {
        fn walk(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }
}

impl Classifier for DecisionTreeModel {
    fn predict(&self, x: &[f64]) -> &str {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { label } => return label,
                TreeNode::Split {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature_index] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

fn counts<'a>(labels: &'a [String], idx: &[usize]) -> BTreeMap<&'a str, usize> {
    let mut m = BTreeMap::new();
    for &i in idx {
        *m.entry(labels[i].as_str()).or_insert(0) += 1;
    }
    m
}

fn gini(counts: &BTreeMap<&str, usize>, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .values()
        .map(|&c| (c as f64 / t).powi(2))
        .sum::<f64>()
}

/// Most frequent label; the lexicographically smallest wins ties.
fn majority(counts: &BTreeMap<&str, usize>) -> String {
    let mut best: Option<(&str, usize)> = None;
    for (&l, &c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((l, c));
        }
    }
    best.map(|(l, _)| l.to_string()).unwrap_or_default()
}

struct Split {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn best_split<X: AsRef<[f64]>>(
    xs: &[X],
    labels: &[String],
    idx: &[usize],
    min_leaf: usize,
) -> Option<Split> {
    let n_features = xs[idx[0]].as_ref().len();
    let total = idx.len();
    let mut best: Option<Split> = None;
    let mut order = idx.to_vec();
    for f in 0..n_features {
        order.sort_by(|&a, &b| {
            xs[a].as_ref()[f]
                .total_cmp(&xs[b].as_ref()[f])
                .then(a.cmp(&b))
        });
        let mut left: BTreeMap<&str, usize> = BTreeMap::new();
        let mut right = counts(labels, &order);
        for pos in 0..total - 1 {
            let l = labels[order[pos]].as_str();
            *left.entry(l).or_insert(0) += 1;
            let r = right.get_mut(l).expect("label counted");
            *r -= 1;
            if *r == 0 {
                right.remove(l);
            }
            let (lo, hi) = (xs[order[pos]].as_ref()[f], xs[order[pos + 1]].as_ref()[f]);
            let n_left = pos + 1;
            if lo == hi || n_left < min_leaf || total - n_left < min_leaf {
                continue;
            }
            let impurity = (n_left as f64 * gini(&left, n_left)
                + (total - n_left) as f64 * gini(&right, total - n_left))
                / total as f64;
            if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                best = Some(Split {
                    feature: f,
                    threshold: lo + (hi - lo) / 2.0,
                    impurity,
                });
            }
        }
    }
    best
}

fn grow<X: AsRef<[f64]>>(
    xs: &[X],
    labels: &[String],
    idx: &[usize],
    depth: usize,
    max_depth: usize,
    min_leaf: usize,
) -> TreeNode {
    let c = counts(labels, idx);
    let leaf = || TreeNode::Leaf {
        label: majority(&c),
    };
    if c.len() <= 1 || depth >= max_depth || idx.len() < 2 * min_leaf {
        return leaf();
    }
    let parent = gini(&c, idx.len());
    let Some(split) = best_split(xs, labels, idx, min_leaf).filter(|s| s.impurity < parent - 1e-12)
    else {
        return leaf();
    };
    let (l, r): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| xs[i].as_ref()[split.feature] <= split.threshold);
    TreeNode::Split {
        feature_index: split.feature,
        threshold: split.threshold,
        left: Box::new(grow(xs, labels, &l, depth + 1, max_depth, min_leaf)),
        right: Box::new(grow(xs, labels, &r, depth + 1, max_depth, min_leaf)),
    }
}

/// Grows a tree of depth at most `max_depth` whose leaves hold at least
/// `min_leaf` samples. Thresholds sit halfway between neighbouring distinct
/// values; among equal impurities the lowest feature and threshold win.
pub fn train_tree<X: AsRef<[f64]>>(
    xs: &[X],
    labels: &[String],
    max_depth: usize,
    min_leaf: usize,
) -> Result<DecisionTreeModel> {
    if xs.is_empty() {
        return Err(TunerError::InvalidArgument("no training records".into()));
    }
    if xs.len() != labels.len() {
        return Err(TunerError::InvalidArgument(format!(
            "{} rows but {} labels",
            xs.len(),
            labels.len()
        )));
    }
    let n_features = xs[0].as_ref().len();
    if xs.iter().any(|x| x.as_ref().len() != n_features) {
        return Err(TunerError::InvalidArgument(
            "feature rows differ in length".into(),
        ));
    }
    let idx: Vec<usize> = (0..xs.len()).collect();
    let root = grow(xs, labels, &idx, 0, max_depth, min_leaf.max(1));
    Ok(DecisionTreeModel { n_features, root })
}
