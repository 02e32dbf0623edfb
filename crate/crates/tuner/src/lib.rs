//! Picks an accelerated k-means configuration from cheap dataset features.
//!
//! Ground truth comes from timing a short list of strong configurations on
//! each training dataset. Two classifiers, one for the bound strategy and
//! one for the index mode, learn those labels from tree-shape features.

pub mod cart;
pub mod error;
pub mod features;
pub mod knn;
pub mod select;
pub mod truth;

pub use cart::{train_tree, Classifier, DecisionTreeModel, TreeNode};
pub use error::{Result, TunerError};
pub use features::{extract_features, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use knn::KnnModel;
pub use select::{
    baseline_bdt, combine, compare_on_holdout, mrr, predict_config, rank_of, Comparison, Selector,
};
pub use truth::{
    read_records, selective_run, write_records, GroundTruthRecord, SelectiveOptions, SELECTION_POOL,
};
