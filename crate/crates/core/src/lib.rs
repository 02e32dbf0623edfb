//! Exact k-means clustering with pluggable assignment pruning.
//!
//! Every accelerated configuration returns the same labels and centroids as
//! plain Lloyd iteration from the same initial centers; they differ only in
//! how many point-to-centroid distances they evaluate.

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod context;
pub mod data;
pub mod engine;
pub mod error;
pub mod init;
pub mod lloyd;
pub mod metric;
pub mod run;
mod scalar;
pub mod tree;

pub use bounds::{run_search, run_sequential, BoundStrategy};
pub use context::{BoundAudit, Counters, RunContext};
pub use data::{Assignment, CentroidSet, DataSet};
pub use engine::{run_engine, run_engine_with, ClusterRecord, IndexMode, KnobConfig};
pub use error::{KmeansError, Result};
pub use init::{init_kmeanspp, init_random, RNG_NAME};
pub use lloyd::{assign_full, refine_full, run_lloyd, sse};
pub use run::{IterationRecord, RunOptions, RunResult};
pub use scalar::Scalar;
pub use tree::{build_balltree, build_kdtree, BallTree, Tree, TreeKind};

pub type DataSet64 = DataSet<f64>;
pub type DataSet32 = DataSet<f32>;
pub type CentroidSet64 = CentroidSet<f64>;
pub type CentroidSet32 = CentroidSet<f32>;
pub type RunResult64 = RunResult<f64>;
pub type RunResult32 = RunResult<f32>;
