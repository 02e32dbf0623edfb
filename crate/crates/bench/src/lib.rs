//! Datasets, benchmark runs, run logs and reports for the exact k-means
//! engine, plus the `kmeans-bench` command line.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod footprint;
pub mod log;
pub mod report;
pub mod runner;
pub mod suite;

pub use dataset::{gen_gaussian, load_dataset, parse_dataset};
pub use error::{BenchError, Result};
pub use footprint::{footprint_estimate, footprint_measured};
pub use log::{read_logs, write_logs, IterationLog, RunLog, Totals};
pub use report::{report, Format};
pub use runner::{run_benchmark, BenchDataset, BenchOptions, InitKind};
