//! One engine for every index and bound combination.
//!
//! Tree nodes and points flow through a single queue. Each object is tested
//! with radius-adjusted bounds at its pivot (radius 0 for points): it either
//! stays where it was, moves whole to the nearest centroid of its pivot, or
//! splits and hands inherited bounds to its children. Clusters keep sum
//! vectors, so refinement is a division per centroid.

mod cluster;
mod config;
mod traverse;

use crate::bounds::{run_search, sequential_assigner, Assigner, BoundStrategy};
use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::error::Result;
use crate::lloyd::{check_run_inputs, run_lloyd};
use crate::run::{drive, RunOptions, RunResult, Stepper};
use crate::tree::{Tree, TreeKind};
use crate::Scalar;

pub use cluster::{incremental_refine, transfer, ClusterRecord};
pub use config::{IndexMode, KnobConfig};

/// `lb − r > ub + r`: no point of the object can be closer to another
/// centroid than to the one it holds.
#[inline]
pub fn node_global_prune<T: Scalar>(lb: T, ub: T, r: T) -> bool {
    lb - r > ub + r
}

/// `lb_j − r > ub + r`: centroid `j` is nearest for no point of the object.
#[inline]
pub fn node_local_prune<T: Scalar>(lb_j: T, ub: T, r: T) -> bool {
    lb_j - r > ub + r
}

/// `d_second − r > d_nearest + r`: every point of the object shares the
/// pivot's nearest centroid.
#[inline]
pub fn node_assignable<T: Scalar>(d_nearest: T, d_second: T, r: T) -> bool {
    d_second - r > d_nearest + r
}

/// Bounds held at a pivot: one upper bound to the assigned centroid and a
/// lower bound per centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotBounds<T> {
    pub ub: T,
    pub lb: Vec<T>,
}

/// Bounds at a child pivot `psi` away from the parent pivot: upper bound
/// grows by `psi`, lower bounds shrink by it (never below zero).
pub fn inherit_bounds<T: Scalar>(parent: &PivotBounds<T>, psi: T) -> PivotBounds<T> {
    PivotBounds {
        ub: parent.ub + psi,
        lb: parent
            .lb
            .iter()
            .map(|&v| crate::bounds::floor0(v - psi))
            .collect(),
    }
}

/// Bound families the engine maintains.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Knobs {
    /// One lower bound over all other centroids.
    pub global: bool,
    /// One lower bound per centroid group.
    pub group: bool,
    /// One lower bound per centroid.
    pub local: bool,
    /// Norm-difference lower bound.
    pub annulus: bool,
    /// Inter-center lower bound around the assigned centroid.
    pub exponion: bool,
    /// Geometric decay of local bounds on 2-D data.
    pub drift2d: bool,
    /// Block-norm lower bound.
    pub vector: bool,
    /// Regroup centroids every iteration.
    pub regroup: bool,
}

impl Knobs {
    pub fn for_strategy(b: BoundStrategy) -> Self {
        let k = Self::default();
        match b {
            BoundStrategy::None => k,
            BoundStrategy::Elka => Self { local: true, ..k },
            BoundStrategy::Hame | BoundStrategy::Heap => Self { global: true, ..k },
            BoundStrategy::Drak => Self {
                global: true,
                local: true,
                ..k
            },
            BoundStrategy::Annu => Self {
                global: true,
                annulus: true,
                ..k
            },
            BoundStrategy::Yinyang => Self {
                global: true,
                group: true,
                local: true,
                ..k
            },
            BoundStrategy::Regroup => Self {
                global: true,
                group: true,
                local: true,
                regroup: true,
                ..k
            },
            BoundStrategy::Expo | BoundStrategy::Pami20 => Self {
                global: true,
                exponion: true,
                ..k
            },
            BoundStrategy::Drift => Self {
                local: true,
                drift2d: true,
                ..k
            },
            BoundStrategy::Vector => Self {
                local: true,
                vector: true,
                ..k
            },
            BoundStrategy::Full => Self {
                global: true,
                group: true,
                local: true,
                annulus: true,
                exponion: true,
                drift2d: true,
                vector: true,
                regroup: true,
            },
        }
    }

    pub fn any(&self) -> bool {
        *self != Self::default()
    }
}

/// Builds the tree a configuration traverses, if any.
pub fn build_index<T: Scalar>(data: &DataSet<T>, config: &KnobConfig) -> Option<Tree<T>> {
    let needs_tree = config.index_mode != IndexMode::None || config.use_search;
    needs_tree.then(|| match config.index_kind {
        TreeKind::Ball => Tree::build_ball(data, config.capacity),
        TreeKind::Kd => Tree::build_kd(data, config.capacity),
    })
}

/// Runs `config` for at most `config.t_max` iterations.
pub fn run_engine<T: Scalar>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    config: &KnobConfig,
) -> Result<RunResult<T>> {
    run_engine_with(data, init, config, &RunOptions::with_t_max(config.t_max))
}

/// Runs `config` with explicit run options; `opts.t_max` wins over
/// `config.t_max`.
pub fn run_engine_with<T: Scalar>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    config: &KnobConfig,
    opts: &RunOptions,
) -> Result<RunResult<T>> {
    run_engine_inspect(data, init, config, opts, |_| {})
}

/// Like [`run_engine_with`], calling `inspect` with the cluster records after
/// every refinement. Configurations without cluster records (plain Lloyd and
/// search) never call it.
pub fn run_engine_inspect<T: Scalar>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    config: &KnobConfig,
    opts: &RunOptions,
    inspect: impl FnMut(&[ClusterRecord<T>]),
) -> Result<RunResult<T>> {
    config.validate()?;
    check_run_inputs(data, init, opts)?;
    if config.is_lloyd() {
        return run_lloyd(data, init, opts);
    }
    let tree = build_index(data, config);
    if config.use_search {
        return run_search(
            data,
            init,
            tree.as_ref().expect("search builds a tree"),
            opts,
        );
    }
    if config.index_mode == IndexMode::None && config.bound_strategy != BoundStrategy::Full {
        let assigner = sequential_assigner(config.bound_strategy, data.d())?;
        let mut stepper = SeqIncremental::new(data, init.k(), assigner, inspect);
        return Ok(drive(data, init, opts, &mut stepper));
    }
    let mut stepper = traverse::Traversal::new(data, tree.as_ref(), init, config, inspect);
    Ok(drive(data, init, opts, &mut stepper))
}

/// Sequential bounds for assignment, sum vectors for refinement.
struct SeqIncremental<'a, T: Scalar, F> {
    data: &'a DataSet<T>,
    assigner: Box<dyn Assigner<T> + 'a>,
    clusters: Vec<ClusterRecord<T>>,
    before: Vec<usize>,
    inspect: F,
}

impl<'a, T: Scalar, F: FnMut(&[ClusterRecord<T>])> SeqIncremental<'a, T, F> {
    fn new(
        data: &'a DataSet<T>,
        k: usize,
        assigner: Box<dyn Assigner<T> + 'a>,
        inspect: F,
    ) -> Self {
        let mut clusters = vec![ClusterRecord::empty(data.d()); k];
        clusters[0].add(&data.column_sums(), data.n());
        clusters[0].points = (0..data.n()).collect();
        Self {
            data,
            assigner,
            clusters,
            before: vec![0; data.n()],
            inspect,
        }
    }
}

impl<T: Scalar, F: FnMut(&[ClusterRecord<T>])> Stepper<T> for SeqIncremental<'_, T, F> {
    fn assign(&mut self, ctx: &mut RunContext, centroids: &CentroidSet<T>, labels: &mut [usize]) {
        self.assigner.assign(ctx, self.data, centroids, labels);
        for (i, (&old, &new)) in self.before.iter().zip(labels.iter()).enumerate() {
            if old != new {
                transfer(&mut self.clusters, old, new, self.data.row(i), 1);
            }
        }
        self.before.copy_from_slice(labels);
        self.clusters.iter_mut().for_each(|c| c.points.clear());
        for (i, &l) in labels.iter().enumerate() {
            self.clusters[l].points.push(i);
        }
    }

    fn refine(
        &mut self,
        _: &mut RunContext,
        _: &[usize],
        _: Option<&[usize]>,
        centroids: &mut CentroidSet<T>,
    ) {
        *centroids = incremental_refine(&self.clusters, centroids);
        (self.inspect)(&self.clusters);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prune_examples() {
        assert!(node_global_prune(10.0, 2.0, 1.0));
        assert!(!node_global_prune(10.0, 2.0, 4.0));
        assert_eq!(node_global_prune(3.0, 2.0, 0.0), 3.0 > 2.0);
        assert!(node_local_prune(8.0, 1.0, 2.0));
        assert!(!node_local_prune(5.0, 1.0, 2.0));
        assert!(!node_local_prune(2.0, 2.0, 0.0));
    }

    #[test]
    fn assignable_examples() {
        assert!(node_assignable(2.0, 9.0, 1.0));
        assert!(!node_assignable(2.0, 4.0, 1.0));
        assert!(node_assignable(2.0, 2.5, 0.0));
    }

    #[test]
    fn inheritance_examples() {
        let p = PivotBounds {
            ub: 2.0,
            lb: vec![5.0, 0.5],
        };
        let c = inherit_bounds(&p, 1.0);
        assert_eq!(
            c,
            PivotBounds {
                ub: 3.0,
                lb: vec![4.0, 0.0]
            }
        );
        assert_eq!(inherit_bounds(&p, 0.0), p);
    }

    #[test]
    fn knob_mapping() {
        assert!(!Knobs::for_strategy(BoundStrategy::None).any());
        let y = Knobs::for_strategy(BoundStrategy::Yinyang);
        assert!(y.global && y.group && y.local && !y.regroup);
        let f = Knobs::for_strategy(BoundStrategy::Full);
        assert!(f.annulus && f.exponion && f.vector && f.drift2d && f.regroup);
        assert_eq!(
            Knobs::for_strategy(BoundStrategy::Elka),
            Knobs {
                local: true,
                ..Knobs::default()
            }
        );
    }
}
