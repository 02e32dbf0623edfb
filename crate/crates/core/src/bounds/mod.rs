//! Sequential bound-based assignment.
//!
//! Every strategy keeps per-point bounds across iterations and skips
//! distance evaluations the bounds prove unnecessary. All of them return
//! exactly the labels of a full scan: prune tests are strict, so a centroid
//! tied with the current best is always measured and the lowest index wins.

mod candidates;
mod drake;
mod drift;
mod elkan;
mod hamerly;
mod heap;
mod search;
mod yinyang;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::error::{KmeansError, Result};
use crate::lloyd::{assign_full_into, check_run_inputs, refine_full};
use crate::metric;
use crate::run::{drive, RunOptions, RunResult, Stepper};
use crate::tree::BallTree;
use crate::Scalar;

pub use candidates::{annulus_candidates, exponion_candidates, pami20_candidates, NormIndex};
pub use drake::drake_width;
pub use drift::{drift_delta_2d, effective_drift, geometric_lb_2d};
pub use search::{search_preassign, SearchAssigner};
pub use yinyang::{group_centroids, group_count};
pub(crate) use yinyang::{group_means, nearest_groups};

/// Which bound family a sequential run (or the engine) uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStrategy {
    None,
    Elka,
    Hame,
    Drak,
    Annu,
    Heap,
    Yinyang,
    Regroup,
    Expo,
    Drift,
    Vector,
    Pami20,
    Full,
}

impl BoundStrategy {
    pub const ALL: [BoundStrategy; 13] = [
        Self::None,
        Self::Elka,
        Self::Hame,
        Self::Drak,
        Self::Annu,
        Self::Heap,
        Self::Yinyang,
        Self::Regroup,
        Self::Expo,
        Self::Drift,
        Self::Vector,
        Self::Pami20,
        Self::Full,
    ];

    /// Strategies that run on their own without the engine.
    pub const SEQUENTIAL: [BoundStrategy; 11] = [
        Self::Elka,
        Self::Hame,
        Self::Drak,
        Self::Annu,
        Self::Heap,
        Self::Yinyang,
        Self::Regroup,
        Self::Expo,
        Self::Drift,
        Self::Vector,
        Self::Pami20,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Elka => "elka",
            Self::Hame => "hame",
            Self::Drak => "drak",
            Self::Annu => "annu",
            Self::Heap => "heap",
            Self::Yinyang => "yinyang",
            Self::Regroup => "regroup",
            Self::Expo => "expo",
            Self::Drift => "drift",
            Self::Vector => "vector",
            Self::Pami20 => "pami20",
            Self::Full => "full",
        }
    }
}

impl fmt::Display for BoundStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundStrategy {
    type Err = KmeansError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| KmeansError::Config(format!("unknown bound strategy `{s}`")))
    }
}

/// One assignment step with state carried between calls.
///
/// The first call seeds the bounds with a full scan; later calls receive the
/// refined centroids and the labels written by the previous call.
pub trait Assigner<T: Scalar> {
    fn assign(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    );
}

/// Plain full scan as an [`Assigner`].
#[derive(Debug, Default, Clone, Copy)]
pub struct FullScan;

impl<T: Scalar> Assigner<T> for FullScan {
    fn assign(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        assign_full_into(ctx, data, centroids, labels);
    }
}

/// Builds the assigner for a sequential strategy. `None` gives a full scan;
/// `Full` only exists inside the engine.
pub fn sequential_assigner<T: Scalar>(
    strategy: BoundStrategy,
    d: usize,
) -> Result<Box<dyn Assigner<T>>> {
    Ok(match strategy {
        BoundStrategy::None => Box::new(FullScan),
        BoundStrategy::Elka => Box::new(elkan::Elkan::new(elkan::Extra::Plain)),
        BoundStrategy::Drift => Box::new(elkan::Elkan::new(if d == 2 {
            elkan::Extra::Drift
        } else {
            elkan::Extra::Plain
        })),
        BoundStrategy::Vector => Box::new(elkan::Elkan::new(elkan::Extra::Vector { blocks: 2 })),
        BoundStrategy::Hame => Box::new(hamerly::Hamerly::new(hamerly::Filter::None)),
        BoundStrategy::Annu => Box::new(hamerly::Hamerly::new(hamerly::Filter::Annulus)),
        BoundStrategy::Expo => Box::new(hamerly::Hamerly::new(hamerly::Filter::Exponion)),
        BoundStrategy::Pami20 => Box::new(hamerly::Hamerly::new(hamerly::Filter::Pami20)),
        BoundStrategy::Drak => Box::new(drake::Drake::default()),
        BoundStrategy::Heap => Box::new(heap::HeapAssigner::default()),
        BoundStrategy::Yinyang => Box::new(yinyang::Yinyang::new(false)),
        BoundStrategy::Regroup => Box::new(yinyang::Yinyang::new(true)),
        BoundStrategy::Full => {
            return Err(KmeansError::Config(
                "the `full` bound set requires the engine".into(),
            ))
        }
    })
}

struct SeqStepper<'a, T: Scalar> {
    data: &'a DataSet<T>,
    assigner: Box<dyn Assigner<T> + 'a>,
}

impl<T: Scalar> Stepper<T> for SeqStepper<'_, T> {
    fn assign(&mut self, ctx: &mut RunContext, centroids: &CentroidSet<T>, labels: &mut [usize]) {
        self.assigner.assign(ctx, self.data, centroids, labels);
    }

    fn refine(
        &mut self,
        ctx: &mut RunContext,
        labels: &[usize],
        _: Option<&[usize]>,
        centroids: &mut CentroidSet<T>,
    ) {
        *centroids = refine_full(ctx, self.data, labels, centroids);
    }
}

/// Runs a sequential strategy with full refinement.
pub fn run_sequential<T: Scalar>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    strategy: BoundStrategy,
    opts: &RunOptions,
) -> Result<RunResult<T>> {
    check_run_inputs(data, init, opts)?;
    let assigner = sequential_assigner(strategy, data.d())?;
    Ok(drive(data, init, opts, &mut SeqStepper { data, assigner }))
}

/// Full scans accelerated by per-centroid range searches over a Ball-tree.
pub fn run_search<T: Scalar>(
    data: &DataSet<T>,
    init: &CentroidSet<T>,
    tree: &BallTree<T>,
    opts: &RunOptions,
) -> Result<RunResult<T>> {
    check_run_inputs(data, init, opts)?;
    let assigner = Box::new(SearchAssigner::new(tree));
    Ok(drive(data, init, opts, &mut SeqStepper { data, assigner }))
}

/// `‖new_j − old_j‖` for every centroid. Uncounted.
pub fn center_drifts<T: Scalar>(old: &CentroidSet<T>, new: &CentroidSet<T>) -> Vec<T> {
    old.centers()
        .zip(new.centers())
        .map(|(a, b)| metric::euclidean(a, b))
        .collect()
}

/// Centroid movement between consecutive assignment calls.
#[derive(Debug, Clone)]
pub(crate) struct Motion<T> {
    prev: Option<CentroidSet<T>>,
    pub drift: Vec<T>,
    max: T,
    max_idx: usize,
    second: T,
}

impl<T: Scalar> Default for Motion<T> {
    fn default() -> Self {
        Self {
            prev: None,
            drift: Vec::new(),
            max: T::zero(),
            max_idx: 0,
            second: T::zero(),
        }
    }
}

impl<T: Scalar> Motion<T> {
    /// Records `centroids` as current. Returns the previous centroids, or
    /// `None` on the first call.
    pub fn advance(
        &mut self,
        ctx: &mut RunContext,
        centroids: &CentroidSet<T>,
    ) -> Option<CentroidSet<T>> {
        let old = self.prev.replace(centroids.clone());
        let k = centroids.k();
        self.drift.clear();
        self.max = T::zero();
        self.second = T::zero();
        self.max_idx = 0;
        match &old {
            Some(o) => {
                for j in 0..k {
                    let v = ctx.center_dist(o.center(j), centroids.center(j));
                    self.drift.push(v);
                    if v > self.max {
                        self.second = self.max;
                        self.max = v;
                        self.max_idx = j;
                    } else if v > self.second {
                        self.second = v;
                    }
                }
            }
            None => self.drift.resize(k, T::zero()),
        }
        old
    }

    pub fn max(&self) -> T {
        self.max
    }

    /// Largest drift among centroids other than `j`.
    pub fn max_other(&self, j: usize) -> T {
        if j == self.max_idx {
            self.second
        } else {
            self.max
        }
    }
}

/// Pairwise centroid distances and half the distance from each centroid to
/// its nearest other centroid.
#[derive(Debug, Clone, Default)]
pub(crate) struct Geometry<T> {
    k: usize,
    cc: Vec<T>,
    pub s: Vec<T>,
    sorted: Vec<Vec<(T, usize)>>,
}

impl<T: Scalar> Geometry<T> {
    pub fn compute(&mut self, ctx: &mut RunContext, centroids: &CentroidSet<T>) {
        let k = centroids.k();
        self.k = k;
        self.cc.clear();
        self.cc.resize(k * k, T::zero());
        self.s.clear();
        self.s.resize(k, T::infinity());
        for a in 0..k {
            for b in a + 1..k {
                let v = ctx.center_dist(centroids.center(a), centroids.center(b));
                self.cc[a * k + b] = v;
                self.cc[b * k + a] = v;
            }
        }
        let half = T::lit(0.5);
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    let h = self.cc[a * k + b] * half;
                    if h < self.s[a] {
                        self.s[a] = h;
                    }
                }
            }
        }
        self.sorted.clear();
    }

    #[inline]
    pub fn cc(&self, a: usize, b: usize) -> T {
        self.cc[a * self.k + b]
    }

    pub fn row(&self, a: usize) -> &[T] {
        &self.cc[a * self.k..(a + 1) * self.k]
    }

    /// For every centroid, the other centroids ordered by distance to it.
    pub fn sort_rows(&mut self) {
        let k = self.k;
        self.sorted = (0..k)
            .map(|a| {
                let mut row: Vec<(T, usize)> = (0..k)
                    .filter(|&b| b != a)
                    .map(|b| (self.cc[a * k + b], b))
                    .collect();
                row.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
                row
            })
            .collect();
    }

    pub fn sorted_row(&self, a: usize) -> &[(T, usize)] {
        &self.sorted[a]
    }
}

/// `(d, j)` orders before `(best_d, best)`.
#[inline]
pub(crate) fn better<T: Scalar>(d: T, j: usize, best_d: T, best: usize) -> bool {
    d < best_d || (d == best_d && j < best)
}

/// Nearest, its distance, the second smallest distance and its index, over
/// all centroids. Entries of `dist` that are not NaN are reused; the rest
/// are computed and stored.
pub(crate) fn scan_all<T: Scalar>(
    ctx: &mut RunContext,
    x: &[T],
    centroids: &CentroidSet<T>,
    dist: &mut [T],
) -> Nearest2<T> {
    let mut n = Nearest2::empty();
    for (j, slot) in dist.iter_mut().enumerate() {
        if slot.is_nan() {
            *slot = ctx.dist(x, centroids.center(j));
        }
        n.offer(*slot, j);
    }
    n
}

/// Running lexicographic nearest and second nearest.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Nearest2<T> {
    pub best: usize,
    pub d1: T,
    pub second: usize,
    pub d2: T,
}

impl<T: Scalar> Nearest2<T> {
    pub fn empty() -> Self {
        Self {
            best: usize::MAX,
            d1: T::infinity(),
            second: usize::MAX,
            d2: T::infinity(),
        }
    }

    #[inline]
    pub fn offer(&mut self, d: T, j: usize) {
        if better(d, j, self.d1, self.best) {
            self.second = self.best;
            self.d2 = self.d1;
            self.best = j;
            self.d1 = d;
        } else if better(d, j, self.d2, self.second) {
            self.second = j;
            self.d2 = d;
        }
    }
}

#[inline]
pub(crate) fn reset_nan<T: Scalar>(buf: &mut [T]) {
    buf.iter_mut().for_each(|v| *v = T::nan());
}

#[inline]
pub(crate) fn floor0<T: Scalar>(v: T) -> T {
    if v > T::zero() {
        v
    } else {
        T::zero()
    }
}
