use serde::{Deserialize, Serialize};

use crate::metric;
use crate::Scalar;

/// Work counters of one run. All fields only ever grow within a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Point (or node pivot) to centroid distance evaluations.
    pub dist_comps: u64,
    /// Centroid to centroid distance evaluations (drifts, inter-center tables).
    pub center_dist_comps: u64,
    /// Point reads.
    pub data_accesses: u64,
    /// Tree node visits.
    pub node_accesses: u64,
    pub bound_accesses: u64,
    pub bound_updates: u64,
    pub iterations: u64,
    pub wall_nanos: u64,
}

impl Counters {
    /// Field-wise `self - earlier`.
    pub fn since(&self, earlier: &Counters) -> Counters {
        Counters {
            dist_comps: self.dist_comps - earlier.dist_comps,
            center_dist_comps: self.center_dist_comps - earlier.center_dist_comps,
            data_accesses: self.data_accesses - earlier.data_accesses,
            node_accesses: self.node_accesses - earlier.node_accesses,
            bound_accesses: self.bound_accesses - earlier.bound_accesses,
            bound_updates: self.bound_updates - earlier.bound_updates,
            iterations: self.iterations - earlier.iterations,
            wall_nanos: self.wall_nanos - earlier.wall_nanos,
        }
    }

    pub fn add(&mut self, other: &Counters) {
        self.dist_comps += other.dist_comps;
        self.center_dist_comps += other.center_dist_comps;
        self.data_accesses += other.data_accesses;
        self.node_accesses += other.node_accesses;
        self.bound_accesses += other.bound_accesses;
        self.bound_updates += other.bound_updates;
        self.iterations += other.iterations;
        self.wall_nanos += other.wall_nanos;
    }
}

/// Shadow checker that recomputes true distances whenever a stored bound is
/// used for a pruning decision. Its distance evaluations are not counted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundAudit {
    pub checks: u64,
    pub violations: u64,
}

/// Relative slack for float rounding in bound arithmetic.
const AUDIT_SLACK: f64 = 1e-9;

impl BoundAudit {
    /// Slack allowed when comparing a bound against a recomputed distance `v`.
    pub fn tolerance(v: f64) -> f64 {
        AUDIT_SLACK * (1.0 + v.abs())
    }

    fn upper<T: Scalar>(&mut self, x: &[T], c: &[T], ub: T) {
        self.checks += 1;
        let truth = metric::euclidean(x, c).as_f64();
        if truth > ub.as_f64() + Self::tolerance(truth) {
            self.violations += 1;
        }
    }

    fn lower<T: Scalar>(&mut self, x: &[T], c: &[T], lb: T) {
        self.checks += 1;
        let truth = metric::euclidean(x, c).as_f64();
        if lb.as_f64() > truth + Self::tolerance(truth) {
            self.violations += 1;
        }
    }
}

/// Per-run mutable context: counters plus the optional bound audit. Passed
/// explicitly through every algorithm; there is no global state.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    pub counters: Counters,
    audit: Option<BoundAudit>,
}

impl RunContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Context with the shadow bound audit switched on.
    pub fn with_audit() -> Self {
        Self {
            counters: Counters::default(),
            audit: Some(BoundAudit::default()),
        }
    }

    pub fn audit(&self) -> Option<&BoundAudit> {
        self.audit.as_ref()
    }

    #[inline]
    pub fn auditing(&self) -> bool {
        self.audit.is_some()
    }

    /// Counted point-to-centroid distance.
    #[inline]
    pub fn dist<T: Scalar>(&mut self, x: &[T], c: &[T]) -> T {
        self.counters.dist_comps += 1;
        metric::euclidean(x, c)
    }

    /// Counted centroid-to-centroid distance.
    #[inline]
    pub fn center_dist<T: Scalar>(&mut self, a: &[T], b: &[T]) -> T {
        self.counters.center_dist_comps += 1;
        metric::euclidean(a, b)
    }

    #[inline]
    pub fn touch_point(&mut self) {
        self.counters.data_accesses += 1;
    }

    #[inline]
    pub fn touch_node(&mut self) {
        self.counters.node_accesses += 1;
    }

    #[inline]
    pub fn read_bounds(&mut self, count: u64) {
        self.counters.bound_accesses += count;
    }

    #[inline]
    pub fn write_bounds(&mut self, count: u64) {
        self.counters.bound_updates += count;
    }

    /// Audit: `ub` must be at least `‖x − c‖`.
    #[inline]
    pub fn check_upper<T: Scalar>(&mut self, x: &[T], c: &[T], ub: T) {
        if let Some(a) = self.audit.as_mut() {
            a.upper(x, c, ub);
        }
    }

    /// Audit: `lb` must not exceed `‖x − c‖`.
    #[inline]
    pub fn check_lower<T: Scalar>(&mut self, x: &[T], c: &[T], lb: T) {
        if let Some(a) = self.audit.as_mut() {
            a.lower(x, c, lb);
        }
    }

    /// Audit: records one check whose outcome is `ok()`. The closure only
    /// runs when auditing.
    #[inline]
    pub fn audit_check(&mut self, ok: impl FnOnce() -> bool) {
        if let Some(a) = self.audit.as_mut() {
            a.checks += 1;
            if !ok() {
                a.violations += 1;
            }
        }
    }

    /// Audit: `lb` must not exceed the distance from `x` to any of `centers`.
    pub fn check_lower_all<'a, T: Scalar>(
        &mut self,
        x: &[T],
        centers: impl IntoIterator<Item = &'a [T]>,
        lb: T,
    ) {
        if let Some(a) = self.audit.as_mut() {
            for c in centers {
                a.lower(x, c, lb);
            }
        }
    }
}
