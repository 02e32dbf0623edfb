//! Per-centroid lower bounds, with optional extra bound sources.

use super::drift::geometric_lb_2d;
use super::{better, floor0, Assigner, Geometry, Motion};
use crate::context::RunContext;
use crate::data::{CentroidSet, DataSet};
use crate::metric;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Extra {
    Plain,
    /// Two-dimensional geometric decay of the stored lower bounds.
    Drift,
    /// Block-vector lower bound consulted before measuring.
    Vector {
        blocks: usize,
    },
}

pub(crate) struct Elkan<T> {
    extra: Extra,
    motion: Motion<T>,
    geo: Geometry<T>,
    ub: Vec<T>,
    lb: Vec<T>,
    x_norm: Vec<T>,
    x_blocks: Vec<T>,
    c_norm: Vec<T>,
    c_blocks: Vec<T>,
    started: bool,
}

impl<T: Scalar> Elkan<T> {
    pub fn new(extra: Extra) -> Self {
        Self {
            extra,
            motion: Motion::default(),
            geo: Geometry::default(),
            ub: Vec::new(),
            lb: Vec::new(),
            x_norm: Vec::new(),
            x_blocks: Vec::new(),
            c_norm: Vec::new(),
            c_blocks: Vec::new(),
            started: false,
        }
    }

    fn seed(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        let (n, k) = (data.n(), centroids.k());
        self.ub = vec![T::zero(); n];
        self.lb = vec![T::zero(); n * k];
        for (i, x) in data.rows().enumerate() {
            ctx.touch_point();
            let row = &mut self.lb[i * k..(i + 1) * k];
            let (mut best, mut bd) = (0, T::infinity());
            for (j, slot) in row.iter_mut().enumerate() {
                let d = ctx.dist(x, centroids.center(j));
                *slot = d;
                if d < bd {
                    best = j;
                    bd = d;
                }
            }
            labels[i] = best;
            self.ub[i] = bd;
        }
        ctx.write_bounds((n * (k + 1)) as u64);
        if let Extra::Vector { blocks } = self.extra {
            self.x_norm = data.rows().map(metric::norm).collect();
            self.x_blocks = data
                .rows()
                .flat_map(|x| metric::block_norms(x, blocks))
                .collect();
        }
        self.started = true;
    }
}

impl<T: Scalar> Assigner<T> for Elkan<T> {
    fn assign(
        &mut self,
        ctx: &mut RunContext,
        data: &DataSet<T>,
        centroids: &CentroidSet<T>,
        labels: &mut [usize],
    ) {
        let old = self.motion.advance(ctx, centroids);
        if !self.started {
            self.seed(ctx, data, centroids, labels);
            return;
        }
        let old = old.expect("previous centroids recorded");
        self.geo.compute(ctx, centroids);
        let k = centroids.k();
        let blocks = match self.extra {
            Extra::Vector { blocks } => {
                self.c_norm = centroids.centers().map(metric::norm).collect();
                self.c_blocks = centroids
                    .centers()
                    .flat_map(|c| metric::block_norms(c, blocks))
                    .collect();
                blocks
            }
            _ => 0,
        };
        let half = T::lit(0.5);

        for (i, x) in data.rows().enumerate() {
            let a0 = labels[i];
            let mut ub = self.ub[i] + self.motion.drift[a0];
            let row = &mut self.lb[i * k..(i + 1) * k];
            match self.extra {
                Extra::Drift => {
                    let anchor = centroids.center(a0);
                    for (j, l) in row.iter_mut().enumerate() {
                        let plain = floor0(*l - self.motion.drift[j]);
                        let geo =
                            geometric_lb_2d(old.center(j), *l, anchor, ub, centroids.center(j));
                        *l = plain.max(geo);
                    }
                }
                _ => {
                    for (j, l) in row.iter_mut().enumerate() {
                        *l = floor0(*l - self.motion.drift[j]);
                    }
                }
            }
            ctx.read_bounds((k + 1) as u64);
            ctx.write_bounds((k + 1) as u64);

            if self.geo.s[a0] > ub {
                ctx.check_upper(x, centroids.center(a0), ub);
                self.ub[i] = ub;
                continue;
            }

            let mut best = a0;
            let mut tight = false;
            let mut d_a0 = T::nan();
            for j in 0..k {
                if j == best {
                    continue;
                }
                let z = row[j].max(self.geo.cc(best, j) * half);
                if z > ub {
                    ctx.check_upper(x, centroids.center(best), ub);
                    ctx.check_lower(x, centroids.center(j), z);
                    continue;
                }
                if !tight {
                    ctx.touch_point();
                    ub = ctx.dist(x, centroids.center(best));
                    d_a0 = ub;
                    row[best] = ub;
                    tight = true;
                    if z > ub {
                        ctx.check_lower(x, centroids.center(j), z);
                        continue;
                    }
                }
                let d = if j == a0 {
                    d_a0
                } else {
                    if blocks > 0 {
                        let vb = metric::block_lower_bound(
                            self.x_norm[i],
                            self.c_norm[j],
                            &self.x_blocks[i * blocks..(i + 1) * blocks],
                            &self.c_blocks[j * blocks..(j + 1) * blocks],
                        );
                        if vb > ub {
                            ctx.check_lower(x, centroids.center(j), vb);
                            row[j] = row[j].max(vb);
                            continue;
                        }
                    }
                    ctx.dist(x, centroids.center(j))
                };
                row[j] = d;
                ctx.write_bounds(1);
                if better(d, j, ub, best) {
                    best = j;
                    ub = d;
                }
            }
            labels[i] = best;
            self.ub[i] = ub;
        }
    }
}
