//! Euclidean distance kernel and the norm helpers the bounds rely on.

use crate::error::{KmeansError, Result};
use crate::Scalar;

/// Squared L2 distance. Uncounted; callers that participate in a run go
/// through [`crate::RunContext::dist`].
#[inline]
pub fn sq_euclidean<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        let t = a - b;
        acc += t * t;
    }
    acc
}

#[inline]
pub fn euclidean<T: Scalar>(x: &[T], y: &[T]) -> T {
    sq_euclidean(x, y).sqrt()
}

/// Checked distance; rejects vectors of different dimension.
pub fn distance<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(KmeansError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(euclidean(x, y))
}

#[inline]
pub fn norm<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

/// Splits `x` into `blocks` contiguous blocks (the last one may be shorter
/// when `blocks` does not divide the length) and returns the L2 norm of each.
pub fn block_norms<T: Scalar>(x: &[T], blocks: usize) -> Vec<T> {
    let blocks = blocks.clamp(1, x.len().max(1));
    let width = x.len().div_ceil(blocks);
    let mut out: Vec<T> = x.chunks(width).map(norm).collect();
    out.resize(blocks, T::zero());
    out
}

/// Lower bound on `‖x − c‖` from the full norms and per-block norms of both
/// vectors. Per-block Cauchy–Schwarz gives `⟨x, c⟩ ≤ ⟨x^B, c^B⟩`.
///
/// A small relative slack keeps rounding in the subtraction from pushing the
/// bound above the true distance for (near-)parallel vectors.
pub fn block_lower_bound<T: Scalar>(x_norm: T, c_norm: T, x_blocks: &[T], c_blocks: &[T]) -> T {
    let dot: T = x_blocks.iter().zip(c_blocks).map(|(&a, &b)| a * b).sum();
    let total = x_norm * x_norm + c_norm * c_norm;
    let slack = total * T::epsilon() * T::lit(8.0);
    let v = total - (dot + dot) - slack;
    if v > T::zero() {
        v.sqrt()
    } else {
        T::zero()
    }
}

/// Convenience wrapper computing norms and block norms on the fly.
pub fn block_vector_lb<T: Scalar>(x: &[T], c: &[T], blocks: usize) -> T {
    let xb = block_norms(x, blocks);
    let cb = block_norms(c, blocks);
    block_lower_bound(norm(x), norm(c), &xb, &cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(distance(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        let d = distance(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn distance_rejects_mismatch() {
        let err = distance(&[1.0, 2.0], &[1.0]).unwrap_err();
        assert_eq!(
            err,
            KmeansError::DimensionMismatch {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn block_lb_parallel_blocks_are_tight() {
        let x = [1.0, 1.0, 1.0, 1.0];
        let xb = block_norms(&x, 2);
        assert!((xb[0] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(block_vector_lb(&x, &x, 2), 0.0);
    }

    #[test]
    fn block_lb_orthogonal_blocks() {
        let x = [1.0, 0.0, 0.0, 1.0];
        let c = [0.0, 1.0, 1.0, 0.0];
        let lb = block_vector_lb(&x, &c, 2);
        assert_eq!(lb, 0.0);
        assert!(lb <= euclidean(&x, &c));
        assert_eq!(euclidean(&x, &c), 2.0);
    }

    #[test]
    fn block_lb_one_block_per_coordinate() {
        // all coordinate products non-negative: the bound is the distance
        let x = [1.0f64, 2.0, 0.5];
        let c = [3.0, 0.0, 1.5];
        let lb = block_vector_lb(&x, &c, 3);
        assert!((lb - euclidean(&x, &c)).abs() < 1e-7);
    }

    #[test]
    fn uneven_blocks_pad() {
        let b = block_norms(&[3.0, 4.0, 12.0], 2);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0], 5.0);
        assert_eq!(b[1], 12.0);
    }
}
