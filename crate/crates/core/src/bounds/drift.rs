//! Tighter lower-bound decay for two-dimensional data.

use crate::Scalar;

/// Closed-form drift estimate for a centroid `prev_center` whose cluster has
/// radius `radius`: `2·(c₁·ra − c₂·√(‖c‖² − ra²)) / ‖c‖²`.
///
/// Returns `None` (use the plain drift) unless `d == 2` and
/// `‖c‖ > radius ≥ 0`. A zero radius gives zero.
pub fn drift_delta_2d<T: Scalar>(prev_center: &[T], radius: T) -> Option<T> {
    if prev_center.len() != 2 || radius.partial_cmp(&T::zero()).is_none_or(|o| o.is_lt()) {
        return None;
    }
    if radius == T::zero() {
        return Some(T::zero());
    }
    let (c1, c2) = (prev_center[0], prev_center[1]);
    let n2 = c1 * c1 + c2 * c2;
    if n2.sqrt() <= radius {
        return None;
    }
    let two = T::lit(2.0);
    Some(two * (c1 * radius - c2 * (n2 - radius * radius).sqrt()) / n2)
}

/// `min(|estimate|, true_drift)`, or the true drift when no estimate exists.
pub fn effective_drift<T: Scalar>(estimate: Option<T>, true_drift: T) -> T {
    match estimate {
        Some(v) => v.abs().min(true_drift),
        None => true_drift,
    }
}

#[inline]
fn dist2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    (dx * dx + dy * dy).sqrt()
}

/// Closest point of the circle `(center, radius)` to `q`.
fn closest_on_circle<T: Scalar>(center: [T; 2], radius: T, q: [T; 2]) -> [T; 2] {
    let (dx, dy) = (q[0] - center[0], q[1] - center[1]);
    let len = (dx * dx + dy * dy).sqrt();
    if len > T::zero() {
        [center[0] + radius * dx / len, center[1] + radius * dy / len]
    } else {
        [center[0] + radius, center[1]]
    }
}

/// Lower bound on `‖x − c_new‖` for any 2-D point `x` with
/// `‖x − c_old‖ ≥ l` and `‖x − anchor‖ ≤ u`.
///
/// The minimum of the distance to `c_new` over that region lies at `c_new`
/// itself, at the closest point of either boundary circle, or at a circle
/// intersection. Returns `-inf` when no candidate survives (the region is
/// empty up to rounding) so callers fall back to the plain decay.
pub fn geometric_lb_2d<T: Scalar>(c_old: &[T], l: T, anchor: &[T], u: T, c_new: &[T]) -> T {
    let o = [c_old[0], c_old[1]];
    let a = [anchor[0], anchor[1]];
    let q = [c_new[0], c_new[1]];
    let scale = u + l + dist2(a, o) + dist2(o, q);
    let tol = scale * T::lit(1e-12);
    let inside_disk = |p: [T; 2]| dist2(p, a) <= u + tol;
    let outside_ball = |p: [T; 2]| dist2(p, o) >= l - tol;

    if inside_disk(q) && outside_ball(q) {
        return T::zero();
    }
    let mut best = T::infinity();
    let p1 = closest_on_circle(a, u, q);
    if outside_ball(p1) {
        best = best.min(dist2(p1, q));
    }
    if l > T::zero() {
        let p2 = closest_on_circle(o, l, q);
        if inside_disk(p2) {
            best = best.min(dist2(p2, q));
        }
        let dd = dist2(a, o);
        if dd > T::zero() && dd <= u + l && dd >= (u - l).abs() {
            // intersection of circle(a, u) and circle(o, l)
            let along = (u * u - l * l + dd * dd) / (dd + dd);
            let h = (u * u - along * along).max(T::zero()).sqrt();
            let (ex, ey) = ((o[0] - a[0]) / dd, (o[1] - a[1]) / dd);
            let (mx, my) = (a[0] + along * ex, a[1] + along * ey);
            for s in [h, -h] {
                let p = [mx - s * ey, my + s * ex];
                best = best.min(dist2(p, q));
            }
        }
    }
    if best.is_infinite() {
        return T::neg_infinity();
    }
    best - tol
}
