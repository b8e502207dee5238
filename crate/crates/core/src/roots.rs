//! Positive root of `u -> M(u) = 1` for a convex moment function with
//! `M(0) = 1` and `M'(0) < 0`.

/// Default bracket cap.
pub const DEFAULT_CAP: f64 = 64.0;

/// Expands `hi = 1, 2, 4, ...` until `M(hi) > 1` (an infinite moment counts
/// as above 1) and bisects. Returns `None` when `hi` exceeds `cap` first.
///
/// Bisection stops once `|M(u) - 1| <= tol` or the bracket can no longer be
/// split in floating point.
pub fn unit_crossing<F>(moment: F, tol: f64, cap: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let above = |m: f64| m > 1.0 || m.is_nan();
    let mut lo = 0.0;
    let mut hi = 1.0;
    loop {
        let m = moment(hi);
        if above(m) {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return None;
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Some(mid);
        }
        let m = moment(mid);
        if m.is_finite() && (m - 1.0).abs() <= tol {
            return Some(mid);
        }
        if above(m) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_root() {
        // 0.3 e^u + 0.7 e^-u = 1 at u = ln(7/3)
        let r = unit_crossing(|u| 0.3 * u.exp() + 0.7 * (-u).exp(), 0.0, 64.0).unwrap();
        assert!((r - (7.0f64 / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn infinite_moment_counts_as_crossing() {
        // Finite below 1.5 and exploding toward it.
        let m = |u: f64| {
            if u >= 1.5 {
                f64::INFINITY
            } else {
                0.5 + 0.1 / (1.5 - u)
            }
        };
        let r = unit_crossing(m, 1e-12, 64.0).unwrap();
        assert!((r - 1.3).abs() < 1e-9, "{r}");
    }

    #[test]
    fn no_crossing_returns_none() {
        assert!(unit_crossing(|u| 0.5f64.powf(u), 1e-12, 64.0).is_none());
    }
}
