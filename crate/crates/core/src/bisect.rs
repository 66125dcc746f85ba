//! Bisection on monotone predicates and monotone scalar functions.

/// Finds the boundary of a predicate that holds on `[lo, t)` and fails on
/// `(t, hi]`. Returns the midpoint of the final bracket of width `<= tol`.
///
/// The caller guarantees `pred(lo)` and `!pred(hi)`; neither endpoint is
/// evaluated here.
pub fn last_true<P>(mut lo: f64, mut hi: f64, tol: f64, mut pred: P) -> f64
where
    P: FnMut(f64) -> bool,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `f(t) = target` for a non-decreasing `f` on `[lo, hi]`.
///
/// Returns `None` when the target is not bracketed by `f(lo)` and `f(hi)`.
/// Iterates until the bracket stops shrinking or reaches width `tol`.
pub fn solve_increasing<F>(mut lo: f64, mut hi: f64, target: f64, tol: f64, mut f: F) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if target < f_lo || target > f_hi {
        return None;
    }
    if f_lo == target {
        return Some(lo);
    }
    if f_hi == target {
        return Some(hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == target {
            return Some(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
