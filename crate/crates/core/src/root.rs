//! Bisection for increasing functions on a positive axis.

/// Outcome of [`bisect_increasing`]: the final bracket and its midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: u32,
}

/// Bisects an increasing `f` on `[lower, upper]` with `f(lower) <= 0 < f(upper)`,
/// both endpoints positive.
///
/// Midpoints are geometric, so the bracket shrinks by a constant factor in
/// `ln x`; iteration stops once `upper / lower - 1 <= rel_tol`. Only the
/// sign of `f` is used.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lower: f64,
    mut upper: f64,
    rel_tol: f64,
) -> Bisection {
    debug_assert!(lower > 0.0 && upper > lower);
    let mut iterations = 0;
    while upper / lower - 1.0 > rel_tol {
        let mid = libm::sqrt(lower) * libm::sqrt(upper);
        if !(mid > lower && mid < upper) {
            break;
        }
        if f(mid) > 0.0 {
            upper = mid;
        } else {
            lower = mid;
        }
        iterations += 1;
    }
    Bisection {
        root: libm::sqrt(lower) * libm::sqrt(upper),
        lower,
        upper,
        iterations,
    }
}
