//! Bracketing root finders used by the threshold solvers.

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign (or one of
/// them zero). Stops once the bracket is narrower than `tol` and the midpoint
/// residual is within `tol`, or when the bracket cannot shrink further.
/// Returns the point of the final bracket with the smaller `|f|`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return lo;
    }
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(f_lo.signum() != f_hi.signum(), "bisect needs a sign change");
    let mut f_hi = f_hi;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if hi - lo <= tol && f_mid.abs() <= tol {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    if f_lo.abs() <= f_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Evaluates `f` on `n` evenly spaced points of `[lo, hi]` and bisects every
/// sign change. Grid points where `f` vanishes exactly are roots themselves.
pub fn scan_roots<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64> {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let at = |j: usize| if j == n - 1 { hi } else { lo + j as f64 * step };
    let mut roots = Vec::new();
    let mut prev_x = at(0);
    let mut prev_f = f(prev_x);
    if prev_f == 0.0 {
        roots.push(prev_x);
    }
    for j in 1..n {
        let x = at(j);
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev_f != 0.0 && prev_f.signum() != fx.signum() {
            roots.push(bisect(&mut f, prev_x, x, tol));
        }
        prev_x = x;
        prev_f = fx;
    }
    roots
}
