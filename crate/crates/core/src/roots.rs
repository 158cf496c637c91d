//! Bracketed scalar root finding: bisection to narrow the bracket, then an
//! Illinois-safeguarded secant polish.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Finds a root of an increasing function `h` on `(lo, hi]`.
///
/// Requires `h(lo) < 0 <= h(hi)`; `h` may return `-inf` (or NaN) for points
/// it cannot evaluate, which are treated as lying below the root. Iterates
/// until the bracket is narrower than `abs_tol` or down to a few ulps.
pub fn solve_increasing<F>(h: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let eval = |x: f64| {
        let v = h(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut h_lo = eval(lo);
    let mut h_hi = eval(hi);
    if !(h_lo < 0.0) || !(h_hi >= 0.0) {
        return Err(Error::BracketNotFound(format!(
            "h({lo}) = {h_lo}, h({hi}) = {h_hi}"
        )));
    }
    if h_hi == 0.0 {
        return Ok(hi);
    }

    let narrow = |lo: f64, hi: f64| {
        let scale = lo.abs().max(hi.abs());
        hi - lo <= abs_tol.max(4.0 * f64::EPSILON * scale) || hi - lo <= f64::MIN_POSITIVE
    };

    // Bisection until the bracket is coarse-converged and both ends finite.
    let mut iter = 0;
    while iter < MAX_ITER
        && !narrow(lo, hi)
        && (!h_lo.is_finite() || hi - lo > 1e-3 * (1.0 + hi.abs()))
    {
        let mid = 0.5 * (lo + hi);
        let hm = eval(mid);
        if hm < 0.0 {
            lo = mid;
            h_lo = hm;
        } else {
            hi = mid;
            h_hi = hm;
            if hm == 0.0 {
                return Ok(mid);
            }
        }
        iter += 1;
    }

    // Illinois false position.
    let mut side = 0i8;
    while iter < MAX_ITER && !narrow(lo, hi) {
        let mut x = if h_lo.is_finite() {
            (lo * h_hi - hi * h_lo) / (h_hi - h_lo)
        } else {
            0.5 * (lo + hi)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let hx = eval(x);
        if hx == 0.0 {
            return Ok(x);
        }
        if hx < 0.0 {
            lo = x;
            h_lo = hx;
            if side == -1 {
                h_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            h_hi = hx;
            if side == 1 {
                h_lo *= 0.5;
            }
            side = 1;
        }
        iter += 1;
    }
    if !narrow(lo, hi) {
        return Err(Error::RootNotConverged(format!(
            "bracket [{lo}, {hi}] after {iter} iterations"
        )));
    }
    Ok(0.5 * (lo + hi))
}

/// Plain bisection of a boolean predicate that is `true` at `lo` and `false`
/// at `hi`; returns the transition point to within `abs_tol`.
pub fn bisect_predicate<P>(pred: P, mut lo: f64, mut hi: f64, abs_tol: f64) -> f64
where
    P: Fn(f64) -> bool,
{
    while hi - lo > abs_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
