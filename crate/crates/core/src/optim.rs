//! Derivative-free 1-D and coordinate-descent minimizers used by the
//! Bayes-act search. All routines are deterministic.

use crate::error::{Error, Result};

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on [lo, hi]; assumes a bracketed minimum.
/// Returns (argmin, min).
pub fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut a = hi - INV_GOLDEN * (hi - lo);
    let mut b = lo + INV_GOLDEN * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::OptimizerDiverged);
    }
    while hi - lo > x_tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_GOLDEN * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_GOLDEN * (hi - lo);
            fb = f(b);
        }
        if !fa.is_finite() || !fb.is_finite() {
            return Err(Error::OptimizerDiverged);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fmid = f(mid);
    // Return the best of the probed points.
    let mut best = (mid, fmid);
    if fa < best.1 {
        best = (a, fa);
    }
    if fb < best.1 {
        best = (b, fb);
    }
    Ok(best)
}

/// Coarse grid scan over [lo, hi] followed by golden-section refinement in
/// the bracket around the best grid point.
pub fn grid_then_golden<F>(
    f: F,
    lo: f64,
    hi: f64,
    grid_points: usize,
    x_tol: f64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(Error::OptimizerDiverged);
    }
    if hi == lo {
        let v = f(lo);
        return if v.is_finite() {
            Ok((lo, v))
        } else {
            Err(Error::OptimizerDiverged)
        };
    }
    let m = grid_points.max(3);
    let step = (hi - lo) / (m - 1) as f64;
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    for i in 0..m {
        let x = lo + step * i as f64;
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::OptimizerDiverged);
        }
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }
    let bl = lo + step * best_i.saturating_sub(1) as f64;
    let bh = (lo + step * (best_i + 1) as f64).min(hi);
    let (x, v) = golden_section(&f, bl, bh, x_tol)?;
    if v <= best_f {
        Ok((x, v))
    } else {
        Ok((lo + step * best_i as f64, best_f))
    }
}

/// Cyclic coordinate descent; each coordinate is solved by the 1-D routine
/// over its own range. Stops when a full sweep improves the objective by
/// less than `f_tol`, or after `max_sweeps`.
pub fn coordinate_descent<F>(
    f: F,
    start: &[f64],
    ranges: &[(f64, f64)],
    grid_points: usize,
    x_tol_rel: f64,
    max_sweeps: usize,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = start.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(Error::OptimizerDiverged);
    }
    let f_tol = 1e-12 * fx.abs().max(1.0);
    for _ in 0..max_sweeps {
        let before = fx;
        for j in 0..x.len() {
            let (lo, hi) = ranges[j];
            let x_tol = x_tol_rel * (hi - lo).max(f64::MIN_POSITIVE);
            let xj = &x;
            let obj = |v: f64| {
                let mut cand = xj.clone();
                cand[j] = v;
                f(&cand)
            };
            let (xbest, fbest) = grid_then_golden(obj, lo, hi, grid_points, x_tol)?;
            if fbest < fx {
                x[j] = xbest;
                fx = fbest;
            }
        }
        if before - fx < f_tol {
            break;
        }
    }
    Ok((x, fx))
}

/// Quantile of a sorted slice by nearest-rank interpolation.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = (level.clamp(0.0, 1.0) * (sorted.len() - 1) as f64).round() as usize;
    sorted[idx]
}

/// Search interval for a 1-D Bayes act: [min − spread, max + spread] with
/// spread = 3·(q90 − q10). A degenerate sample falls back to a unit spread
/// around its value.
pub fn search_range(sorted: &[f64]) -> (f64, f64) {
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let q10 = quantile_sorted(sorted, 0.10);
    let q90 = quantile_sorted(sorted, 0.90);
    let mut spread = 3.0 * (q90 - q10);
    if spread <= 0.0 {
        spread = min.abs().max(1.0);
    }
    (min - spread, max + spread)
}
