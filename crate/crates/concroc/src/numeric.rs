//! Crate-internal numeric helpers: monotone CDF inversion and fixed-panel
//! Simpson quadrature.

/// Solve cdf(x) = p for x in [lo, hi] by bisection with Newton
/// acceleration. Requires cdf monotone with cdf(lo) <= p <= cdf(hi);
/// stops when |cdf(x) - p| <= tol or the bracket is exhausted.
pub(crate) fn invert_cdf(
    cdf: impl Fn(f64) -> f64,
    pdf: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    p: f64,
    tol: f64,
) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let c = cdf(x);
        if (c - p).abs() <= tol {
            return x;
        }
        if c < p {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let mut next = if d > 0.0 { x - (c - p) / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x {
            return x;
        }
        x = next;
    }
    x
}

/// Composite Simpson rule with the given number of panels (two
/// subintervals each).
pub(crate) fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let n = panels * 2;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// Type-7 quantile (linear interpolation of order statistics) of an
/// already sorted slice.
pub(crate) fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = (h.floor() as usize).min(n - 2);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}
