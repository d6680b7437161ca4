use crate::math::{log2, pow};

/// `3 (c2 (log2(s)/d + 1))^d`, and 3 when `d = 0`.
pub fn theoretical_degree(s: f64, d: u32, c2: f64) -> f64 {
    if d == 0 {
        return 3.0;
    }
    let d_f = d as f64;
    3.0 * pow(c2 * (log2(s) / d_f + 1.0), d_f)
}

/// Gap `((a+b)/(d+1) + 1)^(d+1) - (b+1)(a/d + 1)^d` and whether it is
/// nonnegative up to 1e-9.
///
/// With `Y = a/d + 1` and `u = (b - a/d)/(d+1)` the gap equals
/// `sum_{j>=2} C(d+1, j) Y^(d+1-j) u^j`, which is evaluated directly so
/// that the root at `b = a/d` comes out exactly 0.
pub fn check_key_inequality(a: f64, b: f64, d: u32) -> (bool, f64) {
    assert!(d >= 1);
    let df = d as f64;
    let y = a / df + 1.0;
    let u = (b - a / df) / (df + 1.0);
    let n = d + 1;
    let mut gap = 0.0;
    let mut binom = 1.0;
    for j in 1..=n {
        binom = binom * (n - j + 1) as f64 / j as f64;
        if j >= 2 {
            gap += binom * pow(y, (n - j) as f64) * pow(u, j as f64);
        }
    }
    (gap >= -1e-9, gap)
}

/// Least integer size `s >= 1` whose theoretical degree at depth `d`
/// (so exponent `d - 1`) reaches `degree_lb`; infinity if none below 2^63.
pub fn formula_size_lower_bound(d: u32, degree_lb: u64, c2: f64) -> f64 {
    let e = d.saturating_sub(1);
    let ok = |s: u64| theoretical_degree(s as f64, e, c2) >= degree_lb as f64;
    if ok(1) {
        return 1.0;
    }
    let hi_limit = 1u64 << 63;
    if !ok(hi_limit) {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (1u64, hi_limit);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi as f64
}
