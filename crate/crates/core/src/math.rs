// Float helpers; `f64::exp` and friends are not available without std.

pub(crate) use libm::{ceil, exp, floor, log, log1p, log2, pow, sqrt};

/// `(1 - q)^t` for `q` in [0, 1] and a possibly astronomically large `t`.
pub(crate) fn pow_one_minus(q: f64, t: f64) -> f64 {
    if q <= 0.0 {
        1.0
    } else if q >= 1.0 {
        if t > 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        exp(t * log1p(-q))
    }
}

/// `ln C(n, k)` through the log-gamma function.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let n = n as f64;
    let k = k as f64;
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// Smallest odd integer that is `>= x`.
pub(crate) fn ceil_odd(x: f64) -> u64 {
    let t = ceil(x).max(1.0) as u64;
    if t.is_multiple_of(2) {
        t + 1
    } else {
        t
    }
}
