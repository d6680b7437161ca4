//! Binomial confidence intervals.

use serde::{Deserialize, Serialize};

use crate::math::sqrt;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Estimate {
    /// Point estimate with a Wilson score interval at quantile `z`.
    pub fn wilson(successes: u64, trials: u64, z: f64) -> Self {
        assert!(successes <= trials);
        if trials == 0 {
            return Estimate { successes, trials, estimate: 0.0, ci_lo: 0.0, ci_hi: 1.0 };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
        Estimate {
            successes,
            trials,
            estimate: p,
            ci_lo: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
            ci_hi: if successes == trials { 1.0 } else { (center + half).min(1.0) },
        }
    }

    /// Exact proportion, with a degenerate interval.
    pub fn exact(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Estimate { successes, trials, estimate: p, ci_lo: p, ci_hi: p }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_lo <= p && p <= self.ci_hi
    }
}

/// Standard deviation of a Bernoulli(`p`) mean over `trials` draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    sqrt(p * (1.0 - p) / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // Closed form evaluated independently at z = 1.96.
        let e = Estimate::wilson(50, 100, 1.96);
        assert!((e.ci_lo - 0.403_829_8).abs() < 1e-6);
        assert!((e.ci_hi - 0.596_170_2).abs() < 1e-6);
        let zero = Estimate::wilson(0, 10, Z99);
        assert_eq!(zero.ci_lo, 0.0);
        assert!(zero.ci_hi > 0.3 && zero.ci_hi < 0.5);
    }

    #[test]
    fn interval_contains_estimate() {
        for s in 0..=40 {
            let e = Estimate::wilson(s, 40, Z99);
            assert!(e.ci_lo <= e.estimate && e.estimate <= e.ci_hi);
        }
    }
}
