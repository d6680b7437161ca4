use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math::{ceil, exp, ln_binomial, log, log1p, sqrt};

/// `gamma_0 = gamma0`, `gamma_i = A gamma_{i-1} exp(-2 A gamma_{i-1})`
/// for `i = 1..=len`.
pub fn gamma_sequence(a: f64, gamma0: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    let mut g = gamma0;
    out.push(g);
    for _ in 0..len {
        g = a * g * exp(-2.0 * a * g);
        out.push(g);
    }
    out
}

/// `(A^i g0 exp(-3 A^i g0), A^i g0)`, the claimed envelope of `gamma_i`.
pub fn gamma_bounds(a: f64, gamma0: f64, i: u32) -> (f64, f64) {
    let base = libm::pow(a, i as f64) * gamma0;
    (base * exp(-3.0 * base), base)
}

/// The two elementary inequalities behind `eps0 = 1/2`:
/// `exp(-b) <= 1 - b exp(-b)` and `1 - b >= exp(-b - b^2)`.
pub fn eps0_inequalities(beta: f64) -> (bool, bool) {
    let first = exp(-beta) <= 1.0 - beta * exp(-beta);
    let second = 1.0 - beta >= exp(-beta - beta * beta);
    (first, second)
}

/// Probability mass of `|x|_1` strictly inside `(n/2 - eps sqrt n, n/2 + eps sqrt n)`
/// under uniform `x`, i.e. of the inputs in neither `Y_eps` nor `N_eps`.
pub fn tail_mass(n: u64, eps: f64) -> f64 {
    let nf = n as f64;
    let half = nf / 2.0;
    let r = eps * sqrt(nf);
    let lo = ceil(half - r) as i64;
    let mut sum = 0.0;
    let ln2n = nf * core::f64::consts::LN_2;
    let mut m = lo.max(0);
    while m <= n as i64 {
        let mf = m as f64;
        if mf >= half + r {
            break;
        }
        if mf > half - r {
            sum += exp(ln_binomial(n, m as u64) - ln2n);
        }
        m += 1;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaPolarity {
    /// OR over the sample is 0; `k` counts ones.
    I,
    /// AND over the sample is 1; `k` counts zeros.
    J,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub polarity: LemmaPolarity,
    pub t: f64,
    /// `(1 - k/M)^t`.
    pub exact: f64,
    /// Which hypotheses fail; bounds are only judged when this is empty.
    pub hypothesis_failures: Vec<String>,
    /// `k <= M e^-A (1 - gamma)`.
    pub in_low_band: bool,
    /// `k >= M e^-A (1 + gamma)`.
    pub in_high_band: bool,
    /// `exp(-s) exp(s gamma / 2)` or `exp(-s) exp(-s gamma)`.
    pub coarse_bound: Option<f64>,
    /// `exp(-s) (1 +- s gamma exp(-s gamma))` when `s gamma <= 1/2`.
    pub refined_bound: Option<f64>,
    pub violations: Vec<String>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

const EPS0: f64 = 0.5;

/// Checks the sampling lemma for an `M`-bit level with `k` minority bits,
/// `t = ceil(e^A s)` draws with replacement.
///
/// Hypothesis failures are listed rather than treated as errors; the
/// bounds are compared in log space with a relative slack of 1e-12.
pub fn check_technical_lemma(
    a: f64,
    s: f64,
    m: u64,
    n: u64,
    gamma: f64,
    k: u64,
    polarity: LemmaPolarity,
) -> LemmaReport {
    let nf = n as f64;
    let mut hyp = Vec::new();
    if a < 3.0 * log(nf) {
        hyp.push("e^A >= n^3".into());
    }
    if nf < 1.0 / EPS0 {
        hyp.push("n >= 1/eps0".into());
    }
    if !(s > 0.0 && s <= nf) {
        hyp.push("0 < s <= n".into());
    }
    if !(gamma > 1.0 / nf && gamma < 0.1) {
        hyp.push("1/n < gamma < 1/10".into());
    }
    if k > m || m == 0 {
        hyp.push("k <= M".into());
    }

    let t = ceil(exp(a) * s);
    let ln_exact = if m == 0 { 0.0 } else { t * log1p(-(k as f64) / m as f64) };
    let center = m as f64 * exp(-a);
    let in_low_band = (k as f64) <= center * (1.0 - gamma);
    let in_high_band = (k as f64) >= center * (1.0 + gamma);

    let sg = s * gamma;
    let mut report = LemmaReport {
        polarity,
        t,
        exact: exp(ln_exact),
        hypothesis_failures: hyp,
        in_low_band,
        in_high_band,
        coarse_bound: None,
        refined_bound: None,
        violations: Vec::new(),
    };
    let tol = 1e-12 * (s + 1.0);
    if in_low_band {
        let coarse = -s + sg / 2.0;
        report.coarse_bound = Some(exp(coarse));
        let refined = (sg <= EPS0).then(|| -s + log1p(sg * exp(-sg)));
        report.refined_bound = refined.map(exp);
        if report.hypothesis_failures.is_empty() {
            if ln_exact < coarse - tol {
                report.violations.push("lower bound exp(-s) exp(s gamma/2)".into());
            }
            if refined.is_some_and(|r| ln_exact < r - tol) {
                report.violations.push("lower bound exp(-s) (1 + s gamma exp(-s gamma))".into());
            }
        }
    } else if in_high_band {
        let coarse = -s - sg;
        report.coarse_bound = Some(exp(coarse));
        let refined = (sg <= EPS0).then(|| -s + log1p(-sg * exp(-sg)));
        report.refined_bound = refined.map(exp);
        if report.hypothesis_failures.is_empty() {
            if ln_exact > coarse + tol {
                report.violations.push("upper bound exp(-s) exp(-s gamma)".into());
            }
            if refined.is_some_and(|r| ln_exact > r + tol) {
                report.violations.push("upper bound exp(-s) (1 - s gamma exp(-s gamma))".into());
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    #[test]
    fn gamma_examples() {
        let g = gamma_sequence(3.0, 0.05, 1);
        assert!((g[1] - 0.15 * libm::exp(-0.3)).abs() < 1e-15);
        assert!((g[1] - 0.111_122).abs() < 1e-6);
        let g = gamma_sequence(3.0, 0.01, 2);
        let (lo, hi) = gamma_bounds(3.0, 0.01, 2);
        assert!((lo - 0.09 * libm::exp(-0.27)).abs() < 1e-15);
        assert!(lo <= g[2] && g[2] <= hi && hi == 0.09);
    }

    #[test]
    fn gamma_envelope_needs_a_at_least_three() {
        // The lower envelope sums a geometric series with ratio A and
        // needs 2A/(A-1) <= 3; with A = 2 it fails from i = 3 on.
        let g = gamma_sequence(2.0, 1e-4, 3);
        let (lo, _) = gamma_bounds(2.0, 1e-4, 3);
        assert!(g[3] < lo);
        for a in 3..=32 {
            for j in 0..=30 {
                let g0 = libm::pow(10.0, -4.0 + 3.0 * j as f64 / 30.0);
                let g = gamma_sequence(a as f64, g0, 8);
                for (i, &gi) in g.iter().enumerate().skip(1) {
                    let (lo, hi) = gamma_bounds(a as f64, g0, i as u32);
                    assert!(lo <= gi * (1.0 + 1e-12) && gi <= hi * (1.0 + 1e-12), "A={a} g0={g0} i={i}");
                }
            }
        }
    }

    #[test]
    fn eps0_grid() {
        for i in 1..=10_000 {
            let b = 0.5 * i as f64 / 10_000.0;
            assert_eq!(eps0_inequalities(b), (true, true), "beta={b}");
        }
    }

    fn exact_tail(n: u64, eps: f64) -> f64 {
        let nf = n as f64;
        let (lo, hi) = (nf / 2.0 - eps * nf.sqrt(), nf / 2.0 + eps * nf.sqrt());
        let mut c = BigUint::from(1u32);
        let mut num = BigUint::from(0u32);
        for m in 0..=n {
            if (m as f64) > lo && (m as f64) < hi {
                num += &c;
            }
            c = c * BigUint::from(n - m) / BigUint::from(m + 1);
        }
        // num / 2^n, keeping 60 significant bits.
        let bits = num.bits() as i64;
        let shift = (bits - 60).max(0);
        let top: BigUint = &num >> shift as usize;
        let top = top.to_u64_digits().first().copied().unwrap_or(0) as f64;
        top * libm::exp2((shift - n as i64) as f64)
    }

    #[test]
    fn tail_matches_big_integer_sum() {
        for n in (1..=501).step_by(10) {
            for &eps in &[0.01, 0.05, 0.1, 0.25, 0.5, 1.0] {
                let want = exact_tail(n, eps);
                let got = tail_mass(n, eps);
                if want == 0.0 {
                    assert_eq!(got, 0.0);
                } else {
                    assert!(((got - want) / want).abs() < 1e-12, "n={n} eps={eps}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn tail_examples() {
        assert_eq!(tail_mass(101, 1e-9), 0.0);
        assert!(tail_mass(101, 0.25) <= 0.5);
        // Two central weights, 50 and 51, already exceed 2 eps = 0.1.
        assert!(tail_mass(101, 0.05) > 0.1);
    }

    #[test]
    fn lemma_arithmetic() {
        // A = 0 makes t = ceil(s); M = 1000, k = 10, t = 50.
        let r = check_technical_lemma(0.0, 50.0, 1000, 20, 0.05, 10, LemmaPolarity::I);
        assert_eq!(r.t, 50.0);
        assert!((r.exact - 0.605_006_067_14).abs() < 1e-10);
        assert!(!r.hypothesis_failures.is_empty());
        let r = check_technical_lemma(10.0, 2.0, 1 << 20, 20, 0.06, 0, LemmaPolarity::J);
        assert_eq!(r.exact, 1.0);
        assert!(r.in_low_band && r.holds());
    }

    #[test]
    fn lemma_fails_for_tiny_s() {
        // The lower bound needs s of order 1: with s below 2/n^2 the
        // rounding in t = ceil(e^A s) costs more than s gamma / 2 gains.
        let (n, a) = (11u64, 3.0 * libm::log(11.0));
        let m = 1u64 << 40;
        let gamma = 0.095;
        let k = libm::floor(m as f64 * libm::exp(-a) * (1.0 - gamma)) as u64;
        let r = check_technical_lemma(a, 1e-4 + 0.5 / libm::exp(a), m, n, gamma, k, LemmaPolarity::I);
        assert!(r.hypothesis_failures.is_empty());
        assert!(!r.holds());
    }

    proptest! {
        #[test]
        fn tail_nondecreasing_in_eps(n in 1u64..400, e1 in 0.0f64..2.0, e2 in 0.0f64..2.0) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            prop_assert!(tail_mass(n, lo) <= tail_mass(n, hi) * (1.0 + 1e-12));
        }

        #[test]
        fn lemma_holds_for_s_at_least_one(
            n in 11u64..500,
            extra in 0.0f64..10.0,
            s_frac in 0.0f64..1.0,
            g_frac in 0.01f64..0.99,
            width in 0.0f64..8.0,
            band_pos in 0.0f64..1.0,
            high in any::<bool>(),
        ) {
            let nf = n as f64;
            let a = 3.0 * nf.ln() + extra;
            let s = 1.0 + s_frac * (nf - 1.0);
            let gamma = 1.0 / nf + g_frac * (0.1 - 1.0 / nf);
            let m = (a.exp() * 10f64.powf(width)).ceil().min(9e15) as u64;
            let center = m as f64 * (-a).exp();
            let k = if high {
                let lo = (center * (1.0 + gamma)).ceil();
                (lo + band_pos * (m as f64 - lo)).floor() as u64
            } else {
                (band_pos * center * (1.0 - gamma)).floor() as u64
            };
            let r = check_technical_lemma(a, s, m, n, gamma, k, LemmaPolarity::I);
            prop_assert!(r.hypothesis_failures.is_empty());
            prop_assert!(r.holds(), "{:?}", r);
        }
    }
}
