use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitDag;
use crate::error::{Error, Result};
use crate::math::{exp, ln_binomial};
use crate::rng::{task_rng, Rng};
use crate::stats::{Estimate, Z99};
use crate::truth::{TruthTable, VerticalCounter, VAR_PATTERNS};

/// Largest arity for exhaustive agreement.
pub const MAX_EXACT_VARS: u32 = 20;

/// A single-output boolean function evaluated 64 assignments at a time.
pub trait BoolFn {
    fn num_vars(&self) -> u32;
    /// Lane `j` of the result is the value on the assignment whose bit `i`
    /// is lane `j` of `inputs[i]`; lanes outside `lane_mask` are zero.
    fn eval_lanes(&self, inputs: &[u64], lane_mask: u64) -> Result<u64>;
}

impl BoolFn for TruthTable {
    fn num_vars(&self) -> u32 {
        TruthTable::num_vars(self)
    }

    fn eval_lanes(&self, inputs: &[u64], lane_mask: u64) -> Result<u64> {
        if inputs.len() != self.num_vars() as usize {
            return Err(Error::ArityMismatch { expected: self.num_vars() as usize, got: inputs.len() });
        }
        let mut out = 0u64;
        let mut lanes = lane_mask;
        while lanes != 0 {
            let l = lanes.trailing_zeros();
            lanes &= lanes - 1;
            let idx = inputs.iter().enumerate().fold(0usize, |acc, (i, w)| acc | (((w >> l) & 1) as usize) << i);
            if self.get(idx) {
                out |= 1 << l;
            }
        }
        Ok(out)
    }
}

impl BoolFn for CircuitDag {
    fn num_vars(&self) -> u32 {
        self.num_inputs()
    }

    fn eval_lanes(&self, inputs: &[u64], lane_mask: u64) -> Result<u64> {
        if self.outputs().len() != 1 {
            return Err(Error::MultiOutput(self.outputs().len()));
        }
        let mut v = vec![0u64; self.num_gates()];
        self.eval_words_into(inputs, lane_mask, &mut v)?;
        Ok(v[self.outputs()[0] as usize])
    }
}

/// `MAJ_n` without a table: 1 iff more than half of the inputs are 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Majority(pub u32);

impl BoolFn for Majority {
    fn num_vars(&self) -> u32 {
        self.0
    }

    fn eval_lanes(&self, inputs: &[u64], lane_mask: u64) -> Result<u64> {
        if inputs.len() != self.0 as usize {
            return Err(Error::ArityMismatch { expected: self.0 as usize, got: inputs.len() });
        }
        let mut c = VerticalCounter::new(1);
        for w in inputs {
            c.add(core::slice::from_ref(w));
        }
        let mut out = [0u64];
        c.at_least(self.0 as u64 / 2 + 1, &mut out);
        Ok(out[0] & lane_mask)
    }
}

/// Distribution of Monte Carlo inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum InputDist {
    Uniform,
    /// Uniform over the assignments whose weight passes a filter: the
    /// weight is drawn with probability proportional to `C(n, w)`, then a
    /// uniform assignment of that weight.
    Weights {
        n: u32,
        cdf: Vec<(u64, f64)>,
    },
}

impl InputDist {
    pub fn weights(n: u32, accept: impl Fn(u64) -> bool) -> Result<Self> {
        let mut cdf = Vec::new();
        let mut total = 0.0;
        let ln2n = n as f64 * core::f64::consts::LN_2;
        for w in 0..=n as u64 {
            if accept(w) {
                total += exp(ln_binomial(n as u64, w) - ln2n);
                cdf.push((w, total));
            }
        }
        if cdf.is_empty() {
            return Err(Error::OutOfRange { name: "weights", value: 0.0, expected: "a nonempty weight filter" });
        }
        cdf.iter_mut().for_each(|e| e.1 /= total);
        Ok(InputDist::Weights { n, cdf })
    }

    /// Per-variable words holding `lanes` fresh assignments.
    fn block(&self, rng: &mut Rng, n: u32, lanes: usize) -> Vec<u64> {
        match self {
            InputDist::Uniform => (0..n).map(|_| rng.gen::<u64>() & lane_bits(lanes)).collect(),
            InputDist::Weights { cdf, .. } => {
                let mut words = vec![0u64; n as usize];
                let mut idx: Vec<u32> = (0..n).collect();
                for lane in 0..lanes {
                    let u: f64 = rng.gen();
                    let w = cdf.iter().find(|e| u < e.1).unwrap_or(cdf.last().unwrap()).0 as usize;
                    // Partial Fisher-Yates: the first w slots become the ones.
                    for k in 0..w {
                        let j = rng.gen_range(k..n as usize);
                        idx.swap(k, j);
                        words[idx[k] as usize] |= 1 << lane;
                    }
                }
                words
            }
        }
    }
}

fn lane_bits(lanes: usize) -> u64 {
    if lanes >= 64 {
        !0
    } else {
        (1u64 << lanes) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AgreementMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

fn check_pair(f: &impl BoolFn, g: &impl BoolFn) -> Result<u32> {
    if f.num_vars() != g.num_vars() {
        return Err(Error::DimensionMismatch { left: f.num_vars() as usize, right: g.num_vars() as usize });
    }
    Ok(f.num_vars())
}

/// Number of exhaustive blocks for `n` variables.
pub fn exact_block_count(n: u32) -> u64 {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

/// Agreements over the exhaustive blocks in `blocks`; block `b` covers
/// assignments `64 b .. 64 b + 64` in index order.
pub fn exact_agreements(f: &impl BoolFn, g: &impl BoolFn, blocks: Range<u64>) -> Result<u64> {
    let n = check_pair(f, g)?;
    if n > MAX_EXACT_VARS {
        return Err(Error::ResourceCap {
            what: alloc::format!("exhaustive agreement on {n} variables"),
            requested: n as f64,
            limit: MAX_EXACT_VARS as f64,
        });
    }
    let mask = if n >= 6 { !0 } else { (1u64 << (1u32 << n)) - 1 };
    let mut inputs = vec![0u64; n as usize];
    let mut agree = 0;
    for b in blocks {
        for (i, w) in inputs.iter_mut().enumerate() {
            *w = if i < 6 {
                VAR_PATTERNS[i]
            } else if b >> (i - 6) & 1 == 1 {
                !0
            } else {
                0
            };
        }
        let diff = f.eval_lanes(&inputs, mask)? ^ g.eval_lanes(&inputs, mask)?;
        agree += (mask & !diff).count_ones() as u64;
    }
    Ok(agree)
}

/// Number of Monte Carlo blocks for `trials` samples.
pub fn mc_block_count(trials: u64) -> u64 {
    trials.div_ceil(64)
}

/// Agreements over Monte Carlo blocks; block `b` draws its inputs from
/// `task_rng(seed, b)` so any split of the blocks gives the same total.
pub fn mc_agreements(
    f: &impl BoolFn,
    g: &impl BoolFn,
    dist: &InputDist,
    seed: u64,
    trials: u64,
    blocks: Range<u64>,
) -> Result<u64> {
    let n = check_pair(f, g)?;
    if let InputDist::Weights { n: wn, .. } = dist {
        if *wn != n {
            return Err(Error::DimensionMismatch { left: n as usize, right: *wn as usize });
        }
    }
    let mut agree = 0;
    for b in blocks {
        let lanes = (trials - 64 * b).min(64) as usize;
        let mut rng = task_rng(seed, b);
        let inputs = dist.block(&mut rng, n, lanes);
        let mask = lane_bits(lanes);
        let diff = f.eval_lanes(&inputs, mask)? ^ g.eval_lanes(&inputs, mask)?;
        agree += (mask & !diff).count_ones() as u64;
    }
    Ok(agree)
}

/// Fraction of inputs where `f` and `g` agree: exact over all `2^n`
/// inputs, or a Monte Carlo estimate with a 99% Wilson interval.
pub fn agreement(f: &impl BoolFn, g: &impl BoolFn, mode: AgreementMode) -> Result<Estimate> {
    agreement_on(f, g, mode, &InputDist::Uniform)
}

/// As [`agreement`]; Monte Carlo inputs follow `dist`.
pub fn agreement_on(f: &impl BoolFn, g: &impl BoolFn, mode: AgreementMode, dist: &InputDist) -> Result<Estimate> {
    match mode {
        AgreementMode::Exact => {
            let n = check_pair(f, g)?;
            let a = exact_agreements(f, g, 0..exact_block_count(n))?;
            Ok(Estimate::exact(a, 1u64 << n))
        }
        AgreementMode::MonteCarlo { trials, seed } => {
            let a = mc_agreements(f, g, dist, seed, trials, 0..mc_block_count(trials))?;
            Ok(Estimate::wilson(a, trials, Z99))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmCertificate {
    pub n: u32,
    pub epsilon: f64,
    pub mode: AgreementMode,
    /// Disagreement with majority.
    pub disagreement: Estimate,
    pub pass: bool,
}

/// Flips an agreement estimate into a disagreement estimate.
pub fn disagreement_of(a: Estimate) -> Estimate {
    Estimate {
        successes: a.trials - a.successes,
        trials: a.trials,
        estimate: 1.0 - a.estimate,
        ci_lo: 1.0 - a.ci_hi,
        ci_hi: 1.0 - a.ci_lo,
    }
}

/// Certificate from a precomputed agreement with majority.
pub fn am_certificate(n: u32, eps: f64, mode: AgreementMode, agree: Estimate) -> AmCertificate {
    let disagreement = disagreement_of(agree);
    let pass = match mode {
        AgreementMode::Exact => disagreement.estimate <= eps,
        AgreementMode::MonteCarlo { .. } => disagreement.ci_hi <= eps,
    };
    AmCertificate { n, epsilon: eps, mode, disagreement, pass }
}

/// Whether `c` disagrees with majority on at most an `eps` fraction of
/// inputs: exactly, or by the upper end of the 99% interval.
pub fn certify_approx_majority(c: &impl BoolFn, eps: f64, mode: AgreementMode) -> Result<AmCertificate> {
    let n = c.num_vars();
    let a = agreement(c, &Majority(n), mode)?;
    Ok(am_certificate(n, eps, mode, a))
}
