use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::build::{synth, SynthCircuit};
use super::margin_class;
use super::plan::SynthPlan;
use crate::circuit::{GateKind, InputBlock};
use crate::error::{Error, Result};
use crate::math::{exp, log, log1p};
use crate::rng::derive_seed;
use crate::truth::VerticalCounter;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelPrediction {
    pub level: usize,
    pub kind: GateKind,
    /// Predicted ones-fraction.
    pub ones: f64,
    /// Predicted density of the level's minority value.
    pub minority: f64,
    /// Standard deviation of the ones-fraction of one fixed circuit.
    pub sigma: f64,
    /// Target band for the minority density, when the level has one.
    pub target: Option<(f64, f64)>,
}

fn ln_or_neg_inf(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        log(x)
    }
}

/// Mean-field prediction of every level on inputs of weight `w`.
///
/// Level 1 fires with probability `(w/n)^A` exactly; an OR level over a
/// previous level with ones-fraction `q` outputs 0 with probability
/// `(1 - q)^t`, dually for AND. The spread combines each level's own
/// binomial noise with the propagated noise of the level below.
pub fn bias_recurrence(p: &SynthPlan, w: f64) -> Vec<LevelPrediction> {
    let nf = p.n as f64;
    let mut out: Vec<LevelPrediction> = Vec::with_capacity(p.d);
    // (ones, zeros) tracked separately so tiny minorities keep precision.
    let mut ones = 0.0;
    let mut zeros = 1.0;
    let mut var = 0.0;
    for spec in &p.levels {
        let t = spec.fan_in;
        let deriv;
        if spec.level == 1 {
            let l = t * ln_or_neg_inf(w / nf);
            ones = exp(l);
            zeros = if l == f64::NEG_INFINITY { 1.0 } else { -libm::expm1(l) };
            deriv = 0.0;
        } else {
            // The "stay" probability: all t draws hit the majority value.
            let (src, l) = match spec.kind {
                GateKind::And => (ones, t * log1p(-zeros)),
                _ => (zeros, t * log1p(-ones)),
            };
            let stay = exp(l);
            let flip = -libm::expm1(l);
            deriv = if t >= 1.0 && src > 0.0 { t * exp((t - 1.0) * log(src)) } else { 0.0 };
            if spec.kind == GateKind::And {
                ones = stay;
                zeros = flip;
            } else {
                zeros = stay;
                ones = flip;
            }
        }
        var = ones * zeros / spec.width + deriv * deriv * var;
        let minority = if spec.kind == GateKind::And { ones } else { zeros };
        out.push(LevelPrediction {
            level: spec.level,
            kind: spec.kind,
            ones,
            minority,
            sigma: libm::sqrt(var),
            target: target_band(p, spec.level),
        });
    }
    out
}

/// Minority-density targets: `center (1 -+ gamma_i)` on inductive levels,
/// `(2 eps^2 center, center / (2 eps^2))` on level `d - 1`.
fn target_band(p: &SynthPlan, i: usize) -> Option<(f64, f64)> {
    let c = p.level(i).center;
    if i + 2 <= p.d {
        if i == p.d - 1 {
            let e2 = 2.0 * p.epsilon * p.epsilon;
            Some((c * e2, c / e2))
        } else {
            let g = p.gamma[i];
            Some((c * (1.0 - g), c * (1.0 + g)))
        }
    } else {
        None
    }
}

pub(crate) fn output_probability(p: &SynthPlan, w: f64) -> f64 {
    bias_recurrence(p, w).last().map_or(0.0, |l| l.ones)
}

/// How a witness's level ones-fraction is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum BandRule {
    /// Inputs in `N_eps` must land below the lower target and inputs in
    /// `Y_eps` above the upper one; other inputs are unconstrained.
    Textbook,
    /// The ones-fraction must lie within `sigmas` standard deviations of
    /// the mean-field prediction for the witness's weight. Zero tolerance
    /// admits nothing.
    MeanField { sigmas: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub ones_fraction: f64,
    pub predicted: f64,
    pub sigma: f64,
    /// Admissible ones-fraction interval.
    pub band_lo: f64,
    pub band_hi: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub weight: u64,
    /// -1 for `N_eps`, +1 for `Y_eps`, 0 otherwise.
    pub class: i8,
    pub levels: Vec<LevelCheck>,
}

impl LevelReport {
    /// Whether every level below the output is inside its band.
    pub fn witness_ok(&self) -> bool {
        self.levels.iter().rev().skip(1).all(|l| l.pass)
    }
}

/// Ones-fraction of every level for each assignment.
pub fn level_fractions(sc: &SynthCircuit, xs: &[Vec<bool>]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(xs.len());
    let mut values = vec![0u64; sc.circuit.num_gates()];
    for chunk in xs.chunks(InputBlock::WIDTH) {
        let block = InputBlock::pack(chunk)?;
        sc.circuit.eval_words_into(block.words(), block.lane_mask(), &mut values)?;
        let mut per_level = Vec::with_capacity(sc.levels.len());
        for r in &sc.levels {
            let mut counter = VerticalCounter::new(1);
            for id in r.clone() {
                counter.add(core::slice::from_ref(&values[id as usize]));
            }
            let width = (r.end - r.start) as f64;
            per_level.push((0..chunk.len()).map(|l| counter.count(l) as f64 / width).collect::<Vec<_>>());
        }
        for l in 0..chunk.len() {
            out.push(per_level.iter().map(|v| v[l]).collect());
        }
    }
    Ok(out)
}

fn band(p: &SynthPlan, rule: BandRule, class: i8, pred: &LevelPrediction) -> (f64, f64) {
    match rule {
        BandRule::MeanField { sigmas } => {
            if sigmas <= 0.0 {
                (f64::INFINITY, f64::NEG_INFINITY)
            } else {
                (pred.ones - sigmas * pred.sigma, pred.ones + sigmas * pred.sigma)
            }
        }
        BandRule::Textbook => {
            let Some((lo, hi)) = target_band(p, pred.level) else {
                return (0.0, 1.0);
            };
            // Light inputs keep the minority below `lo`, heavy ones push
            // it above `hi`; OR levels count zeros, so heavy means fewer.
            match (pred.kind, class) {
                (_, 0) => (0.0, 1.0),
                (GateKind::And, -1) => (0.0, lo),
                (GateKind::And, _) => (hi, 1.0),
                (_, -1) => (0.0, 1.0 - hi),
                (_, _) => (1.0 - lo, 1.0),
            }
        }
    }
}

/// Band reports for a batch of assignments.
pub fn level_reports(sc: &SynthCircuit, p: &SynthPlan, xs: &[Vec<bool>], rule: BandRule) -> Result<Vec<LevelReport>> {
    let fracs = level_fractions(sc, xs)?;
    Ok(xs
        .iter()
        .zip(fracs)
        .map(|(x, f)| {
            let weight = x.iter().filter(|&&b| b).count() as u64;
            let class = margin_class(p.n, p.epsilon, weight);
            let preds = bias_recurrence(p, weight as f64);
            let levels = preds
                .iter()
                .zip(f)
                .map(|(pred, frac)| {
                    let (band_lo, band_hi) = band(p, rule, class, pred);
                    LevelCheck {
                        level: pred.level,
                        ones_fraction: frac,
                        predicted: pred.ones,
                        sigma: pred.sigma,
                        band_lo,
                        band_hi,
                        pass: frac >= band_lo && frac <= band_hi,
                    }
                })
                .collect();
            LevelReport { weight, class, levels }
        })
        .collect())
}

/// Band report of one assignment.
pub fn empirical_level_check(sc: &SynthCircuit, p: &SynthPlan, x: &[bool], rule: BandRule) -> Result<LevelReport> {
    if x.len() as u64 != p.n {
        return Err(Error::ArityMismatch { expected: p.n as usize, got: x.len() });
    }
    Ok(level_reports(sc, p, &[x.to_vec()], rule)?.remove(0))
}

#[derive(Debug, Clone)]
pub struct Resampled {
    pub circuit: SynthCircuit,
    /// 1-based try that succeeded.
    pub tries: usize,
    /// Failed (witness, level) pairs per level over the rejected tries.
    pub histogram: Vec<usize>,
}

/// Synthesizes with seeds `derive_seed(root_seed, i)` until every witness
/// is inside its band on every level below the output.
pub fn resample_until_valid(
    p: &SynthPlan,
    witnesses: &[Vec<bool>],
    max_tries: usize,
    rule: BandRule,
    root_seed: u64,
) -> Result<Resampled> {
    if witnesses.is_empty() {
        return Err(Error::OutOfRange { name: "witnesses", value: 0.0, expected: "a nonempty witness set" });
    }
    let mut histogram = vec![0usize; p.d];
    for attempt in 0..max_tries {
        let sc = synth(p, derive_seed(root_seed, attempt as u64))?;
        let reports = level_reports(&sc, p, witnesses, rule)?;
        let mut ok = true;
        for r in &reports {
            for l in &r.levels[..p.d - 1] {
                if !l.pass {
                    histogram[l.level - 1] += 1;
                    ok = false;
                }
            }
        }
        if ok {
            return Ok(Resampled { circuit: sc, tries: attempt + 1, histogram });
        }
    }
    Err(Error::Exhausted { tries: max_tries, histogram })
}
