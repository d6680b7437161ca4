use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{lemma::gamma_sequence, level_kind};
use crate::circuit::GateKind;
use crate::error::{Error, Result};
use crate::math::{ceil, exp, floor, log, log1p, pow, pow_one_minus, sqrt};

/// Default cap on level widths, also the threshold for textbook plans.
pub const DEFAULT_MAX_WIDTH: f64 = 1e7;
/// Cap on the number of with-replacement draws of a single gate.
pub const MAX_FAN_IN: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMode {
    Textbook,
    DeskScale,
}

/// Parameter overrides; any present field switches the plan to desk scale.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(rename = "A", default)]
    pub a: Option<u64>,
    #[serde(rename = "logM", default)]
    pub log_m: Option<f64>,
    #[serde(rename = "logMtop", default)]
    pub log_m_top: Option<f64>,
    #[serde(default)]
    pub width: Option<u64>,
    #[serde(rename = "topwidth", default)]
    pub top_width: Option<u64>,
    #[serde(rename = "stop", default)]
    pub s_top: Option<f64>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        *self == Overrides::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    /// 1-based level index; level `d` is the output gate.
    pub level: usize,
    pub kind: GateKind,
    pub width: f64,
    pub log_width: f64,
    /// With-replacement draws per gate.
    pub fan_in: f64,
    pub log_fan_in: f64,
    /// Target density of the level's minority value (ones after AND,
    /// zeros after OR) that the bands are centered on.
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideConditions {
    /// `A >= 10 ln n`.
    pub a_large: bool,
    /// `e^A >= n^3`.
    pub e_a_cubic: bool,
    /// `A * gamma_i <= eps0` for every inductive step.
    pub chain_s_gamma: bool,
    /// `s_top * gamma_{d-2} >= 5 ln(1/eps)`.
    pub top_s_gamma: bool,
    /// `eps <= eps0`.
    pub eps_small: bool,
}

impl SideConditions {
    pub fn all(&self) -> bool {
        self.a_large && self.e_a_cubic && self.chain_s_gamma && self.top_s_gamma && self.eps_small
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPlan {
    pub n: u64,
    pub d: usize,
    pub epsilon: f64,
    pub mode: PlanMode,
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "logM")]
    pub log_m: f64,
    #[serde(rename = "logMtop")]
    pub log_m_top: f64,
    pub s_top: f64,
    pub gamma: Vec<f64>,
    pub delta: f64,
    pub eps0: f64,
    pub levels: Vec<LevelSpec>,
    pub side_conditions: SideConditions,
    pub synthesizable: bool,
    /// Width cap the plan was checked against.
    pub max_width: f64,
    /// Why the plan cannot be built, when it cannot.
    pub reason: Option<String>,
}

impl SynthPlan {
    pub fn level(&self, i: usize) -> &LevelSpec {
        &self.levels[i - 1]
    }

    /// Width of level `i` as an integer (levels must be synthesizable).
    pub fn width(&self, i: usize) -> u64 {
        self.level(i).width as u64
    }
}

/// Largest integer `a` with `a^e <= n`.
fn integer_root(n: u64, e: u32) -> u64 {
    let nf = n as f64;
    let mut a = floor(pow(nf, 1.0 / e as f64)) as u64;
    while pow((a + 1) as f64, e as f64) <= nf {
        a += 1;
    }
    while a > 1 && pow(a as f64, e as f64) > nf {
        a -= 1;
    }
    a
}

/// Integer width for `ln(width) = l`, tolerating rounding noise.
fn width_from_log(l: f64) -> f64 {
    let w = exp(l);
    let r = libm::round(w);
    if (w - r).abs() <= 1e-9 * w {
        r
    } else {
        ceil(w)
    }
}

/// `ceil(e^l)` kept in log scale when it does not fit an f64 usefully.
fn ceil_exp(l: f64) -> (f64, f64) {
    let v = exp(l);
    if v.is_finite() {
        let c = ceil(v - 1e-9 * v);
        (c, log(c))
    } else {
        (f64::INFINITY, l)
    }
}

/// Plans the construction for `n` inputs, depth `d` and margin `eps`.
///
/// Without overrides this is the textbook parameter sheet: `A =
/// floor(n^(1/(2(d-1))))`, `ln M = 10A`, `s_top = 10 A ln(1/eps)/eps`,
/// `ln M' = s_top + 10A`, fan-ins `A`, `ceil(e^A A)`, `ceil(e^A s_top)`
/// and `ceil(e^s_top)`. With overrides, the plan is desk scale: fan-ins
/// are calibrated so that at weight `n/2` every level's minority density
/// is `e^-A` (inductive levels) or `e^-s_top` (level `d-1`), and the
/// output gate fires with probability 1/2. An unset `s_top` is chosen to
/// minimize the predicted disagreement with majority.
pub fn plan(n: u64, d: usize, eps: f64, overrides: &Overrides, max_width: f64) -> Result<SynthPlan> {
    if d < 2 {
        return Err(Error::OutOfRange { name: "d", value: d as f64, expected: "d >= 2" });
    }
    if n < 3 {
        return Err(Error::OutOfRange { name: "n", value: n as f64, expected: "n >= 3" });
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::OutOfRange { name: "epsilon", value: eps, expected: "0 < epsilon <= 1/2" });
    }
    let mode = if overrides.is_empty() { PlanMode::Textbook } else { PlanMode::DeskScale };
    let textbook_a = integer_root(n, 2 * (d as u32 - 1));
    let a = overrides.a.unwrap_or(textbook_a);
    if a == 0 {
        return Err(Error::OutOfRange { name: "A", value: 0.0, expected: "A >= 1" });
    }
    let af = a as f64;
    let log_m = match (overrides.width, overrides.log_m) {
        (Some(w), _) => log(w as f64),
        (None, Some(l)) => l,
        (None, None) => 10.0 * af,
    };
    let textbook_s_top = 10.0 * af * log(1.0 / eps) / eps;
    let log_m_top = match (overrides.top_width, overrides.log_m_top) {
        (Some(w), _) => log(w as f64),
        (None, Some(l)) => l,
        (None, None) if mode == PlanMode::DeskScale => log_m,
        _ => textbook_s_top + 10.0 * af,
    };
    let gamma = gamma_sequence(af, eps / sqrt(n as f64), d - 2);
    let nf = n as f64;
    let eps0 = 0.5;

    let mut p = SynthPlan {
        n,
        d,
        epsilon: eps,
        mode,
        a,
        log_m,
        log_m_top,
        s_top: overrides.s_top.unwrap_or(textbook_s_top),
        gamma,
        delta: 1.0 / (nf * nf * nf),
        eps0,
        levels: Vec::new(),
        side_conditions: SideConditions {
            a_large: af >= 10.0 * log(nf),
            e_a_cubic: af >= 3.0 * log(nf),
            chain_s_gamma: true,
            top_s_gamma: true,
            eps_small: eps <= eps0,
        },
        synthesizable: true,
        max_width,
        reason: None,
    };
    p.side_conditions.chain_s_gamma = (1..d.saturating_sub(2)).all(|i| af * p.gamma[i] <= eps0);

    match mode {
        PlanMode::Textbook => p.levels = textbook_levels(&p),
        PlanMode::DeskScale => {
            if d >= 3 && overrides.s_top.is_none() {
                p.s_top = choose_s_top(&p);
            }
            p.levels = desk_levels(&p, p.s_top);
        }
    }
    p.side_conditions.top_s_gamma = d < 3 || p.s_top * p.gamma[d - 2] >= 5.0 * log(1.0 / eps);
    p.reason = check_synthesizable(&p, max_width);
    p.synthesizable = p.reason.is_none();
    Ok(p)
}

fn level_width(p: &SynthPlan, i: usize) -> (f64, f64) {
    if i == p.d {
        (1.0, 0.0)
    } else if i == p.d - 1 && p.d >= 3 {
        (width_from_log(p.log_m_top), p.log_m_top)
    } else {
        (width_from_log(p.log_m), p.log_m)
    }
}

fn spec(p: &SynthPlan, i: usize, fan_in: (f64, f64), center: f64) -> LevelSpec {
    let (width, log_width) = level_width(p, i);
    LevelSpec { level: i, kind: level_kind(i), width, log_width, fan_in: fan_in.0, log_fan_in: fan_in.1, center }
}

fn textbook_levels(p: &SynthPlan) -> Vec<LevelSpec> {
    let af = p.a as f64;
    let d = p.d;
    let mut out = Vec::with_capacity(d);
    out.push(spec(p, 1, (af, log(af)), exp(-af)));
    for i in 2..d.saturating_sub(1) {
        out.push(spec(p, i, ceil_exp(af + log(af)), exp(-af)));
    }
    if d >= 3 {
        out.push(spec(p, d - 1, ceil_exp(af + log(p.s_top)), exp(-p.s_top)));
        out.push(spec(p, d, ceil_exp(p.s_top), 0.5));
    } else {
        out.push(spec(p, d, ceil_exp(af), 0.5));
    }
    out
}

/// Draws needed so that `(1 - rho)^t` is about `e^-s`.
fn calibrated_fan_in(s: f64, rho: f64) -> f64 {
    ceil(s / -log1p(-rho)).max(1.0)
}

fn desk_levels(p: &SynthPlan, s_top: f64) -> Vec<LevelSpec> {
    let af = p.a as f64;
    let d = p.d;
    let mut out = Vec::with_capacity(d);
    let mut rho = pow(0.5, af);
    out.push(spec(p, 1, (af, log(af)), rho));
    for i in 2..d {
        let s = if i == d - 1 { s_top } else { af };
        let t = calibrated_fan_in(s, rho);
        rho = pow_one_minus(rho, t);
        out.push(spec(p, i, (t, log(t)), rho));
    }
    let f = ceil(core::f64::consts::LN_2 / -log1p(-rho)).max(1.0);
    out.push(spec(p, d, (f, log(f)), 0.5));
    out
}

/// Grid search for `s_top`: least predicted disagreement with majority,
/// keeping at least 32 expected minority gates on level `d-1` at `n/2`.
fn choose_s_top(p: &SynthPlan) -> f64 {
    let min_count = 32.0;
    let mut best = (f64::INFINITY, 0.5);
    let mut trial = p.clone();
    for step in 2..=80 {
        let s = step as f64 * 0.25;
        trial.levels = desk_levels(p, s);
        trial.s_top = s;
        let top = &trial.levels[p.d - 2];
        if top.width * top.center < min_count {
            continue;
        }
        let score = predicted_disagreement(&trial);
        if score < best.0 {
            best = (score, s);
        }
    }
    best.1
}

/// Mean-field disagreement with majority under uniform inputs.
pub(crate) fn predicted_disagreement(p: &SynthPlan) -> f64 {
    let n = p.n;
    (0..=n)
        .map(|w| {
            let q = super::bias::output_probability(p, w as f64);
            let maj = if 2 * w > n { 1.0 } else { 0.0 };
            exp(crate::math::ln_binomial(n, w) - n as f64 * core::f64::consts::LN_2) * (q - maj).abs()
        })
        .sum()
}

fn check_synthesizable(p: &SynthPlan, max_width: f64) -> Option<String> {
    if p.mode == PlanMode::Textbook && p.log_m > log(DEFAULT_MAX_WIDTH) {
        return Some(alloc::format!("textbook width M = e^{} exceeds e^{:.3}", p.log_m, log(DEFAULT_MAX_WIDTH)));
    }
    for l in &p.levels {
        if l.width.is_nan() || l.width > max_width {
            return Some(alloc::format!("level {} width e^{:.3} exceeds cap {}", l.level, l.log_width, max_width));
        }
        if l.fan_in.is_nan() || l.fan_in > MAX_FAN_IN {
            return Some(alloc::format!("level {} fan-in e^{:.3} exceeds cap {}", l.level, l.log_fan_in, MAX_FAN_IN));
        }
    }
    None
}
