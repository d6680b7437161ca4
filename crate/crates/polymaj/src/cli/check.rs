//! Grid sweeps behind `polymaj check`.

use std::collections::BTreeMap;
use std::path::Path;

use polymaj_core::compiler::check_key_inequality;
use polymaj_core::rng::{task_rng, Rng as CoreRng};
use polymaj_core::synth::{
    check_technical_lemma, eps0_inequalities, gamma_bounds, gamma_sequence, tail_mass, LemmaPolarity, LemmaReport,
};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{to_value, CheckKind, Outcome, RunConfig};
use crate::report::{to_csv, RunMeta};
use crate::{exit, io, Error, Result};

const MAX_EXAMPLES: usize = 10;

/// `(b+1)(a/d+1)^d <= ((a+b)/(d+1)+1)^(d+1)` over a product grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityGrid {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: Vec<u32>,
}

impl Default for InequalityGrid {
    fn default() -> Self {
        let half: Vec<f64> = (0..=128).map(|i| i as f64 / 2.0).collect();
        InequalityGrid { a: half.clone(), b: half, d: (1..=8).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaTuple {
    #[serde(rename = "A")]
    pub a: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub n: u64,
    pub gamma: f64,
    pub k: u64,
    #[serde(default = "default_polarity")]
    pub polarity: LemmaPolarity,
}

fn default_polarity() -> LemmaPolarity {
    LemmaPolarity::I
}

impl LemmaTuple {
    pub fn check(&self) -> LemmaReport {
        check_technical_lemma(self.a, self.s, self.m, self.n, self.gamma, self.k, self.polarity)
    }

    /// A tuple meeting every hypothesis, with `s` in `[1, n]` and `k` in
    /// one of the two bands around `M e^-A`.
    pub fn random(r: &mut CoreRng) -> Self {
        let n = r.gen_range(11f64.ln()..1e4f64.ln()).exp().floor() as u64;
        let nf = n as f64;
        let a = 3.0 * nf.ln() + r.gen_range(0.0..4.0);
        let s = r.gen_range(1.0..=nf);
        let gamma = r.gen_range(1.0 / nf..0.1);
        let m = (a.exp() * r.gen_range(1.0f64..1e3)).ceil() as u64;
        let center = m as f64 * (-a).exp();
        let k = if r.gen_bool(0.5) {
            (center * (1.0 - gamma) * r.gen_range(0.0..=1.0)).floor() as u64
        } else {
            ((center * (1.0 + gamma) * r.gen_range(1.0..3.0)).ceil() as u64).min(m)
        };
        let polarity = if r.gen_bool(0.5) { LemmaPolarity::I } else { LemmaPolarity::J };
        LemmaTuple { a, s, m, n, gamma, k, polarity }
    }
}

/// Explicit tuples, plus `random` hypothesis-satisfying ones drawn from
/// the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaGrid {
    #[serde(default)]
    pub tuples: Vec<LemmaTuple>,
    #[serde(default)]
    pub random: usize,
}

impl Default for LemmaGrid {
    fn default() -> Self {
        LemmaGrid { tuples: vec![], random: 1000 }
    }
}

/// Envelope of the gamma recurrence, and the two eps0 inequalities at
/// `beta = j / (2 beta_points)`, `j = 1..=beta_points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaGrid {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub gamma0: Vec<f64>,
    pub imax: u32,
    pub beta_points: usize,
}

impl Default for GammaGrid {
    fn default() -> Self {
        GammaGrid {
            a: (2..=32).map(f64::from).collect(),
            gamma0: (0..=300).map(|j| 10f64.powf(-4.0 + 3.0 * j as f64 / 300.0)).collect(),
            imax: 8,
            beta_points: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailsGrid {
    pub n: Vec<u64>,
    pub epsilon: Vec<f64>,
}

impl Default for TailsGrid {
    fn default() -> Self {
        TailsGrid { n: (51..=501).step_by(50).collect(), epsilon: vec![0.05, 0.1, 0.25] }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityPoint {
    pub a: f64,
    pub b: f64,
    pub d: u32,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalitySummary {
    pub points: usize,
    pub failures: usize,
    /// Points with gap below 1e-6.
    pub equalities: usize,
    /// Equalities away from `b = a/d`.
    pub off_diagonal_equalities: usize,
    pub min_gap: f64,
    pub examples: Vec<InequalityPoint>,
    pub pass: bool,
}

impl InequalityGrid {
    pub fn evaluate(&self) -> InequalitySummary {
        let mut s = InequalitySummary {
            points: 0,
            failures: 0,
            equalities: 0,
            off_diagonal_equalities: 0,
            min_gap: f64::INFINITY,
            examples: vec![],
            pass: true,
        };
        for &d in &self.d {
            for &a in &self.a {
                for &b in &self.b {
                    let (ok, gap) = check_key_inequality(a, b, d);
                    s.points += 1;
                    s.min_gap = s.min_gap.min(gap);
                    let bad_eq = gap < 1e-6 && (b - a / d as f64).abs() >= 1e-6;
                    s.equalities += (gap < 1e-6) as usize;
                    s.off_diagonal_equalities += bad_eq as usize;
                    s.failures += !ok as usize;
                    if (!ok || bad_eq) && s.examples.len() < MAX_EXAMPLES {
                        s.examples.push(InequalityPoint { a, b, d, gap });
                    }
                }
            }
        }
        s.pass = s.failures == 0 && s.off_diagonal_equalities == 0;
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaRow {
    #[serde(rename = "A")]
    pub a: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub n: u64,
    pub gamma: f64,
    pub k: u64,
    pub polarity: LemmaPolarity,
    pub t: f64,
    pub exact: f64,
    /// `violation`, `skip` (a hypothesis fails) or `ok`.
    pub status: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSummary {
    pub checked: usize,
    pub judged: usize,
    pub skipped: usize,
    pub violations: usize,
    pub skip_reasons: BTreeMap<String, usize>,
    pub examples: Vec<LemmaRow>,
    pub pass: bool,
}

impl LemmaGrid {
    /// Tuples in order: the explicit ones, then random tuple `i` from
    /// `task_rng(seed, i)`.
    pub fn tuples(&self, seed: u64) -> Vec<LemmaTuple> {
        let mut out = self.tuples.clone();
        out.extend((0..self.random as u64).map(|i| LemmaTuple::random(&mut task_rng(seed, i))));
        out
    }

    pub fn evaluate(&self, seed: u64) -> (LemmaSummary, Vec<LemmaRow>) {
        let mut s = LemmaSummary {
            checked: 0,
            judged: 0,
            skipped: 0,
            violations: 0,
            skip_reasons: BTreeMap::new(),
            examples: vec![],
            pass: true,
        };
        let mut rows = Vec::new();
        for t in self.tuples(seed) {
            let r = t.check();
            s.checked += 1;
            let (status, detail) = if !r.hypothesis_failures.is_empty() {
                s.skipped += 1;
                for h in &r.hypothesis_failures {
                    *s.skip_reasons.entry(h.clone()).or_default() += 1;
                }
                ("skip", r.hypothesis_failures.join("; "))
            } else if !r.holds() {
                s.judged += 1;
                s.violations += 1;
                ("violation", r.violations.join("; "))
            } else {
                s.judged += 1;
                ("ok", String::new())
            };
            let row = LemmaRow {
                a: t.a,
                s: t.s,
                m: t.m,
                n: t.n,
                gamma: t.gamma,
                k: t.k,
                polarity: t.polarity,
                t: r.t,
                exact: r.exact,
                status,
                detail,
            };
            if status == "violation" && s.examples.len() < MAX_EXAMPLES {
                s.examples.push(row.clone());
            }
            rows.push(row);
        }
        s.pass = s.violations == 0;
        (s, rows)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaPoint {
    #[serde(rename = "A")]
    pub a: f64,
    pub gamma0: f64,
    pub i: u32,
    pub gamma: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaSummary {
    pub points: usize,
    pub failures: usize,
    /// Failures keyed by `A`.
    pub failures_by_a: BTreeMap<u64, usize>,
    pub eps0_points: usize,
    pub eps0_failures: usize,
    pub examples: Vec<GammaPoint>,
    pub pass: bool,
}

impl GammaGrid {
    pub fn evaluate(&self) -> GammaSummary {
        let mut s = GammaSummary {
            points: 0,
            failures: 0,
            failures_by_a: BTreeMap::new(),
            eps0_points: self.beta_points,
            eps0_failures: 0,
            examples: vec![],
            pass: true,
        };
        for &a in &self.a {
            for &g0 in &self.gamma0 {
                let seq = gamma_sequence(a, g0, self.imax as usize);
                for i in 0..=self.imax {
                    let (lo, hi) = gamma_bounds(a, g0, i);
                    let g = seq[i as usize];
                    let tol = 1e-12 * hi.abs();
                    s.points += 1;
                    if g < lo - tol || g > hi + tol {
                        s.failures += 1;
                        *s.failures_by_a.entry(a as u64).or_default() += 1;
                        if s.examples.len() < MAX_EXAMPLES {
                            s.examples.push(GammaPoint { a, gamma0: g0, i, gamma: g, lo, hi });
                        }
                    }
                }
            }
        }
        for j in 1..=self.beta_points {
            let (x, y) = eps0_inequalities(j as f64 / (2.0 * self.beta_points as f64));
            s.eps0_failures += (!x || !y) as usize;
        }
        s.pass = s.failures == 0 && s.eps0_failures == 0;
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub n: u64,
    pub epsilon: f64,
    pub tail: f64,
    pub bound: f64,
    pub pass: bool,
}

impl TailsGrid {
    pub fn evaluate(&self) -> Vec<TailRow> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &epsilon in &self.epsilon {
                let tail = tail_mass(n, epsilon);
                out.push(TailRow { n, epsilon, tail, bound: 2.0 * epsilon, pass: tail <= 2.0 * epsilon });
            }
        }
        out
    }
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => serde_json::from_str(&io::read_text(p)?)
            .map_err(|source| Error::Json { context: p.display().to_string(), source }),
        None => Ok(T::default()),
    }
}

pub(super) fn run(cfg: &RunConfig, kind: CheckKind, grid: Option<&Path>) -> Result<Outcome> {
    let (grid_json, result, csv, pass) = match kind {
        CheckKind::Inequality => {
            let g: InequalityGrid = load(grid)?;
            let s = g.evaluate();
            (to_value(&g)?, to_value(&s)?, to_csv(&s.examples)?, s.pass)
        }
        CheckKind::Lemma => {
            let g: LemmaGrid = load(grid)?;
            let (s, rows) = g.evaluate(cfg.seed);
            (to_value(&g)?, to_value(&s)?, to_csv(&rows)?, s.pass)
        }
        CheckKind::Gamma => {
            let g: GammaGrid = load(grid)?;
            let s = g.evaluate();
            (to_value(&g)?, to_value(&s)?, to_csv(&s.examples)?, s.pass)
        }
        CheckKind::Tails => {
            let g: TailsGrid = load(grid)?;
            let rows = g.evaluate();
            let pass = rows.iter().all(|r| r.pass);
            let failures = rows.iter().filter(|r| !r.pass).count();
            (to_value(&g)?, json!({"rows": rows, "failures": failures, "pass": pass}), to_csv(&rows)?, pass)
        }
    };
    let name = to_value(&kind)?;
    Ok(Outcome {
        meta: RunMeta::new("check", cfg.seed, None, json!({"kind": name, "grid": grid_json})),
        result,
        artifacts: vec![("check.csv".into(), csv.clone())],
        csv,
        notes: vec![format!("check {}: {}", name.as_str().unwrap_or(""), if pass { "PASS" } else { "FAIL" })],
        code: if pass { exit::OK } else { exit::FAIL },
    })
}
