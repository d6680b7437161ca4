//! Sampling from a recipe.
//!
//! A sample is a concrete [`Draw`]: every random subset fixed. Its
//! polynomial is obtained either by evaluating the draw on all inputs and
//! taking the ANF (fast, `n <= 20`), or symbolically through polynomial
//! products and composition (any `n`, small draws).

use alloc::borrow::Cow;
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{ProbPolyRecipe, RecipeNode};
use crate::circuit::GateKind;
use crate::error::{Error, Result};
use crate::poly::{exact_majority_poly, SparsePolyF2};
use crate::rng;
use crate::truth::{self, TruthTable, VerticalCounter};

/// Largest variable count sampled through truth tables.
pub const MAX_TABLE_SAMPLE_VARS: u32 = 20;

/// One draw from a recipe. Subsets are bit masks over the children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Draw {
    Var(u32),
    Const(bool),
    Not(Box<Draw>),
    Xor(Vec<Draw>),
    /// `OR_j parity(S_j)`, i.e. `1 + prod_j (1 + sum_{i in S_j} y_i)`.
    Or {
        subsets: Vec<Vec<u64>>,
        children: Vec<Draw>,
    },
    /// `prod_j (1 + sum_{i in S_j} (1 + y_i))`.
    And {
        subsets: Vec<Vec<u64>>,
        children: Vec<Draw>,
    },
    Maj(Vec<Draw>),
}

fn random_subset<R: RngCore + ?Sized>(r: &mut R, m: usize) -> Vec<u64> {
    let mut words: Vec<u64> = (0..m.div_ceil(64)).map(|_| r.next_u64()).collect();
    if !m.is_multiple_of(64) {
        *words.last_mut().expect("m >= 1") &= (1u64 << (m % 64)) - 1;
    }
    words
}

fn draw_subsets<R: RngCore + ?Sized>(r: &mut R, node: &RecipeNode) -> Option<Vec<Vec<u64>>> {
    match node {
        RecipeNode::Gate { approx, children, .. } if !approx.exact => {
            Some((0..approx.k).map(|_| random_subset(r, children.len())).collect())
        }
        _ => None,
    }
}

fn in_subset(s: &[u64], i: usize) -> bool {
    (s[i >> 6] >> (i & 63)) & 1 == 1
}

impl Draw {
    /// Draws every random choice of `node`. Subsets of a gate are drawn
    /// before its children, children and copies in order.
    pub fn new<R: RngCore + ?Sized>(node: &RecipeNode, r: &mut R) -> Draw {
        match node {
            RecipeNode::Var { var } => Draw::Var(*var),
            RecipeNode::Const { value } => Draw::Const(*value),
            RecipeNode::Not { child } => Draw::Not(Box::new(Draw::new(child, r))),
            RecipeNode::Gate { approx, children, .. } => {
                let subsets = draw_subsets(r, node);
                let children = children.iter().map(|c| Draw::new(c, r)).collect();
                match (subsets, approx.kind) {
                    (None, _) => Draw::Xor(children),
                    (Some(subsets), GateKind::Or) => Draw::Or { subsets, children },
                    (Some(subsets), _) => Draw::And { subsets, children },
                }
            }
            RecipeNode::Reduce { copies, child, .. } => Draw::Maj((0..*copies).map(|_| Draw::new(child, r)).collect()),
        }
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        let parity = |s: &[u64], ch: &[Draw], flip: bool| {
            ch.iter().enumerate().filter(|(i, _)| in_subset(s, *i)).fold(false, |acc, (_, c)| acc ^ (c.eval(x) ^ flip))
        };
        match self {
            Draw::Var(i) => x[*i as usize],
            Draw::Const(b) => *b,
            Draw::Not(c) => !c.eval(x),
            Draw::Xor(ch) => ch.iter().fold(false, |a, c| a ^ c.eval(x)),
            Draw::Or { subsets, children } => subsets.iter().any(|s| parity(s, children, false)),
            Draw::And { subsets, children } => subsets.iter().all(|s| !parity(s, children, true)),
            Draw::Maj(ch) => 2 * ch.iter().filter(|c| c.eval(x)).count() > ch.len(),
        }
    }

    /// Values on all `2^n` inputs.
    pub fn eval_table(&self, n: u32) -> Result<TruthTable> {
        truth::check_table_vars(n)?;
        let ctx = TableCtx::new(n);
        let mut words = self.table(&ctx).into_owned();
        ctx.mask(&mut words);
        TruthTable::from_words(n, words)
    }

    fn table<'a>(&self, ctx: &'a TableCtx) -> Cow<'a, [u64]> {
        match self {
            Draw::Var(i) => Cow::Borrowed(&ctx.vars[*i as usize]),
            Draw::Const(b) => Cow::Borrowed(if *b { &ctx.ones } else { &ctx.zeros }),
            Draw::Not(c) => Cow::Owned(c.table(ctx).iter().map(|w| !w).collect()),
            Draw::Xor(ch) => {
                let tabs: Vec<_> = ch.iter().map(|c| c.table(ctx)).collect();
                Cow::Owned(ctx.xor_all(tabs.iter().map(|t| &t[..])))
            }
            Draw::Or { subsets, children } | Draw::And { subsets, children } => {
                let tabs: Vec<_> = children.iter().map(|c| c.table(ctx)).collect();
                let tabs: Vec<&[u64]> = tabs.iter().map(|t| &t[..]).collect();
                Cow::Owned(ctx.razborov(matches!(self, Draw::Or { .. }), subsets, &tabs))
            }
            Draw::Maj(ch) => {
                let mut counter = VerticalCounter::new(ctx.words);
                for c in ch {
                    counter.add(&c.table(ctx));
                }
                let mut out = vec![0; ctx.words];
                counter.at_least(ch.len() as u64 / 2 + 1, &mut out);
                Cow::Owned(out)
            }
        }
    }

    /// The drawn polynomial computed symbolically.
    pub fn to_poly(&self, n: u32) -> Result<SparsePolyF2> {
        Ok(match self {
            Draw::Var(i) => SparsePolyF2::var(n, *i),
            Draw::Const(b) => SparsePolyF2::constant(n, *b),
            Draw::Not(c) => c.to_poly(n)?.complement(),
            Draw::Xor(ch) => {
                let mut acc = SparsePolyF2::zero(n);
                for c in ch {
                    acc.add_assign(&c.to_poly(n)?)?;
                }
                acc
            }
            Draw::Or { subsets, children } | Draw::And { subsets, children } => {
                let is_or = matches!(self, Draw::Or { .. });
                let polys = children.iter().map(|c| c.to_poly(n)).collect::<Result<Vec<_>>>()?;
                let mut prod = SparsePolyF2::one(n);
                for s in subsets {
                    let mut lin = SparsePolyF2::one(n);
                    for (i, p) in polys.iter().enumerate() {
                        if in_subset(s, i) {
                            lin.add_assign(&if is_or { p.clone() } else { p.complement() })?;
                        }
                    }
                    prod = prod.mul(&lin)?;
                }
                if is_or {
                    prod.complement()
                } else {
                    prod
                }
            }
            Draw::Maj(ch) => {
                let polys = ch.iter().map(|c| c.to_poly(n)).collect::<Result<Vec<_>>>()?;
                exact_majority_poly(ch.len() as u32)?.compose(&polys)?
            }
        })
    }
}

/// Shared tables for evaluating draws on all `2^n` inputs.
struct TableCtx {
    n: u32,
    words: usize,
    vars: Vec<Vec<u64>>,
    zeros: Vec<u64>,
    ones: Vec<u64>,
}

impl TableCtx {
    fn new(n: u32) -> Self {
        let words = truth::word_count(n);
        TableCtx {
            n,
            words,
            vars: (0..n).map(|i| TruthTable::var(n, i).words().to_vec()).collect(),
            zeros: vec![0; words],
            ones: vec![!0; words],
        }
    }

    fn mask(&self, words: &mut [u64]) {
        if self.n < 6 {
            words[0] &= (1u64 << (1u32 << self.n)) - 1;
        }
    }

    fn xor_all<'b>(&self, tabs: impl Iterator<Item = &'b [u64]>) -> Vec<u64> {
        let mut out = vec![0; self.words];
        for t in tabs {
            out.iter_mut().zip(t).for_each(|(o, w)| *o ^= w);
        }
        out
    }

    fn razborov(&self, is_or: bool, subsets: &[Vec<u64>], tabs: &[&[u64]]) -> Vec<u64> {
        let mut out = vec![if is_or { 0 } else { !0 }; self.words];
        let mut par = vec![0u64; self.words];
        for s in subsets {
            par.iter_mut().for_each(|w| *w = 0);
            let mut odd = false;
            for (i, t) in tabs.iter().enumerate() {
                if in_subset(s, i) {
                    odd = !odd;
                    par.iter_mut().zip(t.iter()).for_each(|(p, w)| *p ^= w);
                }
            }
            if is_or {
                out.iter_mut().zip(&par).for_each(|(o, p)| *o |= p);
            } else {
                // Parity of complements is `par ^ odd`; the factor is its negation.
                let flip = if odd { 0 } else { !0 };
                out.iter_mut().zip(&par).for_each(|(o, p)| *o &= p ^ flip);
            }
        }
        out
    }

    /// Samples `node` and evaluates it in one pass, consuming randomness
    /// exactly like [`Draw::new`].
    fn sample<'a, R: RngCore + ?Sized>(&'a self, node: &RecipeNode, r: &mut R) -> Cow<'a, [u64]> {
        match node {
            RecipeNode::Var { var } => Cow::Borrowed(&self.vars[*var as usize]),
            RecipeNode::Const { value } => Cow::Borrowed(if *value { &self.ones } else { &self.zeros }),
            RecipeNode::Not { child } => Cow::Owned(self.sample(child, r).iter().map(|w| !w).collect()),
            RecipeNode::Gate { approx, children, .. } => {
                let subsets = draw_subsets(r, node);
                let tabs: Vec<_> = children.iter().map(|c| self.sample(c, r)).collect();
                match subsets {
                    None => Cow::Owned(self.xor_all(tabs.iter().map(|t| &t[..]))),
                    Some(s) => {
                        let tabs: Vec<&[u64]> = tabs.iter().map(|t| &t[..]).collect();
                        Cow::Owned(self.razborov(approx.kind == GateKind::Or, &s, &tabs))
                    }
                }
            }
            RecipeNode::Reduce { copies, child, .. } => {
                let mut counter = VerticalCounter::new(self.words);
                for _ in 0..*copies {
                    counter.add(&self.sample(child, r));
                }
                let mut out = vec![0; self.words];
                counter.at_least(copies / 2 + 1, &mut out);
                Cow::Owned(out)
            }
        }
    }
}

/// Degree of the ANF whose coefficients are packed in `anf`.
fn anf_degree(anf: &[u64]) -> usize {
    let mut best = 0;
    for (j, &w) in anf.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let b = w.trailing_zeros() as usize;
            best = best.max((j * 64 + b).count_ones() as usize);
            w &= w - 1;
        }
    }
    best
}

/// Per-input error counts of a batch of samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub n: u32,
    pub trials: u64,
    /// `mistakes[x]`: samples wrong at input `x`.
    pub mistakes: Vec<u64>,
    pub max_degree: usize,
    /// Samples whose degree exceeded the recipe's bound.
    pub degree_violations: u64,
}

impl ErrorProfile {
    pub fn empty(n: u32) -> Self {
        ErrorProfile { n, trials: 0, mistakes: vec![0; 1 << n], max_degree: 0, degree_violations: 0 }
    }

    pub fn merge(&mut self, other: &ErrorProfile) {
        assert_eq!(self.n, other.n);
        self.trials += other.trials;
        self.mistakes.iter_mut().zip(&other.mistakes).for_each(|(a, b)| *a += b);
        self.max_degree = self.max_degree.max(other.max_degree);
        self.degree_violations += other.degree_violations;
    }

    pub fn error_at(&self, x: usize) -> f64 {
        self.mistakes[x] as f64 / self.trials as f64
    }

    pub fn max_error(&self) -> f64 {
        (0..self.mistakes.len()).map(|x| self.error_at(x)).fold(0.0, f64::max)
    }
}

impl ProbPolyRecipe {
    /// The draw behind [`ProbPolyRecipe::sample`] for the same seed.
    pub fn draw(&self, seed: u64) -> Draw {
        Draw::new(&self.root, &mut rng::seeded(seed))
    }

    /// Values of the sample for `seed` on all `2^n` inputs, `n >= num_vars`.
    pub fn sample_table(&self, seed: u64, n: u32) -> Result<TruthTable> {
        self.check_vars(n)?;
        if n > MAX_TABLE_SAMPLE_VARS {
            return Err(Error::ResourceCap {
                what: alloc::format!("table sampling on {n} variables"),
                requested: n as f64,
                limit: MAX_TABLE_SAMPLE_VARS as f64,
            });
        }
        let ctx = TableCtx::new(n);
        let mut words = ctx.sample(&self.root, &mut rng::seeded(seed)).into_owned();
        ctx.mask(&mut words);
        TruthTable::from_words(n, words)
    }

    /// One polynomial from the distribution, a deterministic function of `seed`.
    pub fn sample(&self, seed: u64) -> Result<SparsePolyF2> {
        let n = self.num_vars;
        if n <= MAX_TABLE_SAMPLE_VARS {
            SparsePolyF2::from_truth_table(&self.sample_table(seed, n)?)
        } else {
            self.draw(seed).to_poly(n)
        }
    }

    fn check_vars(&self, n: u32) -> Result<()> {
        if n < self.num_vars {
            return Err(Error::DimensionMismatch { left: self.num_vars as usize, right: n as usize });
        }
        Ok(())
    }

    /// Errors of samples `first..first + count` against `target`. Sample `i`
    /// uses seed `derive_seed(root_seed, i)`, so disjoint ranges can run
    /// anywhere and be merged.
    pub fn error_profile(&self, target: &TruthTable, root_seed: u64, first: u64, count: u64) -> Result<ErrorProfile> {
        let n = target.num_vars();
        self.check_vars(n)?;
        if n > MAX_TABLE_SAMPLE_VARS {
            return Err(Error::ResourceCap {
                what: alloc::format!("error profile on {n} variables"),
                requested: n as f64,
                limit: MAX_TABLE_SAMPLE_VARS as f64,
            });
        }
        let ctx = TableCtx::new(n);
        let mut counter = VerticalCounter::new(ctx.words);
        let mut profile = ErrorProfile::empty(n);
        for i in first..first + count {
            let mut r = rng::task_rng(root_seed, i);
            let mut words = ctx.sample(&self.root, &mut r).into_owned();
            ctx.mask(&mut words);
            let wrong: Vec<u64> = words.iter().zip(target.words()).map(|(a, b)| a ^ b).collect();
            counter.add(&wrong);
            crate::poly::mobius_words(&mut words, n);
            let deg = anf_degree(&words);
            profile.max_degree = profile.max_degree.max(deg);
            if deg as u64 > self.degree_bound {
                profile.degree_violations += 1;
            }
        }
        profile.trials = count;
        for (x, m) in profile.mistakes.iter_mut().enumerate() {
            *m = counter.count(x);
        }
        Ok(profile)
    }
}
