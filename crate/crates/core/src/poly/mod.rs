//! Multilinear polynomials over F2 in algebraic normal form.
//!
//! A polynomial is a set of monomials; a monomial is a strictly increasing
//! list of variable indices, the empty list being the constant 1.

mod anf;
mod text;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use anf::mobius_words;
pub use anf::MAX_ANF_VARS;
pub use text::parse_poly;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: u32) -> Self {
        Monomial(alloc::vec![i])
    }

    /// Canonicalizes: sorts and drops repeats (`x^2 = x`).
    pub fn new(mut vars: Vec<u32>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Monomial(vars)
    }

    /// Monomial whose variables are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut m = mask;
        let mut vars = Vec::with_capacity(mask.count_ones() as usize);
        while m != 0 {
            vars.push(m.trailing_zeros());
            m &= m - 1;
        }
        Monomial(vars)
    }

    /// Bit mask of the variables; `None` if a variable is >= 64.
    pub fn mask(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, &v| (v < 64).then(|| acc | 1 << v))
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Product in the multilinear quotient: union of the variable sets.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.0.iter().all(|&v| x[v as usize])
    }
}

/// Graded lexicographic order: by degree, then by variable list.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparsePolyF2 {
    n: u32,
    terms: BTreeSet<Monomial>,
}

impl SparsePolyF2 {
    pub fn zero(n: u32) -> Self {
        SparsePolyF2 { n, terms: BTreeSet::new() }
    }

    pub fn one(n: u32) -> Self {
        Self::constant(n, true)
    }

    pub fn constant(n: u32, c: bool) -> Self {
        let mut p = Self::zero(n);
        if c {
            p.terms.insert(Monomial::one());
        }
        p
    }

    pub fn var(n: u32, i: u32) -> Self {
        assert!(i < n, "variable x{i} outside {n} variables");
        let mut p = Self::zero(n);
        p.terms.insert(Monomial::var(i));
        p
    }

    /// Sum of the given monomials; repeated monomials cancel in pairs.
    pub fn from_monomials(n: u32, monomials: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut p = Self::zero(n);
        for m in monomials {
            if let Some(&v) = m.vars().last() {
                if v >= n {
                    return Err(Error::DimensionMismatch { left: n as usize, right: v as usize + 1 });
                }
            }
            p.toggle(m);
        }
        Ok(p)
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = &Monomial> + DoubleEndedIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial degree; 0 for constants including the zero polynomial.
    pub fn degree(&self) -> usize {
        // Graded order puts a top-degree monomial last.
        self.terms.last().map_or(0, Monomial::degree)
    }

    /// Same polynomial viewed over `n >= num_vars()` variables.
    pub fn widen(mut self, n: u32) -> Self {
        assert!(n >= self.n);
        self.n = n;
        self
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n as usize, right: other.n as usize });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(SparsePolyF2 { n: self.n, terms: self.terms.symmetric_difference(&other.terms).cloned().collect() })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.same_n(other)?;
        for m in &other.terms {
            self.toggle(m.clone());
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        let mut out = Self::zero(self.n);
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        Ok(out)
    }

    /// `1 + p`.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        out.toggle(Monomial::one());
        out
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n as usize {
            return Err(Error::ArityMismatch { expected: self.n as usize, got: x.len() });
        }
        Ok(self.terms.iter().fold(false, |acc, m| acc ^ m.eval(x)))
    }

    /// Substitutes `qs[i]` for `x_i`. All `qs` share one variable count,
    /// which becomes the result's.
    pub fn compose(&self, qs: &[SparsePolyF2]) -> Result<Self> {
        if qs.len() != self.n as usize {
            return Err(Error::ArityMismatch { expected: self.n as usize, got: qs.len() });
        }
        let Some(first) = qs.first() else {
            return Ok(self.clone());
        };
        let n = first.n;
        for q in qs {
            first.same_n(q)?;
        }
        let mut out = Self::zero(n);
        for m in &self.terms {
            let mut prod = Self::one(n);
            for &v in m.vars() {
                prod = prod.mul(&qs[v as usize])?;
                if prod.is_zero() {
                    break;
                }
            }
            out.add_assign(&prod)?;
        }
        Ok(out)
    }
}

/// ANF of MAJ_m for odd `m <= 24`.
pub fn exact_majority_poly(m: u32) -> Result<SparsePolyF2> {
    if m.is_multiple_of(2) {
        return Err(Error::OutOfRange { name: "m", value: m as f64, expected: "odd" });
    }
    if m > MAX_ANF_VARS {
        return Err(Error::ResourceCap {
            what: alloc::format!("majority polynomial on {m} variables"),
            requested: m as f64,
            limit: MAX_ANF_VARS as f64,
        });
    }
    SparsePolyF2::from_truth_table(&crate::truth::TruthTable::majority(m))
}
