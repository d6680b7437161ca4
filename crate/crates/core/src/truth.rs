//! Packed truth tables. Entry `i` is the value at the assignment whose
//! bit `j` is `x_j` (little-endian assignment order).

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count a dense table may have.
pub const MAX_TABLE_VARS: u32 = 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruthTable {
    n: u32,
    words: Vec<u64>,
}

pub(crate) fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn tail_mask(n: u32) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

/// Word pattern of variable `i < 6` within a single 64-bit word.
pub(crate) const VAR_PATTERNS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

pub(crate) fn check_table_vars(n: u32) -> Result<()> {
    if n > MAX_TABLE_VARS {
        return Err(Error::ResourceCap {
            what: alloc::format!("truth table on {n} variables"),
            requested: n as f64,
            limit: MAX_TABLE_VARS as f64,
        });
    }
    Ok(())
}

impl TruthTable {
    /// All-zero table. Panics if `n` exceeds [`MAX_TABLE_VARS`].
    pub fn zeros(n: u32) -> Self {
        assert!(n <= MAX_TABLE_VARS, "truth table on {n} variables");
        TruthTable { n, words: vec![0; word_count(n)] }
    }

    pub fn ones(n: u32) -> Self {
        let mut t = Self::zeros(n);
        t.words.iter_mut().for_each(|w| *w = !0);
        t.mask_tail();
        t
    }

    pub fn from_fn(n: u32, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..t.len() {
            if f(i) {
                t.set(i, true);
            }
        }
        t
    }

    /// Table from packed words; bits beyond `2^n` must be zero.
    pub fn from_words(n: u32, words: Vec<u64>) -> Result<Self> {
        check_table_vars(n)?;
        if words.len() != word_count(n) {
            return Err(Error::DimensionMismatch { left: word_count(n), right: words.len() });
        }
        if words[words.len() - 1] & !tail_mask(n) != 0 {
            return Err(Error::InvalidCircuit(alloc::string::String::from("truth table has bits beyond 2^n")));
        }
        Ok(TruthTable { n, words })
    }

    /// Projection onto `x_i`.
    pub fn var(n: u32, i: u32) -> Self {
        assert!(i < n);
        let mut t = Self::zeros(n);
        if i < 6 {
            t.words.iter_mut().for_each(|w| *w = VAR_PATTERNS[i as usize]);
            t.mask_tail();
        } else {
            let stride = 1usize << (i - 6);
            for (j, w) in t.words.iter_mut().enumerate() {
                if j & stride != 0 {
                    *w = !0;
                }
            }
        }
        t
    }

    /// MAJ_n: 1 iff strictly more than half the inputs are 1.
    pub fn majority(n: u32) -> Self {
        Self::from_fn(n, |i| 2 * i.count_ones() > n)
    }

    pub fn parity(n: u32) -> Self {
        Self::from_fn(n, |i| i.count_ones() % 2 == 1)
    }

    pub fn and_all(n: u32) -> Self {
        Self::from_fn(n, |i| i.count_ones() == n)
    }

    pub fn or_all(n: u32) -> Self {
        Self::from_fn(n, |i| i != 0)
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let bit = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of entries where the two tables differ.
    pub fn distance(&self, other: &Self) -> Result<u64> {
        self.same_shape(other)?;
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as u64).sum())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(TruthTable { n: self.n, words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect() })
    }

    pub fn complement(&self) -> Self {
        let mut t = TruthTable { n: self.n, words: self.words.iter().map(|w| !w).collect() };
        t.mask_tail();
        t
    }

    /// Indices of the 1-entries in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(j, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(j * 64 + b)
                }
            })
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n as usize, right: other.n as usize });
        }
        Ok(())
    }

    pub(crate) fn mask_tail(&mut self) {
        let m = tail_mask(self.n);
        if let Some(last) = self.words.last_mut() {
            *last &= m;
        }
    }
}

/// Bit-sliced per-position counters over packed words: plane `p` holds
/// bit `p` of every position's count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalCounter {
    words: usize,
    planes: Vec<Vec<u64>>,
}

impl VerticalCounter {
    pub fn new(words: usize) -> Self {
        VerticalCounter { words, planes: Vec::new() }
    }

    pub fn reset(&mut self) {
        self.planes.iter_mut().for_each(|p| p.iter_mut().for_each(|w| *w = 0));
    }

    /// Adds 1 at every set bit of `x`.
    pub fn add(&mut self, x: &[u64]) {
        assert_eq!(x.len(), self.words);
        for (w, &bits) in x.iter().enumerate() {
            let mut carry = bits;
            let mut p = 0;
            while carry != 0 {
                if p == self.planes.len() {
                    self.planes.push(vec![0; self.words]);
                }
                let plane = &mut self.planes[p][w];
                let next = *plane & carry;
                *plane ^= carry;
                carry = next;
                p += 1;
            }
        }
    }

    /// Word mask of positions whose count is at least `h`.
    pub fn at_least(&self, h: u64, out: &mut [u64]) {
        assert_eq!(out.len(), self.words);
        let bits = 64 - h.leading_zeros() as usize;
        if bits > self.planes.len() {
            // `h` exceeds every representable count.
            out.iter_mut().for_each(|w| *w = 0);
            return;
        }
        for (w, o) in out.iter_mut().enumerate() {
            let (mut gt, mut eq) = (0u64, !0u64);
            for p in (0..self.planes.len()).rev() {
                let c = self.planes[p][w];
                let hb = if (h >> p) & 1 == 1 { !0u64 } else { 0 };
                gt |= eq & c & !hb;
                eq &= !(c ^ hb);
            }
            *o = gt | eq;
        }
    }

    /// Count at bit position `i`.
    pub fn count(&self, i: usize) -> u64 {
        self.planes.iter().enumerate().map(|(p, plane)| ((plane[i >> 6] >> (i & 63)) & 1) << p).sum()
    }
}

/// Assignment for table index `i` on `n` variables.
pub fn assignment(n: u32, i: usize) -> Vec<bool> {
    (0..n).map(|j| (i >> j) & 1 == 1).collect()
}

/// Inverse of [`assignment`].
pub fn index_of(x: &[bool]) -> usize {
    x.iter().enumerate().fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_tables_match_definition() {
        for n in 0..9u32 {
            for i in 0..n {
                let t = TruthTable::var(n, i);
                for idx in 0..t.len() {
                    assert_eq!(t.get(idx), (idx >> i) & 1 == 1);
                }
            }
        }
    }

    #[test]
    fn majority_is_strict() {
        let m4 = TruthTable::majority(4);
        assert!(!m4.get(0b0011));
        assert!(m4.get(0b0111));
        let m3 = TruthTable::majority(3);
        assert_eq!(m3.words()[0], 0xe8);
    }

    #[test]
    fn complement_keeps_tail_clear() {
        let t = TruthTable::zeros(3).complement();
        assert_eq!(t.words()[0], 0xff);
        assert_eq!(t.count_ones(), 8);
    }

    #[test]
    fn ones_iter_lists_entries() {
        let t = TruthTable::or_all(7);
        assert_eq!(t.ones_iter().count(), 127);
        assert_eq!(t.ones_iter().next(), Some(1));
    }

    #[test]
    fn vertical_counter_counts() {
        let mut c = VerticalCounter::new(2);
        let rows: Vec<[u64; 2]> = (0..37u64).map(|i| [i.wrapping_mul(0x9e37_79b9_7f4a_7c15), i * 3]).collect();
        for r in &rows {
            c.add(r);
        }
        let mut ge = [0u64; 2];
        c.at_least(19, &mut ge);
        for i in 0..128 {
            let want: u64 = rows.iter().map(|r| (r[i >> 6] >> (i & 63)) & 1).sum();
            assert_eq!(c.count(i), want);
            assert_eq!((ge[i >> 6] >> (i & 63)) & 1 == 1, want >= 19);
        }
        c.at_least(1 << 20, &mut ge);
        assert_eq!(ge, [0, 0]);
    }

    #[test]
    fn rejects_bits_beyond_table() {
        assert!(TruthTable::from_words(2, alloc::vec![0x1f]).is_err());
        assert!(TruthTable::from_words(2, alloc::vec![0x0e]).is_ok());
    }
}
