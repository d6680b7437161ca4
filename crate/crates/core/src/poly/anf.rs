use alloc::vec::Vec;

use super::{Monomial, SparsePolyF2};
use crate::error::{Error, Result};
use crate::truth::{TruthTable, VAR_PATTERNS};

/// Largest variable count accepted by the dense ANF conversions.
pub const MAX_ANF_VARS: u32 = 24;

/// In-place Möbius transform over F2 on a packed table of `2^n` bits.
/// It is an involution: applying it twice is the identity.
pub(crate) fn mobius_words(words: &mut [u64], n: u32) {
    for i in 0..n.min(6) {
        let shift = 1u32 << i;
        let mask = VAR_PATTERNS[i as usize];
        for w in words.iter_mut() {
            *w ^= (*w << shift) & mask;
        }
    }
    for i in 6..n {
        let stride = 1usize << (i - 6);
        for j in 0..words.len() {
            if j & stride != 0 {
                words[j] ^= words[j ^ stride];
            }
        }
    }
}

fn cap(n: u32) -> Result<()> {
    if n > MAX_ANF_VARS {
        return Err(Error::ResourceCap {
            what: alloc::format!("dense ANF on {n} variables"),
            requested: n as f64,
            limit: MAX_ANF_VARS as f64,
        });
    }
    Ok(())
}

impl SparsePolyF2 {
    /// The unique multilinear polynomial agreeing with `t` everywhere.
    pub fn from_truth_table(t: &TruthTable) -> Result<Self> {
        let n = t.num_vars();
        cap(n)?;
        let mut words = t.words().to_vec();
        mobius_words(&mut words, n);
        let tt = TruthTable::from_words(n, words)?;
        Ok(SparsePolyF2 { n, terms: tt.ones_iter().map(|i| Monomial::from_mask(i as u64)).collect() })
    }

    pub fn to_truth_table(&self) -> Result<TruthTable> {
        cap(self.n)?;
        let mut t = TruthTable::zeros(self.n);
        for m in &self.terms {
            t.set(m.mask().expect("variables below the cap") as usize, true);
        }
        let mut words: Vec<u64> = t.words().to_vec();
        mobius_words(&mut words, self.n);
        TruthTable::from_words(self.n, words)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    /// Coefficient of monomial `S` is the XOR of `f` over all subsets of `S`.
    fn naive_anf(t: &TruthTable) -> Vec<bool> {
        (0..t.len())
            .map(|s| {
                let mut acc = false;
                let mut sub = s;
                loop {
                    acc ^= t.get(sub);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & s;
                }
                acc
            })
            .collect()
    }

    #[test]
    fn mobius_matches_subset_sum_definition() {
        for n in 0..=9u32 {
            let t = TruthTable::from_fn(n, |i| ((i * 2654435761usize) >> 7) & 1 == 1);
            let p = SparsePolyF2::from_truth_table(&t).unwrap();
            let coeffs = naive_anf(&t);
            for (i, &c) in coeffs.iter().enumerate() {
                assert_eq!(p.terms.contains(&Monomial::from_mask(i as u64)), c, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn standard_functions() {
        let x3 = SparsePolyF2::from_truth_table(&TruthTable::parity(3)).unwrap();
        assert_eq!(x3, parse_poly("x0 + x1 + x2", Some(3)).unwrap());
        assert_eq!(x3.degree(), 1);
        let and2 = SparsePolyF2::from_truth_table(&TruthTable::and_all(2)).unwrap();
        assert_eq!(and2, parse_poly("x0*x1", Some(2)).unwrap());
    }

    #[test]
    fn rejects_oversized_tables() {
        let p = SparsePolyF2::zero(25);
        assert!(matches!(p.to_truth_table(), Err(Error::ResourceCap { .. })));
    }
}
