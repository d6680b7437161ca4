use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::floor;
use crate::poly::{Monomial, SparsePolyF2};
use crate::truth::{TruthTable, VAR_PATTERNS};

/// Largest arity the exhaustive degree search accepts.
pub const MAX_DEGREE_VARS: u32 = 5;
/// Largest span the exhaustive search enumerates (2^26 candidates).
pub const MAX_SPAN_MONOMIALS: usize = 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeCertificate {
    pub n: u32,
    pub epsilon: f64,
    /// Allowed Hamming distance `floor(eps 2^n)`.
    pub budget: u64,
    pub degree: usize,
    pub witness: SparsePolyF2,
    pub distance: u64,
    /// Every span of lower degree was scanned completely.
    pub exhausted: bool,
}

/// Best candidate of a span scan: least distance, then least coefficient
/// vector read as an integer (bit `j` selects basis monomial `j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanBest {
    pub distance: u64,
    pub coeffs: u64,
}

impl SpanBest {
    pub const NONE: SpanBest = SpanBest { distance: u64::MAX, coeffs: u64::MAX };

    pub fn merge(self, other: SpanBest) -> SpanBest {
        if (other.distance, other.coeffs) < (self.distance, self.coeffs) {
            other
        } else {
            self
        }
    }
}

/// Monomials of degree at most `d` in `n` variables, graded-lex order,
/// with their truth tables.
pub fn span_basis(n: u32, d: usize) -> Vec<(Monomial, u64)> {
    assert!(n <= MAX_DEGREE_VARS);
    let full = if n == 6 { !0u64 } else { (1u64 << (1u32 << n)) - 1 };
    let mut out: Vec<(Monomial, u64)> = (0u64..1 << n)
        .filter(|m| m.count_ones() as usize <= d)
        .map(|m| {
            let table = (0..n).filter(|i| m >> i & 1 == 1).fold(full, |acc, i| acc & VAR_PATTERNS[i as usize]);
            (Monomial::from_mask(m), table)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Scans the Gray-code indices in `range` of the span of `basis` for the
/// candidate closest to `target`. Consecutive candidates differ in one
/// monomial, so each step costs one XOR and one popcount.
pub fn scan_span(target: u64, basis: &[u64], range: Range<u64>) -> SpanBest {
    let mut best = SpanBest::NONE;
    if range.is_empty() {
        return best;
    }
    let gray = |i: u64| i ^ (i >> 1);
    let g0 = gray(range.start);
    let mut cur = basis.iter().enumerate().filter(|(j, _)| g0 >> j & 1 == 1).fold(0u64, |acc, (_, &t)| acc ^ t);
    let mut i = range.start;
    loop {
        let dist = (cur ^ target).count_ones() as u64;
        if dist < best.distance || (dist == best.distance && gray(i) < best.coeffs) {
            best = SpanBest { distance: dist, coeffs: gray(i) };
            if dist == 0 {
                // The only distance-0 candidate is the ANF itself.
                return best;
            }
        }
        i += 1;
        if i == range.end {
            return best;
        }
        cur ^= basis[i.trailing_zeros() as usize];
    }
}

fn check_arity(f: &TruthTable) -> Result<()> {
    if f.num_vars() > MAX_DEGREE_VARS {
        return Err(Error::ResourceCap {
            what: alloc::format!("exhaustive degree search on {} variables", f.num_vars()),
            requested: f.num_vars() as f64,
            limit: MAX_DEGREE_VARS as f64,
        });
    }
    Ok(())
}

/// Least degree `D` such that some polynomial of degree at most `D` is
/// within `floor(eps 2^n)` of `f`, with the closest such polynomial.
pub fn min_approx_degree(f: &TruthTable, eps: f64) -> Result<DegreeCertificate> {
    min_approx_degree_with(f, eps, |target, basis| scan_span(target, basis, 0..1u64 << basis.len()))
}

/// As [`min_approx_degree`], with a caller-supplied full-span scanner
/// (used by the parallel driver).
pub fn min_approx_degree_with(
    f: &TruthTable,
    eps: f64,
    mut scan: impl FnMut(u64, &[u64]) -> SpanBest,
) -> Result<DegreeCertificate> {
    check_arity(f)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange { name: "epsilon", value: eps, expected: "0 <= epsilon <= 1" });
    }
    let n = f.num_vars();
    let budget = floor(eps * f.len() as f64) as u64;
    let target = f.words()[0];
    let anf = SparsePolyF2::from_truth_table(f)?;
    let anf_degree = if anf.is_zero() { 0 } else { anf.degree() };
    for d in 0..=n as usize {
        if d >= anf_degree {
            return Ok(DegreeCertificate {
                n,
                epsilon: eps,
                budget,
                degree: d,
                witness: anf,
                distance: 0,
                exhausted: true,
            });
        }
        let basis = span_basis(n, d);
        if basis.len() > MAX_SPAN_MONOMIALS {
            return Err(Error::ResourceCap {
                what: alloc::format!("degree-{d} span on {n} variables"),
                requested: basis.len() as f64,
                limit: MAX_SPAN_MONOMIALS as f64,
            });
        }
        let tables: Vec<u64> = basis.iter().map(|b| b.1).collect();
        let best = scan(target, &tables);
        if best.distance <= budget {
            let witness = SparsePolyF2::from_monomials(
                n,
                basis.iter().enumerate().filter(|(j, _)| best.coeffs >> j & 1 == 1).map(|(_, b)| b.0.clone()),
            )?;
            return Ok(DegreeCertificate {
                n,
                epsilon: eps,
                budget,
                degree: d,
                witness,
                distance: best.distance,
                exhausted: true,
            });
        }
    }
    unreachable!("the ANF has degree at most n")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmolenskyRow {
    pub n: u32,
    pub epsilon: f64,
    pub degree: usize,
}

/// Minimum approximate degree of `MAJ_n` for each `n`.
pub fn smolensky_table(ns: &[u32], eps: f64) -> Result<Vec<SmolenskyRow>> {
    ns.iter()
        .map(|&n| {
            let c = min_approx_degree(&TruthTable::majority(n), eps)?;
            Ok(SmolenskyRow { n, epsilon: eps, degree: c.degree })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn brute_min_distance(f: &TruthTable, d: usize) -> u64 {
        let basis = span_basis(f.num_vars(), d);
        (0u64..1 << basis.len())
            .map(|c| {
                let t = basis.iter().enumerate().filter(|(j, _)| c >> j & 1 == 1).fold(0, |a, (_, b)| a ^ b.1);
                (t ^ f.words()[0]).count_ones() as u64
            })
            .min()
            .unwrap()
    }

    #[test]
    fn or2_and_maj3() {
        // The constant 1 misses OR_2 only at 00, which the budget of one
        // error allows, so no linear term is needed.
        let c = min_approx_degree(&TruthTable::or_all(2), 0.25).unwrap();
        assert_eq!((c.degree, c.distance, c.budget), (0, 1, 1));
        assert_eq!(c.witness, SparsePolyF2::one(2));
        assert_eq!(brute_min_distance(&TruthTable::or_all(2), 0), 1);
        assert_eq!(min_approx_degree(&TruthTable::or_all(2), 0.2).unwrap().degree, 2);
        let c = min_approx_degree(&TruthTable::majority(3), 0.125).unwrap();
        assert_eq!((c.degree, c.budget), (2, 1));
        assert_eq!(brute_min_distance(&TruthTable::majority(3), 1), 2);
        assert_eq!(c.witness, parse_poly("x0*x1 + x0*x2 + x1*x2", Some(3)).unwrap());
    }

    #[test]
    fn maj5_regression() {
        // Frozen from the first exhaustive run; affine polynomials stay
        // at distance 10 from MAJ_5.
        let maj5 = TruthTable::majority(5);
        assert_eq!(brute_min_distance(&maj5, 1), 10);
        for (eps, want) in [(0.0, 4), (0.125, 2), (0.25, 2)] {
            assert_eq!(min_approx_degree(&maj5, eps).unwrap().degree, want);
        }
    }

    #[test]
    fn parity_is_linear() {
        for n in 1..=5 {
            for eps in [0.0, 0.1, 0.3] {
                assert!(min_approx_degree(&TruthTable::parity(n), eps).unwrap().degree <= 1);
            }
        }
    }

    #[test]
    fn gray_scan_matches_brute_force_and_partitions() {
        let f = TruthTable::from_words(4, alloc::vec![0x6b1d]).unwrap();
        for d in 0..=2 {
            let basis: Vec<u64> = span_basis(4, d).iter().map(|b| b.1).collect();
            let whole = scan_span(f.words()[0], &basis, 0..1 << basis.len());
            assert_eq!(whole.distance, brute_min_distance(&f, d));
            let len = 1u64 << basis.len();
            let parts = (0..5).map(|k| scan_span(f.words()[0], &basis, k * len / 5..(k + 1) * len / 5));
            assert_eq!(parts.fold(SpanBest::NONE, SpanBest::merge), whole);
        }
    }

    #[test]
    fn witness_distance_recomputes() {
        let mut seed = 0x1234_5678u64;
        for _ in 0..50 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let f = TruthTable::from_words(4, alloc::vec![seed >> 48]).unwrap();
            let mut prev = usize::MAX;
            for eps in [0.0, 0.0625, 0.125, 0.25, 0.5] {
                let c = min_approx_degree(&f, eps).unwrap();
                assert_eq!(c.witness.to_truth_table().unwrap().distance(&f).unwrap(), c.distance);
                assert!(c.distance <= c.budget && c.witness.degree() <= c.degree);
                assert!(c.degree <= prev);
                prev = c.degree;
            }
        }
    }

    #[test]
    fn exact_degree_is_anf_degree_on_three_vars() {
        for w in 0u64..256 {
            let f = TruthTable::from_words(3, alloc::vec![w]).unwrap();
            let anf = SparsePolyF2::from_truth_table(&f).unwrap();
            let want = if anf.is_zero() { 0 } else { anf.degree() };
            assert_eq!(min_approx_degree(&f, 0.0).unwrap().degree, want);
        }
    }

    #[test]
    fn table_starts_at_one() {
        let t = smolensky_table(&[1, 3], 0.125).unwrap();
        assert_eq!(t[0].degree, 1);
        assert_eq!(t[1].degree, 2);
        assert!(min_approx_degree(&TruthTable::zeros(6), 0.1).is_err());
    }
}
