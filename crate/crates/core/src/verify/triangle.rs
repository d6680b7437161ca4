use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::SparsePolyF2;
use crate::truth::TruthTable;

use super::agree::MAX_EXACT_VARS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub n: u32,
    pub epsilon: f64,
    pub dist_p_maj: u64,
    pub dist_p_f: u64,
    pub dist_f_maj: u64,
    /// `dist(P, MAJ) <= dist(P, f) + dist(f, MAJ)`.
    pub triangle_ok: bool,
    /// `f` is within 1/4 of majority.
    pub f_is_am: bool,
    /// `P` is within `1/4 - eps` of `f`.
    pub p_approximates_f: bool,
    /// `P` is within `1/2 - eps` of majority.
    pub p_approximates_maj: bool,
    /// The two premises imply the conclusion.
    pub corollary_ok: bool,
}

/// Exact distance bookkeeping for "an approximation of an approximate
/// majority approximates majority".
pub fn triangle_corollary_check(f: &TruthTable, p: &SparsePolyF2, eps: f64) -> Result<TriangleReport> {
    let n = f.num_vars();
    if n > MAX_EXACT_VARS {
        return Err(Error::ResourceCap {
            what: alloc::format!("exact distances on {n} variables"),
            requested: n as f64,
            limit: MAX_EXACT_VARS as f64,
        });
    }
    if p.num_vars() != n {
        return Err(Error::DimensionMismatch { left: n as usize, right: p.num_vars() as usize });
    }
    let pt = p.to_truth_table()?;
    let maj = TruthTable::majority(n);
    let size = f.len() as f64;
    let dist_p_maj = pt.distance(&maj)?;
    let dist_p_f = pt.distance(f)?;
    let dist_f_maj = f.distance(&maj)?;
    let f_is_am = dist_f_maj as f64 <= size / 4.0;
    let p_approximates_f = dist_p_f as f64 <= (0.25 - eps) * size;
    let p_approximates_maj = dist_p_maj as f64 <= (0.5 - eps) * size;
    Ok(TriangleReport {
        n,
        epsilon: eps,
        dist_p_maj,
        dist_p_f,
        dist_f_maj,
        triangle_ok: dist_p_maj <= dist_p_f + dist_f_maj,
        f_is_am,
        p_approximates_f,
        p_approximates_maj,
        corollary_ok: !(f_is_am && p_approximates_f) || p_approximates_maj,
    })
}
