use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::theoretical_degree;

/// One child edge of an inductive compiler step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    /// Pre-order index of the child in the formula.
    pub node_id: usize,
    pub parent_id: usize,
    /// Leaves under the child.
    pub s_i: u64,
    /// Leaves under the parent.
    pub s: u64,
    /// Error budget `s_i / (16 s)`.
    pub epsilon: f64,
    /// Majority copies (1 when the child already met its budget).
    pub copies: u64,
    /// Degree bound of the child after reduction.
    pub degree: u64,
    /// Theoretical bound for the child's own subformula.
    pub bound: f64,
    /// Gates under the child.
    pub gates: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeLedger {
    pub c1: f64,
    pub c2: f64,
    pub rows: Vec<LedgerRow>,
    pub size: u64,
    pub depth: u32,
    pub gates: u64,
    pub degree_bound: u64,
    pub theoretical_bound: f64,
}

impl DegreeLedger {
    pub(crate) fn new(c1: f64, c2: f64) -> Self {
        DegreeLedger { c1, c2, rows: Vec::new(), size: 0, depth: 0, gates: 0, degree_bound: 0, theoretical_bound: 0.0 }
    }

    pub(crate) fn push_child(&mut self, row: LedgerRow) {
        self.rows.push(row);
    }

    pub(crate) fn push_root(&mut self, size: u64, depth: u32, degree_bound: u64, gates: u64) {
        self.size = size;
        self.depth = depth;
        self.gates = gates;
        self.degree_bound = degree_bound;
        self.theoretical_bound = theoretical_degree(size as f64, depth.saturating_sub(1), self.c2);
        self.rows.sort_by_key(|r| r.node_id);
    }

    /// Rows including a leading root row (node 0, budget 1/8).
    pub fn table(&self) -> Vec<LedgerRow> {
        let mut out = Vec::with_capacity(self.rows.len() + 1);
        out.push(LedgerRow {
            node_id: 0,
            parent_id: 0,
            s_i: self.size,
            s: self.size,
            epsilon: 0.125,
            copies: 1,
            degree: self.degree_bound,
            bound: self.theoretical_bound,
            gates: self.gates,
        });
        out.extend(self.rows.iter().cloned());
        out
    }

    /// Problems found in the ledger: a child whose reduced degree exceeds
    /// the bound for the parent, or a parent whose budgets do not sum to 1/16.
    pub fn violations(&self) -> Vec<alloc::string::String> {
        let mut out = Vec::new();
        if self.degree_bound as f64 > self.theoretical_bound {
            out.push(alloc::format!("root degree {} exceeds bound {}", self.degree_bound, self.theoretical_bound));
        }
        let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
        for r in &self.rows {
            *sums.entry(r.parent_id).or_default() += r.epsilon;
            if r.epsilon * 16.0 * r.s as f64 - r.s_i as f64 > 1e-9 {
                out.push(alloc::format!("node {}: budget {} is not s_i/(16s)", r.node_id, r.epsilon));
            }
        }
        for (p, sum) in sums {
            if (sum - 0.0625).abs() > 1e-12 {
                out.push(alloc::format!("node {p}: child budgets sum to {sum}"));
            }
        }
        out
    }
}
