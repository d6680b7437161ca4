//! Probabilistic polynomials for formulas.
//!
//! AND/OR gates are approximated by random parities (OR of `k` random
//! subset parities, AND by duality), errors are driven down by majority
//! votes over independent copies, and a formula is compiled bottom-up with
//! child error budgets proportional to child size.

mod bounds;
mod ledger;
mod sample;

use alloc::boxed::Box;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::circuit::{Formula, GateKind};
use crate::error::{Error, Result};
use crate::math::{ceil_odd, exp, log};

pub use bounds::{check_key_inequality, formula_size_lower_bound, theoretical_degree};
pub use ledger::{DegreeLedger, LedgerRow};
pub use sample::{Draw, ErrorProfile, MAX_TABLE_SAMPLE_VARS};

/// Degree-amplification constant of error reduction: `t <= C1 * ceil(log2(1/eps))`.
pub const C1: f64 = 6.0;
/// Constant of the degree bound, at least `20 * C1`.
pub const C2: f64 = 174.0;

/// One AND/OR/XOR gate and how it is approximated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateApproximator {
    pub kind: GateKind,
    pub fan_in: usize,
    pub epsilon: f64,
    /// Number of random parity factors; 0 when the gate is computed exactly.
    pub k: u32,
    pub exact: bool,
}

impl GateApproximator {
    /// Probability of a wrong value on an input where the gate is not
    /// at its identity-like value; 0 for exact gates.
    pub fn error(&self) -> f64 {
        if self.exact {
            0.0
        } else {
            1.0 / (1u64 << self.k) as f64
        }
    }

    /// Degree as a polynomial in the gate's inputs.
    pub fn degree(&self) -> u64 {
        if self.exact {
            1
        } else {
            self.k as u64
        }
    }
}

/// Smallest `k` with `2^-k <= eps`, i.e. `ceil(log2(1/eps))`.
fn factor_count(eps: f64) -> u32 {
    let mut k = 0;
    while 1.0 / (1u64 << k) as f64 > eps {
        k += 1;
    }
    k
}

/// Approximator for a `kind` gate of fan-in `m` at error `eps`.
///
/// XOR and fan-in-1 AND/OR are exact.
pub fn razborov_gate_recipe(kind: GateKind, m: usize, eps: f64) -> Result<GateApproximator> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange { name: "epsilon", value: eps, expected: "0 < epsilon < 1" });
    }
    if !matches!(kind, GateKind::And | GateKind::Or | GateKind::Xor) || m == 0 {
        return Err(Error::InvalidCircuit(alloc::format!("cannot approximate {kind} with fan-in {m}")));
    }
    let exact = kind == GateKind::Xor || m == 1;
    Ok(GateApproximator { kind, fan_in: m, epsilon: eps, k: if exact { 0 } else { factor_count(eps) }, exact })
}

/// Number of majority copies for target error `eps`: the smallest odd
/// integer `>= 4 ln(1/eps) + 1`.
pub fn reduction_copies(eps: f64) -> u64 {
    ceil_odd(4.0 * log(1.0 / eps) + 1.0)
}

/// Hoeffding bound on the error of a majority of `t` copies each wrong
/// with probability at most 1/8.
pub fn majority_error_bound(t: u64) -> f64 {
    exp(-9.0 * t as f64 / 32.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum RecipeNode {
    Var {
        var: u32,
    },
    Const {
        value: bool,
    },
    Not {
        child: Box<RecipeNode>,
    },
    Gate {
        approx: GateApproximator,
        /// Error budget assigned to each child.
        budgets: Vec<f64>,
        children: Vec<RecipeNode>,
    },
    /// Majority of `copies` independent samples of `child`.
    Reduce {
        copies: u64,
        target: f64,
        child: Box<RecipeNode>,
    },
}

impl RecipeNode {
    /// Certified upper bound on the degree of every sample.
    pub fn degree_bound(&self) -> u64 {
        match self {
            RecipeNode::Var { .. } => 1,
            RecipeNode::Const { .. } => 0,
            RecipeNode::Not { child } => child.degree_bound(),
            RecipeNode::Gate { approx, children, .. } => {
                approx.degree() * children.iter().map(RecipeNode::degree_bound).max().unwrap_or(0)
            }
            RecipeNode::Reduce { copies, child, .. } => copies * child.degree_bound(),
        }
    }

    /// Certified upper bound on the per-input error probability.
    pub fn error(&self) -> f64 {
        match self {
            RecipeNode::Var { .. } | RecipeNode::Const { .. } => 0.0,
            RecipeNode::Not { child } => child.error(),
            RecipeNode::Gate { approx, children, .. } => {
                approx.error() + children.iter().map(RecipeNode::error).sum::<f64>()
            }
            RecipeNode::Reduce { copies, .. } => majority_error_bound(*copies),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.error() == 0.0
    }
}

/// Wraps `r` (error at most 1/8) in a majority vote reaching error `eps`.
pub fn error_reduce(r: RecipeNode, eps: f64) -> Result<RecipeNode> {
    if !(eps > 0.0 && eps < 0.125) {
        return Err(Error::OutOfRange { name: "epsilon", value: eps, expected: "0 < epsilon < 1/8" });
    }
    if r.error() > 0.125 {
        return Err(Error::OutOfRange { name: "recipe error", value: r.error(), expected: "at most 1/8" });
    }
    Ok(RecipeNode::Reduce { copies: reduction_copies(eps), target: eps, child: Box::new(r) })
}

/// A compiled formula: the recipe tree plus its certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbPolyRecipe {
    pub num_vars: u32,
    pub size: u64,
    pub depth: u32,
    pub degree_bound: u64,
    pub error: f64,
    pub root: RecipeNode,
    pub ledger: DegreeLedger,
}

/// Compiles `f` into a probabilistic polynomial of error at most 1/8.
///
/// Gates over exact children are approximated at 1/8. Otherwise each
/// child of size `s_i` is brought to error `s_i/(16 s)` (by majority
/// voting when needed) and the output gate is approximated at 1/16.
pub fn compile_formula(f: &Formula) -> Result<ProbPolyRecipe> {
    f.check_fan_in_chains().map_err(|k| Error::InvalidCircuit(alloc::format!("{k}")))?;
    let mut ledger = DegreeLedger::new(C1, C2);
    let mut next_id = 0;
    let root = compile_node(f, &mut ledger, &mut next_id)?;
    let size = f.size();
    let depth = f.depth();
    let degree_bound = root.degree_bound();
    ledger.push_root(size, depth, degree_bound, f.gate_count());
    Ok(ProbPolyRecipe { num_vars: f.num_vars(), size, depth, degree_bound, error: root.error(), root, ledger })
}

fn compile_node(f: &Formula, ledger: &mut DegreeLedger, next_id: &mut usize) -> Result<RecipeNode> {
    let id = *next_id;
    *next_id += 1;
    let (kind, children) = match f {
        Formula::Var(v) => return Ok(RecipeNode::Var { var: *v }),
        Formula::Const(b) => return Ok(RecipeNode::Const { value: *b }),
        Formula::Not(c) => return Ok(RecipeNode::Not { child: Box::new(compile_node(c, ledger, next_id)?) }),
        Formula::And(v) => (GateKind::And, v),
        Formula::Or(v) => (GateKind::Or, v),
        Formula::Xor(v) => (GateKind::Xor, v),
    };
    let mut compiled = Vec::with_capacity(children.len());
    let mut child_ids = Vec::with_capacity(children.len());
    for c in children {
        child_ids.push(*next_id);
        compiled.push(compile_node(c, ledger, next_id)?);
    }
    if compiled.iter().all(RecipeNode::is_exact) {
        let approx = razborov_gate_recipe(kind, children.len(), 0.125)?;
        return Ok(RecipeNode::Gate { approx, budgets: alloc::vec![0.0; children.len()], children: compiled });
    }
    let s = f.size();
    let mut budgets = Vec::with_capacity(children.len());
    let mut reduced = Vec::with_capacity(children.len());
    for ((c, r), cid) in children.iter().zip(compiled).zip(child_ids) {
        let s_i = c.size();
        let budget = s_i as f64 / (16 * s) as f64;
        let r = if r.error() > budget { error_reduce(r, budget)? } else { r };
        let copies = match &r {
            RecipeNode::Reduce { copies, .. } => *copies,
            _ => 1,
        };
        ledger.push_child(LedgerRow {
            node_id: cid,
            parent_id: id,
            s_i,
            s,
            epsilon: budget,
            copies,
            degree: r.degree_bound(),
            bound: theoretical_degree(s_i as f64, c.depth().saturating_sub(1), C2),
            gates: c.gate_count(),
        });
        budgets.push(budget);
        reduced.push(r);
    }
    let approx = razborov_gate_recipe(kind, children.len(), 0.0625)?;
    Ok(RecipeNode::Gate { approx, budgets, children: reduced })
}
