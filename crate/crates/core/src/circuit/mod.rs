//! Circuit and formula IR.
//!
//! A [`CircuitDag`] is a topologically ordered gate list: every gate only
//! reads gates with smaller ids. Size counts non-input, non-constant gates;
//! depth counts gates on the longest input-to-output path.

mod block;
mod formula;
mod netlist;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::truth::{self, TruthTable};

pub use block::InputBlock;
pub use formula::{parse_formula, unfold_to_formula, Formula};
pub use netlist::parse_netlist;

pub type GateId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Input,
    Const0,
    Const1,
    And,
    Or,
    Not,
    Xor,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Input => "INPUT",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Not => "NOT",
            GateKind::Xor => "XOR",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [GateKind::Input, GateKind::Const0, GateKind::Const1, GateKind::And, GateKind::Or, GateKind::Not, GateKind::Xor]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
    }

    /// Whether `fan_in` operands are legal for this kind.
    pub fn accepts_fan_in(self, fan_in: usize) -> bool {
        match self {
            GateKind::Input | GateKind::Const0 | GateKind::Const1 => fan_in == 0,
            GateKind::Not => fan_in == 1,
            GateKind::And | GateKind::Or | GateKind::Xor => fan_in >= 1,
        }
    }

    /// Counted by size and depth.
    pub fn is_logic(self) -> bool {
        !matches!(self, GateKind::Input | GateKind::Const0 | GateKind::Const1)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    /// Reads variable `x_i`.
    Input(u32),
    Const(bool),
    And(Vec<GateId>),
    Or(Vec<GateId>),
    Not(GateId),
    Xor(Vec<GateId>),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Input(_) => GateKind::Input,
            Gate::Const(false) => GateKind::Const0,
            Gate::Const(true) => GateKind::Const1,
            Gate::And(_) => GateKind::And,
            Gate::Or(_) => GateKind::Or,
            Gate::Not(_) => GateKind::Not,
            Gate::Xor(_) => GateKind::Xor,
        }
    }

    pub fn operands(&self) -> &[GateId] {
        match self {
            Gate::Input(_) | Gate::Const(_) => &[],
            Gate::Not(a) => core::slice::from_ref(a),
            Gate::And(v) | Gate::Or(v) | Gate::Xor(v) => v,
        }
    }

    /// Builds a gate of `kind` over `operands`, checking the arity rule.
    pub fn with_operands(kind: GateKind, operands: Vec<GateId>) -> Option<Gate> {
        if !kind.accepts_fan_in(operands.len()) {
            return None;
        }
        Some(match kind {
            GateKind::Input => return None,
            GateKind::Const0 => Gate::Const(false),
            GateKind::Const1 => Gate::Const(true),
            GateKind::And => Gate::And(operands),
            GateKind::Or => Gate::Or(operands),
            GateKind::Xor => Gate::Xor(operands),
            GateKind::Not => Gate::Not(operands[0]),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDag {
    gates: Vec<Gate>,
    num_inputs: u32,
    outputs: Vec<GateId>,
}

impl CircuitDag {
    /// Validates topological order, arities and input numbering.
    ///
    /// Input gates must read distinct variables `0..n` where `n` is the
    /// number of input gates.
    pub fn new(gates: Vec<Gate>, outputs: Vec<GateId>) -> Result<Self> {
        let mut seen_vars = Vec::new();
        for (id, g) in gates.iter().enumerate() {
            if !g.kind().accepts_fan_in(g.operands().len()) {
                return Err(invalid(alloc::format!("gate {id}: {} with fan-in {}", g.kind(), g.operands().len())));
            }
            if let Some(&bad) = g.operands().iter().find(|&&op| op as usize >= id) {
                return Err(invalid(alloc::format!("gate {id} reads gate {bad}, which does not precede it")));
            }
            if let Gate::Input(v) = g {
                seen_vars.push(*v);
            }
        }
        let num_inputs = seen_vars.len() as u32;
        seen_vars.sort_unstable();
        if seen_vars.iter().enumerate().any(|(i, &v)| v != i as u32) {
            return Err(invalid(String::from("input gates must read distinct variables 0..n")));
        }
        if let Some(&bad) = outputs.iter().find(|&&o| o as usize >= gates.len()) {
            return Err(invalid(alloc::format!("output refers to missing gate {bad}")));
        }
        Ok(CircuitDag { gates, num_inputs, outputs })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id as usize]
    }

    pub fn num_inputs(&self) -> u32 {
        self.num_inputs
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    /// Number of logic gates (inputs and constants excluded).
    pub fn size(&self) -> usize {
        self.gates.iter().filter(|g| g.kind().is_logic()).count()
    }

    /// Logic-gate depth of every gate.
    pub fn gate_depths(&self) -> Vec<u32> {
        let mut depth = vec![0u32; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            if g.kind().is_logic() {
                depth[id] = 1 + g.operands().iter().map(|&op| depth[op as usize]).max().unwrap_or(0);
            }
        }
        depth
    }

    /// Largest logic-gate depth over the outputs.
    pub fn depth(&self) -> u32 {
        let d = self.gate_depths();
        self.outputs.iter().map(|&o| d[o as usize]).max().unwrap_or(0)
    }

    /// Only AND/OR gates (plus inputs and constants).
    pub fn is_monotone(&self) -> bool {
        self.gates.iter().all(|g| !matches!(g, Gate::Not(_) | Gate::Xor(_)))
    }

    /// Scalar evaluation of the outputs.
    pub fn eval(&self, x: &[bool]) -> Result<Vec<bool>> {
        let values = self.eval_all(x)?;
        Ok(self.outputs.iter().map(|&o| values[o as usize]).collect())
    }

    /// Scalar evaluation of every gate.
    pub fn eval_all(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.num_inputs as usize {
            return Err(Error::ArityMismatch { expected: self.num_inputs as usize, got: x.len() });
        }
        let mut v = vec![false; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            v[id] = match g {
                Gate::Input(i) => x[*i as usize],
                Gate::Const(b) => *b,
                Gate::And(ops) => ops.iter().all(|&o| v[o as usize]),
                Gate::Or(ops) => ops.iter().any(|&o| v[o as usize]),
                Gate::Not(o) => !v[*o as usize],
                Gate::Xor(ops) => ops.iter().fold(false, |acc, &o| acc ^ v[o as usize]),
            };
        }
        Ok(v)
    }

    /// Bit-parallel evaluation: one word per output, lane `j` holding the
    /// output on the block's `j`-th assignment. Unused lanes are zero.
    pub fn eval_block(&self, block: &InputBlock) -> Result<Vec<u64>> {
        let v = self.eval_block_all(block)?;
        Ok(self.outputs.iter().map(|&o| v[o as usize]).collect())
    }

    /// Bit-parallel evaluation of every gate.
    pub fn eval_block_all(&self, block: &InputBlock) -> Result<Vec<u64>> {
        let mut v = vec![0u64; self.gates.len()];
        self.eval_words_into(block.words(), block.lane_mask(), &mut v)?;
        Ok(v)
    }

    /// Evaluates on raw per-variable words, writing one word per gate.
    pub fn eval_words_into(&self, inputs: &[u64], lane_mask: u64, out: &mut [u64]) -> Result<()> {
        if inputs.len() != self.num_inputs as usize {
            return Err(Error::ArityMismatch { expected: self.num_inputs as usize, got: inputs.len() });
        }
        assert_eq!(out.len(), self.gates.len());
        for id in 0..self.gates.len() {
            let w = match &self.gates[id] {
                Gate::Input(i) => inputs[*i as usize],
                Gate::Const(b) => {
                    if *b {
                        !0
                    } else {
                        0
                    }
                }
                Gate::And(ops) => ops.iter().fold(!0u64, |acc, &o| acc & out[o as usize]),
                Gate::Or(ops) => ops.iter().fold(0u64, |acc, &o| acc | out[o as usize]),
                Gate::Not(o) => !out[*o as usize],
                Gate::Xor(ops) => ops.iter().fold(0u64, |acc, &o| acc ^ out[o as usize]),
            };
            out[id] = w & lane_mask;
        }
        Ok(())
    }

    /// Exhaustive truth table of output `k`.
    pub fn truth_table(&self, k: usize) -> Result<TruthTable> {
        let n = self.num_inputs;
        truth::check_table_vars(n)?;
        let out = *self.outputs.get(k).ok_or(Error::ArityMismatch { expected: self.outputs.len(), got: k + 1 })?;
        let mut t = TruthTable::zeros(n);
        let mut vals = vec![0u64; self.gates.len()];
        let mut inputs = vec![0u64; n as usize];
        let words = t.len().div_ceil(64);
        let mask = if t.len() >= 64 { !0 } else { (1u64 << t.len()) - 1 };
        for w in 0..words {
            for (j, word) in inputs.iter_mut().enumerate() {
                *word = if j < 6 {
                    truth::VAR_PATTERNS[j]
                } else if (w >> (j - 6)) & 1 == 1 {
                    !0
                } else {
                    0
                };
            }
            self.eval_words_into(&inputs, mask, &mut vals)?;
            t.words_mut()[w] = vals[out as usize];
        }
        Ok(t)
    }

    /// Marks the gates in the cone of the outputs.
    pub fn reachable(&self) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        for &o in &self.outputs {
            live[o as usize] = true;
        }
        for id in (0..self.gates.len()).rev() {
            if live[id] {
                for &op in self.gates[id].operands() {
                    live[op as usize] = true;
                }
            }
        }
        live
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidCircuit(msg)
}

/// Incremental construction of a [`CircuitDag`].
#[derive(Debug, Default, Clone)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    num_inputs: u32,
    outputs: Vec<GateId>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder preloaded with `n` input gates, ids `0..n`.
    pub fn with_inputs(n: u32) -> Self {
        let mut b = Self::new();
        for _ in 0..n {
            b.input();
        }
        b
    }

    pub fn input(&mut self) -> GateId {
        let v = self.num_inputs;
        self.num_inputs += 1;
        self.push(Gate::Input(v))
    }

    pub fn constant(&mut self, b: bool) -> GateId {
        self.push(Gate::Const(b))
    }

    pub fn and(&mut self, ops: Vec<GateId>) -> GateId {
        self.push(Gate::And(ops))
    }

    pub fn or(&mut self, ops: Vec<GateId>) -> GateId {
        self.push(Gate::Or(ops))
    }

    pub fn xor(&mut self, ops: Vec<GateId>) -> GateId {
        self.push(Gate::Xor(ops))
    }

    pub fn not(&mut self, op: GateId) -> GateId {
        self.push(Gate::Not(op))
    }

    pub fn push(&mut self, g: Gate) -> GateId {
        self.gates.push(g);
        (self.gates.len() - 1) as GateId
    }

    pub fn output(&mut self, id: GateId) {
        self.outputs.push(id);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn build(self) -> Result<CircuitDag> {
        CircuitDag::new(self.gates, self.outputs)
    }
}

/// MAJ of an assignment: 1 iff strictly more than half of the bits are 1.
pub fn majority(x: &[bool]) -> bool {
    2 * x.iter().filter(|&&b| b).count() > x.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn gate_circuit(kind: GateKind, n: u32) -> CircuitDag {
        let mut b = CircuitBuilder::with_inputs(n);
        let g = b.push(Gate::with_operands(kind, (0..n).collect()).unwrap());
        b.output(g);
        b.build().unwrap()
    }

    #[test]
    fn scalar_gate_semantics() {
        assert_eq!(gate_circuit(GateKind::And, 3).eval(&[true; 3]).unwrap(), [true]);
        assert_eq!(gate_circuit(GateKind::Xor, 3).eval(&[true, true, false]).unwrap(), [false]);
        assert_eq!(gate_circuit(GateKind::Or, 2).eval(&[false; 2]).unwrap(), [false]);
    }

    #[test]
    fn eval_rejects_wrong_arity() {
        let c = gate_circuit(GateKind::And, 3);
        assert!(matches!(c.eval(&[true]), Err(Error::ArityMismatch { expected: 3, got: 1 })));
    }

    #[test]
    fn majority_examples() {
        assert!(majority(&[true, true, false]));
        assert!(!majority(&[true, true, false, false]));
        assert!(majority(&[true]));
        assert!(!majority(&[]));
    }

    #[test]
    fn size_and_depth_follow_conventions() {
        let mut b = CircuitBuilder::with_inputs(3);
        let c1 = b.constant(true);
        let a = b.and(alloc::vec![0, 1]);
        let n = b.not(a);
        let o = b.or(alloc::vec![n, 2, c1]);
        b.output(o);
        let c = b.build().unwrap();
        assert_eq!(c.size(), 3);
        assert_eq!(c.depth(), 3);
        assert!(!c.is_monotone());
    }

    #[test]
    fn rejects_forward_references_and_bad_arity() {
        assert!(CircuitDag::new(alloc::vec![Gate::And(alloc::vec![1]), Gate::Input(0)], alloc::vec![0]).is_err());
        assert!(CircuitDag::new(alloc::vec![Gate::Input(0), Gate::And(alloc::vec![])], alloc::vec![1]).is_err());
        assert!(CircuitDag::new(alloc::vec![Gate::Input(1)], alloc::vec![0]).is_err());
    }

    #[test]
    fn truth_table_matches_scalar_eval() {
        let mut r = rng::seeded(5);
        for _ in 0..20 {
            let n = r.gen_range(1..9);
            let c = crate::gen::random_dag(
                &mut r,
                &crate::gen::DagShape { inputs: n, max_size: 10, max_depth: 4, outputs: 1 },
            );
            let t = c.truth_table(0).unwrap();
            for idx in 0..t.len() {
                assert_eq!(t.get(idx), c.eval(&truth::assignment(n, idx)).unwrap()[0]);
            }
        }
    }
}
