//! Random instance generators for tests, benchmarks and acceptance runs.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{CircuitBuilder, CircuitDag, Formula, Gate, GateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DagShape {
    pub inputs: u32,
    /// Logic gates, at least 1.
    pub max_size: usize,
    pub max_depth: u32,
    pub outputs: usize,
}

/// Random DAG over AND/OR/XOR/NOT with 1..=`max_size` logic gates.
///
/// Operands of a gate are distinct. The last gate is always an output, so
/// single-output DAGs tend to use most of their gates.
pub fn random_dag<R: Rng + ?Sized>(r: &mut R, shape: &DagShape) -> CircuitDag {
    assert!(shape.inputs >= 1 && shape.max_size >= 1 && shape.max_depth >= 1 && shape.outputs >= 1);
    let mut b = CircuitBuilder::with_inputs(shape.inputs);
    let mut depth: Vec<u32> = alloc::vec![0; shape.inputs as usize];
    let size = r.gen_range(1..=shape.max_size);
    for _ in 0..size {
        let eligible: Vec<GateId> =
            (0..depth.len() as GateId).filter(|&g| depth[g as usize] < shape.max_depth).collect();
        let gate = if r.gen_bool(0.15) {
            Gate::Not(*eligible.choose(r).expect("inputs are eligible"))
        } else {
            let m = r.gen_range(1..=eligible.len().min(4));
            let ops: Vec<GateId> = eligible.choose_multiple(r, m).copied().collect();
            match r.gen_range(0..3) {
                0 => Gate::And(ops),
                1 => Gate::Or(ops),
                _ => Gate::Xor(ops),
            }
        };
        let d = 1 + gate.operands().iter().map(|&o| depth[o as usize]).max().unwrap_or(0);
        b.push(gate);
        depth.push(d);
    }
    let last = (depth.len() - 1) as GateId;
    b.output(last);
    let logic: Vec<GateId> = (shape.inputs..last).collect();
    for _ in 1..shape.outputs {
        let o = logic.choose(r).copied().unwrap_or(last);
        b.output(o);
    }
    b.build().expect("generated DAG is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaShape {
    pub vars: u32,
    /// Leaves, at least 1.
    pub max_size: u64,
    pub max_depth: u32,
}

/// Random formula over variables `0..vars` with at most `max_size` leaves
/// and depth at most `max_depth`. AND/OR/XOR nodes have fan-in >= 2, so
/// the result never violates the fan-in-1 chain rule.
pub fn random_formula<R: Rng + ?Sized>(r: &mut R, shape: &FormulaShape) -> Formula {
    assert!(shape.vars >= 1 && shape.max_size >= 1);
    let leaves = r.gen_range(1..=shape.max_size);
    grow(r, shape.vars, leaves, shape.max_depth, false)
}

fn grow<R: Rng + ?Sized>(r: &mut R, vars: u32, leaves: u64, depth: u32, under_not: bool) -> Formula {
    if depth == 0 || leaves == 1 && (under_not || r.gen_bool(0.7)) {
        return Formula::Var(r.gen_range(0..vars));
    }
    if !under_not && r.gen_bool(0.1) {
        return Formula::Not(Box::new(grow(r, vars, leaves, depth - 1, true)));
    }
    if leaves == 1 {
        return Formula::Var(r.gen_range(0..vars));
    }
    let m = r.gen_range(2..=leaves.min(5));
    // Split `leaves` into `m` positive parts.
    let mut cuts: Vec<u64> = (1..leaves).collect::<Vec<_>>().choose_multiple(r, (m - 1) as usize).copied().collect();
    cuts.sort_unstable();
    cuts.push(leaves);
    let mut prev = 0;
    let children = cuts
        .into_iter()
        .map(|c| {
            let part = c - prev;
            prev = c;
            grow(r, vars, part, depth - 1, false)
        })
        .collect();
    match r.gen_range(0..3) {
        0 => Formula::And(children),
        1 => Formula::Or(children),
        _ => Formula::Xor(children),
    }
}

/// Uniform assignment of `n` bits.
pub fn random_assignment<R: Rng + ?Sized>(r: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| r.gen()).collect()
}

/// Uniform assignment of `n` bits with exactly `w` ones.
pub fn assignment_of_weight<R: Rng + ?Sized>(r: &mut R, n: usize, w: usize) -> Vec<bool> {
    assert!(w <= n);
    let mut x: Vec<bool> = (0..n).map(|i| i < w).collect();
    x.shuffle(r);
    x
}
