use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng as _;

use super::plan::{PlanMode, SynthPlan, MAX_FAN_IN};
use crate::circuit::{CircuitDag, Gate, GateId, GateKind};
use crate::error::{Error, Result};
use crate::rng;

/// A synthesized circuit with the gate ranges of each level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthCircuit {
    pub circuit: CircuitDag,
    /// `levels[i - 1]` holds the gate ids of level `i`; the last range is
    /// the output gate.
    pub levels: Vec<Range<GateId>>,
    pub seed: u64,
}

impl SynthCircuit {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Builds the circuit for a synthesizable plan. Gate `j` of level `i`
/// draws `t_i` operands uniformly with replacement from level `i - 1`
/// (the inputs for level 1); repeated draws are merged.
pub fn synth(p: &SynthPlan, seed: u64) -> Result<SynthCircuit> {
    if p.mode == PlanMode::Textbook {
        if let Some(reason) = &p.reason {
            return Err(Error::NotSynthesizable { level: 1, reason: reason.clone() });
        }
    }
    for l in &p.levels {
        if l.width.is_nan() || l.width > p.max_width {
            return Err(Error::ResourceCap {
                what: alloc::format!("level {} width", l.level),
                requested: l.width,
                limit: p.max_width,
            });
        }
        if l.fan_in.is_nan() || l.fan_in > MAX_FAN_IN {
            return Err(Error::ResourceCap {
                what: alloc::format!("level {} fan-in", l.level),
                requested: l.fan_in,
                limit: MAX_FAN_IN,
            });
        }
    }
    let mut rng = rng::seeded(seed);
    let n = p.n as u32;
    let total: usize = n as usize + p.levels.iter().map(|l| l.width as usize).sum::<usize>();
    let mut gates = Vec::with_capacity(total);
    gates.extend((0..n).map(Gate::Input));
    let mut prev = 0..n;
    let mut levels = Vec::with_capacity(p.d);
    let mut draws = Vec::new();
    for spec in &p.levels {
        let start = gates.len() as GateId;
        let width = spec.width as u64;
        let fan_in = spec.fan_in as u64;
        for _ in 0..width {
            draws.clear();
            draws.extend((0..fan_in).map(|_| rng.gen_range(prev.clone())));
            draws.sort_unstable();
            draws.dedup();
            let ops = draws.clone();
            gates.push(match spec.kind {
                GateKind::And => Gate::And(ops),
                _ => Gate::Or(ops),
            });
        }
        let end = gates.len() as GateId;
        levels.push(start..end);
        prev = start..end;
    }
    let out = gates.len() as GateId - 1;
    let circuit = CircuitDag::new(gates, alloc::vec![out])?;
    Ok(SynthCircuit { circuit, levels, seed })
}
