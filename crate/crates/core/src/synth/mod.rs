//! Randomized monotone circuits for approximate majority.
//!
//! Level 1 ANDs a few random inputs, so its gates fire with a density that
//! depends on the input weight. Each further level ORs or ANDs random
//! gates of the previous level, widening the gap between light and heavy
//! inputs. Levels alternate AND (odd) and OR (even); the last level is a
//! single gate.
//!
//! Sizes are tracked in natural-log scale because the textbook parameters
//! are astronomically large; such plans can be analyzed but not built.

mod bias;
mod build;
mod lemma;
mod plan;

pub use bias::{
    bias_recurrence, empirical_level_check, level_fractions, level_reports, resample_until_valid, BandRule, LevelCheck,
    LevelPrediction, LevelReport, Resampled,
};
pub use build::{synth, SynthCircuit};
pub use lemma::{
    check_technical_lemma, eps0_inequalities, gamma_bounds, gamma_sequence, tail_mass, LemmaPolarity, LemmaReport,
};
pub use plan::{plan, LevelSpec, Overrides, PlanMode, SideConditions, SynthPlan, DEFAULT_MAX_WIDTH, MAX_FAN_IN};

use crate::circuit::GateKind;

/// Gate kind of level `i` (1-based): AND on odd levels, OR on even ones.
pub fn level_kind(i: usize) -> GateKind {
    if i % 2 == 1 {
        GateKind::And
    } else {
        GateKind::Or
    }
}

/// Whether `|x|_1 = w` puts `x` in `N_eps` (`-1`), `Y_eps` (`+1`) or neither (0).
pub fn margin_class(n: u64, eps: f64, w: u64) -> i8 {
    let nf = n as f64;
    let off = eps / crate::math::sqrt(nf) * nf;
    let w = w as f64;
    if w <= nf / 2.0 - off {
        -1
    } else if w >= nf / 2.0 + off {
        1
    } else {
        0
    }
}
