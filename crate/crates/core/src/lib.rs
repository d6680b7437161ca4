//! Core algorithms for bounded-depth boolean circuits over the basis
//! {AND, OR, NOT, XOR}: an IR with bit-parallel evaluation, sparse F2
//! polynomials in algebraic normal form, a compiler from formulas to
//! probabilistic polynomials with certified degree bounds, a randomized
//! synthesizer of monotone approximate-majority circuits, and exact
//! oracles used to check all of the above.
//!
//! The crate is `no_std` and only needs `alloc`. File IO, parallel drivers
//! and the command-line front end live in the `polymaj` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod compiler;
mod error;
pub mod gen;
mod math;
pub mod poly;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod truth;
pub mod verify;

pub use circuit::{CircuitDag, Formula, Gate, GateId, GateKind, InputBlock};
pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use poly::{Monomial, SparsePolyF2};
pub use truth::TruthTable;
