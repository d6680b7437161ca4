use alloc::string::String;
use alloc::vec::Vec;

use crate::circuit::GateKind;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("arity mismatch: expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operation needs a single-output circuit, got {0} outputs")]
    MultiOutput(usize),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("parameter {name} = {value} out of range ({expected})")]
    OutOfRange { name: &'static str, value: f64, expected: &'static str },
    #[error("resource cap exceeded: {what} needs {requested}, limit is {limit}")]
    ResourceCap { what: String, requested: f64, limit: f64 },
    #[error("plan is not synthesizable at level {level}: {reason}")]
    NotSynthesizable { level: usize, reason: String },
    #[error("no valid circuit after {tries} tries (failures per level: {histogram:?})")]
    Exhausted { tries: usize, histogram: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate kind `{0}`")]
    UnknownKind(String),
    #[error("undefined reference `{0}`")]
    UndefinedReference(String),
    #[error("cycle through `{0}`")]
    Cycle(String),
    #[error("`{0}` defined twice")]
    DuplicateDefinition(String),
    #[error("{kind} gate with fan-in {got}")]
    FanIn { kind: GateKind, got: usize },
    #[error("fan-in-1 gate feeding another gate")]
    FanInOneChain,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }
}
