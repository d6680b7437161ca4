//! Formulas: fan-out-free circuits, written as s-expressions.
//!
//! ```text
//! expr := x<i> | 0 | 1 | (and expr+) | (or expr+) | (xor expr+) | (not expr)
//! ```
//!
//! Formula size is the number of leaves.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{CircuitDag, Gate, GateId, GateKind};
use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::truth::{self, TruthTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Var(u32),
    Const(bool),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Xor(Vec<Formula>),
}

impl Formula {
    pub fn kind(&self) -> GateKind {
        match self {
            Formula::Var(_) => GateKind::Input,
            Formula::Const(false) => GateKind::Const0,
            Formula::Const(true) => GateKind::Const1,
            Formula::Not(_) => GateKind::Not,
            Formula::And(_) => GateKind::And,
            Formula::Or(_) => GateKind::Or,
            Formula::Xor(_) => GateKind::Xor,
        }
    }

    pub fn children(&self) -> &[Formula] {
        match self {
            Formula::Var(_) | Formula::Const(_) => &[],
            Formula::Not(c) => core::slice::from_ref(c),
            Formula::And(v) | Formula::Or(v) | Formula::Xor(v) => v,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Formula::Var(_) | Formula::Const(_))
    }

    /// Number of leaves.
    pub fn size(&self) -> u64 {
        if self.is_leaf() {
            1
        } else {
            self.children().iter().map(Formula::size).sum()
        }
    }

    /// Number of gates (internal nodes).
    pub fn gate_count(&self) -> u64 {
        if self.is_leaf() {
            0
        } else {
            1 + self.children().iter().map(Formula::gate_count).sum::<u64>()
        }
    }

    /// Gates on the longest root-to-leaf path.
    pub fn depth(&self) -> u32 {
        if self.is_leaf() {
            0
        } else {
            1 + self.children().iter().map(Formula::depth).max().unwrap_or(0)
        }
    }

    /// One more than the largest variable index (0 without variables).
    pub fn num_vars(&self) -> u32 {
        match self {
            Formula::Var(i) => i + 1,
            Formula::Const(_) => 0,
            _ => self.children().iter().map(Formula::num_vars).max().unwrap_or(0),
        }
    }

    /// No NOT/XOR and no variable-free constants below gates are required;
    /// only the absence of NOT and XOR is checked.
    pub fn is_monotone(&self) -> bool {
        !matches!(self, Formula::Not(_) | Formula::Xor(_)) && self.children().iter().all(Formula::is_monotone)
    }

    /// Rejects AND/OR/XOR nodes of fan-in 1 that feed another gate.
    pub fn check_fan_in_chains(&self) -> core::result::Result<(), ParseErrorKind> {
        for c in self.children() {
            if matches!(c, Formula::And(v) | Formula::Or(v) | Formula::Xor(v) if v.len() == 1) {
                return Err(ParseErrorKind::FanInOneChain);
            }
            c.check_fan_in_chains()?;
        }
        Ok(())
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        match self {
            Formula::Var(i) => x[*i as usize],
            Formula::Const(b) => *b,
            Formula::Not(c) => !c.eval(x),
            Formula::And(v) => v.iter().all(|c| c.eval(x)),
            Formula::Or(v) => v.iter().any(|c| c.eval(x)),
            Formula::Xor(v) => v.iter().fold(false, |a, c| a ^ c.eval(x)),
        }
    }

    /// Truth table over `n >= num_vars()` variables.
    pub fn truth_table(&self, n: u32) -> Result<TruthTable> {
        truth::check_table_vars(n)?;
        if n < self.num_vars() {
            return Err(Error::DimensionMismatch { left: self.num_vars() as usize, right: n as usize });
        }
        Ok(self.table_rec(n))
    }

    fn table_rec(&self, n: u32) -> TruthTable {
        let combine = |v: &[Formula], init: TruthTable, op: fn(u64, u64) -> u64| {
            v.iter().fold(init, |mut acc, c| {
                let t = c.table_rec(n);
                acc.words_mut().iter_mut().zip(t.words()).for_each(|(a, b)| *a = op(*a, *b));
                acc
            })
        };
        match self {
            Formula::Var(i) => TruthTable::var(n, *i),
            Formula::Const(false) => TruthTable::zeros(n),
            Formula::Const(true) => TruthTable::ones(n),
            Formula::Not(c) => c.table_rec(n).complement(),
            Formula::And(v) => combine(v, TruthTable::ones(n), |a, b| a & b),
            Formula::Or(v) => combine(v, TruthTable::zeros(n), |a, b| a | b),
            Formula::Xor(v) => combine(v, TruthTable::zeros(n), |a, b| a ^ b),
        }
    }

    /// Equivalent single-output circuit with one gate per formula node.
    pub fn to_circuit(&self) -> CircuitDag {
        let mut b = super::CircuitBuilder::with_inputs(self.num_vars());
        let root = self.lower(&mut b);
        b.output(root);
        b.build().expect("formula lowering is well formed")
    }

    fn lower(&self, b: &mut super::CircuitBuilder) -> GateId {
        match self {
            Formula::Var(i) => *i,
            Formula::Const(c) => b.constant(*c),
            Formula::Not(c) => {
                let id = c.lower(b);
                b.not(id)
            }
            Formula::And(v) | Formula::Or(v) | Formula::Xor(v) => {
                let ops = v.iter().map(|c| c.lower(b)).collect();
                b.push(Gate::with_operands(self.kind(), ops).expect("fan-in >= 1"))
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self {
            Formula::Var(i) => return write!(f, "x{i}"),
            Formula::Const(b) => return write!(f, "{}", *b as u8),
            Formula::Not(_) => "not",
            Formula::And(_) => "and",
            Formula::Or(_) => "or",
            Formula::Xor(_) => "xor",
        };
        write!(f, "({op}")?;
        for c in self.children() {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
    End,
}

impl<'a> Lexer<'a> {
    fn column(&self, at: usize) -> usize {
        self.src[self.line_start..at].chars().count() + 1
    }

    fn err(&self, at: usize, kind: ParseErrorKind) -> ParseError {
        ParseError::new(self.line, self.column(at), kind)
    }

    /// Next token and its byte offset.
    fn next(&mut self) -> (Tok<'a>, usize) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b'\n' => {
                    self.pos += 1;
                    self.line += 1;
                    self.line_start = self.pos;
                }
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
        let start = self.pos;
        match bytes.get(self.pos) {
            None => (Tok::End, start),
            Some(b'(') => {
                self.pos += 1;
                (Tok::Open, start)
            }
            Some(b')') => {
                self.pos += 1;
                (Tok::Close, start)
            }
            Some(_) => {
                while self.pos < bytes.len()
                    && !bytes[self.pos].is_ascii_whitespace()
                    && !matches!(bytes[self.pos], b'(' | b')' | b';')
                {
                    self.pos += 1;
                }
                (Tok::Atom(&self.src[start..self.pos]), start)
            }
        }
    }
}

fn syntax(msg: &str) -> ParseErrorKind {
    ParseErrorKind::Syntax(msg.to_string())
}

fn parse_atom(atom: &str) -> Option<Formula> {
    match atom {
        "0" => Some(Formula::Const(false)),
        "1" => Some(Formula::Const(true)),
        _ => {
            let digits = atom.strip_prefix('x')?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            digits.parse().ok().map(Formula::Var)
        }
    }
}

fn parse_expr(lx: &mut Lexer<'_>) -> core::result::Result<Formula, ParseError> {
    let (tok, at) = lx.next();
    match tok {
        Tok::Atom(a) => parse_atom(a).ok_or_else(|| lx.err(at, syntax("expected variable x<i>"))),
        Tok::Close => Err(lx.err(at, syntax("unexpected `)`"))),
        Tok::End => Err(lx.err(at, syntax("unexpected end of input"))),
        Tok::Open => {
            let (op_tok, op_at) = lx.next();
            let Tok::Atom(op) = op_tok else {
                return Err(lx.err(op_at, syntax("expected operator")));
            };
            let kind = match op.to_ascii_lowercase().as_str() {
                "and" => GateKind::And,
                "or" => GateKind::Or,
                "xor" => GateKind::Xor,
                "not" => GateKind::Not,
                _ => return Err(lx.err(op_at, ParseErrorKind::UnknownKind(op.to_string()))),
            };
            let mut args = Vec::new();
            loop {
                let save = (lx.pos, lx.line, lx.line_start);
                match lx.next().0 {
                    Tok::Close => break,
                    Tok::End => return Err(lx.err(lx.pos, syntax("missing `)`"))),
                    _ => {
                        (lx.pos, lx.line, lx.line_start) = save;
                        args.push(parse_expr(lx)?);
                    }
                }
            }
            if !kind.accepts_fan_in(args.len()) {
                return Err(lx.err(op_at, ParseErrorKind::FanIn { kind, got: args.len() }));
            }
            Ok(match kind {
                GateKind::And => Formula::And(args),
                GateKind::Or => Formula::Or(args),
                GateKind::Xor => Formula::Xor(args),
                _ => Formula::Not(Box::new(args.pop().expect("fan-in 1"))),
            })
        }
    }
}

/// Parses one s-expression formula and checks the fan-in-1 chain rule.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut lx = Lexer { src: text, pos: 0, line: 1, line_start: 0 };
    let f = parse_expr(&mut lx)?;
    let (tok, at) = lx.next();
    if !matches!(tok, Tok::End) {
        return Err(lx.err(at, syntax("trailing input after formula")).into());
    }
    f.check_fan_in_chains().map_err(|k| ParseError::new(1, 1, k))?;
    Ok(f)
}

/// Unfolds a single-output circuit into a formula by duplicating every
/// shared gate once per path to the output.
pub fn unfold_to_formula(c: &CircuitDag) -> Result<Formula> {
    if c.outputs().len() != 1 {
        return Err(Error::MultiOutput(c.outputs().len()));
    }
    // Bottom-up memo of each gate's subformula; clones realize the duplication.
    let live = c.reachable();
    let mut memo: Vec<Option<Formula>> = vec![None; c.num_gates()];
    for (id, g) in c.gates().iter().enumerate() {
        if !live[id] {
            continue;
        }
        let sub = |op: &GateId| memo[*op as usize].clone().expect("operands precede");
        let f = match g {
            Gate::Input(v) => Formula::Var(*v),
            Gate::Const(b) => Formula::Const(*b),
            Gate::Not(o) => Formula::Not(Box::new(sub(o))),
            Gate::And(ops) => Formula::And(ops.iter().map(sub).collect()),
            Gate::Or(ops) => Formula::Or(ops.iter().map(sub).collect()),
            Gate::Xor(ops) => Formula::Xor(ops.iter().map(sub).collect()),
        };
        memo[id] = Some(f);
    }
    Ok(memo[c.outputs()[0] as usize].take().expect("output is live"))
}

impl From<&Formula> for String {
    fn from(f: &Formula) -> String {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::gen::{random_dag, random_formula, DagShape, FormulaShape};
    use crate::rng;
    use rand::Rng;

    #[test]
    fn parse_examples() {
        let f = parse_formula("(and x0 x1 x2)").unwrap();
        assert_eq!((f.depth(), f.size()), (1, 3));
        let g = parse_formula("(xor (and x0 x1) (or x2 x3))").unwrap();
        assert_eq!((g.depth(), g.size()), (2, 4));
        assert_eq!(g.gate_count(), 3);
        assert_eq!(g.num_vars(), 4);
    }

    #[test]
    fn fan_in_one_chain_rejected() {
        match parse_formula("(and (and x0))") {
            Err(Error::Parse(e)) => assert_eq!(e.kind, ParseErrorKind::FanInOneChain),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("(and x0)").is_ok());
        assert!(parse_formula("(and (not x0) x1)").is_ok());
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_formula("(and x0\n  (or x1 y2))") {
            Err(Error::Parse(e)) => {
                assert_eq!((e.line, e.column), (2, 10));
                assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("(and x0").is_err());
        assert!(parse_formula("(nand x0 x1)").is_err());
        assert!(parse_formula("(not x0 x1)").is_err());
        assert!(parse_formula("(or)").is_err());
        assert!(parse_formula("x0 x1").is_err());
    }

    #[test]
    fn display_roundtrip() {
        let mut r = rng::seeded(9);
        for _ in 0..200 {
            let shape = FormulaShape { vars: r.gen_range(1..=10), max_size: 32, max_depth: 4 };
            let f = random_formula(&mut r, &shape);
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn unfold_tree_keeps_gate_count() {
        let f = parse_formula("(or (and x0 x1) (not (xor x2 x3)))").unwrap();
        let c = f.to_circuit();
        let g = unfold_to_formula(&c).unwrap();
        assert_eq!(g, f);
        assert_eq!(g.gate_count() as usize, c.size());
    }

    #[test]
    fn unfold_duplicates_shared_gate() {
        let mut b = CircuitBuilder::with_inputs(3);
        let shared = b.and(alloc::vec![0, 1]);
        let p1 = b.or(alloc::vec![shared, 2]);
        let p2 = b.xor(alloc::vec![shared, 2]);
        let p3 = b.not(shared);
        let top = b.or(alloc::vec![p1, p2, p3]);
        b.output(top);
        let c = b.build().unwrap();
        let f = unfold_to_formula(&c).unwrap();
        let count = |f: &Formula| {
            fn walk(f: &Formula, acc: &mut usize) {
                if let Formula::And(_) = f {
                    *acc += 1;
                }
                f.children().iter().for_each(|c| walk(c, acc));
            }
            let mut n = 0;
            walk(f, &mut n);
            n
        };
        assert_eq!(count(&f), 3);
        assert_eq!(f.depth(), c.depth());
        assert_eq!(f.truth_table(3).unwrap(), c.truth_table(0).unwrap());
    }

    #[test]
    fn unfold_rejects_multi_output() {
        let mut r = rng::seeded(1);
        let c = random_dag(&mut r, &DagShape { inputs: 3, max_size: 5, max_depth: 2, outputs: 2 });
        assert!(matches!(unfold_to_formula(&c), Err(Error::MultiOutput(2))));
    }

    #[test]
    fn unfold_respects_simulation_bound() {
        let mut r = rng::seeded(21);
        for _ in 0..100 {
            let n = r.gen_range(1..=10);
            let c = random_dag(&mut r, &DagShape { inputs: n, max_size: 12, max_depth: 4, outputs: 1 });
            let f = unfold_to_formula(&c).unwrap();
            let s = c.size() as u64;
            let d = c.depth();
            assert!(f.gate_count() <= s.pow(d.saturating_sub(1)));
            assert_eq!(f.depth(), d);
            assert_eq!(f.truth_table(n).unwrap(), c.truth_table(0).unwrap());
        }
    }
}
