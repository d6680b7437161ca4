//! Line-oriented netlist format.
//!
//! ```text
//! # comment
//! input x0
//! input x1
//! g1 = AND x0 x1
//! output g1
//! ```
//!
//! Operands must be defined on an earlier line. `CONST0`/`CONST1` take no
//! operands.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use super::{CircuitDag, Gate, GateId, GateKind};
use crate::error::{ParseError, ParseErrorKind, Result};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if ch == '=' {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
            out.push(Token { text: &line[i..i + 1], column: i + 1 });
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Def<'a> {
    name: &'a str,
    line: usize,
    column: usize,
    kind: GateKind,
    operands: Vec<(&'a str, usize)>,
}

fn syntax(line: usize, column: usize, msg: &str) -> ParseError {
    ParseError::new(line, column, ParseErrorKind::Syntax(msg.to_string()))
}

fn check_name(tok: &Token<'_>, line: usize) -> core::result::Result<(), ParseError> {
    if is_name(tok.text) {
        Ok(())
    } else {
        Err(syntax(line, tok.column, "invalid name"))
    }
}

/// Parses netlist source into a validated [`CircuitDag`].
pub fn parse_netlist(text: &str) -> Result<CircuitDag> {
    let mut defs: Vec<Def<'_>> = Vec::new();
    let mut outputs: Vec<(&str, usize, usize)> = Vec::new();
    let mut by_name: BTreeMap<&str, usize> = BTreeMap::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks = tokens(body);
        let Some(first) = toks.first() else { continue };
        let def = match first.text {
            "input" | "output" => {
                if toks.len() != 2 {
                    return Err(syntax(line, first.column, "expected exactly one name").into());
                }
                check_name(&toks[1], line)?;
                if first.text == "output" {
                    outputs.push((toks[1].text, line, toks[1].column));
                    continue;
                }
                Def { name: toks[1].text, line, column: toks[1].column, kind: GateKind::Input, operands: Vec::new() }
            }
            _ => {
                check_name(first, line)?;
                if toks.len() < 3 || toks[1].text != "=" {
                    return Err(syntax(line, first.column, "expected `<name> = <KIND> <name>+`").into());
                }
                let kind = GateKind::from_name(toks[2].text).filter(|k| *k != GateKind::Input).ok_or_else(|| {
                    ParseError::new(line, toks[2].column, ParseErrorKind::UnknownKind(toks[2].text.to_string()))
                })?;
                let ops = &toks[3..];
                if !kind.accepts_fan_in(ops.len()) {
                    return Err(
                        ParseError::new(line, toks[2].column, ParseErrorKind::FanIn { kind, got: ops.len() }).into()
                    );
                }
                for t in ops {
                    check_name(t, line)?;
                }
                Def {
                    name: first.text,
                    line,
                    column: first.column,
                    kind,
                    operands: ops.iter().map(|t| (t.text, t.column)).collect(),
                }
            }
        };
        if by_name.insert(def.name, defs.len()).is_some() {
            return Err(
                ParseError::new(line, def.column, ParseErrorKind::DuplicateDefinition(def.name.to_string())).into()
            );
        }
        defs.push(def);
    }

    let mut ids: BTreeMap<&str, GateId> = BTreeMap::new();
    let mut gates = Vec::with_capacity(defs.len());
    let mut next_var = 0u32;
    for (pos, def) in defs.iter().enumerate() {
        let mut ops = Vec::with_capacity(def.operands.len());
        for &(name, column) in &def.operands {
            match ids.get(name) {
                Some(&id) => ops.push(id),
                None => {
                    let kind = match by_name.get(name) {
                        Some(&later) if reaches(&defs, &by_name, later, pos) => ParseErrorKind::Cycle(name.to_string()),
                        _ => ParseErrorKind::UndefinedReference(name.to_string()),
                    };
                    return Err(ParseError::new(def.line, column, kind).into());
                }
            }
        }
        let gate = if def.kind == GateKind::Input {
            next_var += 1;
            Gate::Input(next_var - 1)
        } else {
            Gate::with_operands(def.kind, ops).expect("arity checked while reading")
        };
        ids.insert(def.name, gates.len() as GateId);
        gates.push(gate);
    }

    let mut outs = Vec::with_capacity(outputs.len());
    for (name, line, column) in outputs {
        let id = ids
            .get(name)
            .ok_or_else(|| ParseError::new(line, column, ParseErrorKind::UndefinedReference(name.to_string())))?;
        outs.push(*id);
    }
    CircuitDag::new(gates, outs)
}

/// Whether definition `from` transitively reads definition `target`.
fn reaches(defs: &[Def<'_>], by_name: &BTreeMap<&str, usize>, from: usize, target: usize) -> bool {
    let mut stack = alloc::vec![from];
    let mut seen = alloc::vec![false; defs.len()];
    while let Some(d) = stack.pop() {
        if d == target {
            return true;
        }
        if core::mem::replace(&mut seen[d], true) {
            continue;
        }
        stack.extend(defs[d].operands.iter().filter_map(|(n, _)| by_name.get(n).copied()));
    }
    false
}

impl CircuitDag {
    fn operand_name(&self, id: GateId) -> String {
        match self.gate(id) {
            Gate::Input(v) => alloc::format!("x{v}"),
            _ => alloc::format!("g{id}"),
        }
    }

    /// Canonical netlist: inputs `x<i>` in variable order, then gates
    /// `g<id>` in id order, then outputs.
    pub fn to_netlist(&self) -> String {
        let mut s = String::new();
        for v in 0..self.num_inputs() {
            let _ = writeln!(s, "input x{v}");
        }
        for (id, g) in self.gates().iter().enumerate() {
            if matches!(g, Gate::Input(_)) {
                continue;
            }
            let _ = write!(s, "g{id} = {}", g.kind());
            for &op in g.operands() {
                let _ = write!(s, " {}", self.operand_name(op));
            }
            s.push('\n');
        }
        for &o in self.outputs() {
            let _ = writeln!(s, "output {}", self.operand_name(o));
        }
        s
    }
}

impl fmt::Display for CircuitDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_netlist())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::gen::{random_dag, DagShape};
    use crate::rng;
    use rand::Rng;

    fn kind_of(text: &str) -> ParseErrorKind {
        match parse_netlist(text) {
            Err(Error::Parse(e)) => e.kind,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_single_gate() {
        let c = parse_netlist("input x0\ninput x1\ng1 = AND x0 x1\noutput g1").unwrap();
        assert_eq!(c.num_inputs(), 2);
        assert_eq!(c.size(), 1);
        assert_eq!(c.depth(), 1);
    }

    #[test]
    fn not_with_two_operands_is_fan_in_error() {
        assert_eq!(kind_of("g1 = NOT x0 x1"), ParseErrorKind::FanIn { kind: GateKind::Not, got: 2 });
    }

    #[test]
    fn forward_reference_is_undefined() {
        let text = "input a\ng2 = AND a g3\ng3 = OR a a\noutput g2";
        assert_eq!(kind_of(text), ParseErrorKind::UndefinedReference("g3".into()));
    }

    #[test]
    fn mutual_reference_is_cycle() {
        let text = "input a\ng2 = AND a g3\ng3 = OR a g2\noutput g2";
        assert_eq!(kind_of(text), ParseErrorKind::Cycle("g3".into()));
        assert_eq!(kind_of("input a\ng = AND a g\noutput g"), ParseErrorKind::Cycle("g".into()));
    }

    #[test]
    fn diagnostics_carry_positions() {
        match parse_netlist("input a\n\n  g = FOO a\n") {
            Err(Error::Parse(e)) => {
                assert_eq!((e.line, e.column), (3, 7));
                assert_eq!(e.kind, ParseErrorKind::UnknownKind("FOO".into()));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(kind_of("input 3x"), ParseErrorKind::Syntax(_)));
        assert!(matches!(kind_of("input a\ninput a"), ParseErrorKind::DuplicateDefinition(_)));
        assert!(matches!(kind_of("input a\noutput b"), ParseErrorKind::UndefinedReference(_)));
    }

    #[test]
    fn comments_constants_and_lowercase_kinds() {
        let c = parse_netlist("# header\ninput a # first\nk = CONST1\ng = and a k\noutput g\n").unwrap();
        assert_eq!(c.eval(&[true]).unwrap(), [true]);
        assert_eq!(c.size(), 1);
    }

    #[test]
    fn serialize_then_reparse_is_isomorphic() {
        let mut r = rng::seeded(3);
        for _ in 0..100 {
            let n = r.gen_range(1..=8);
            let c = random_dag(&mut r, &DagShape { inputs: n, max_size: 14, max_depth: 5, outputs: 2 });
            let text = c.to_netlist();
            let back = parse_netlist(&text).unwrap();
            assert_eq!(back.size(), c.size());
            assert_eq!(back.depth(), c.depth());
            assert_eq!(back.to_netlist(), parse_netlist(&back.to_netlist()).unwrap().to_netlist());
            for k in 0..c.outputs().len() {
                assert_eq!(back.truth_table(k).unwrap(), c.truth_table(k).unwrap());
            }
        }
    }
}
