//! Text form: `x0*x3 + x1 + 1`, zero written `0`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{Monomial, SparsePolyF2};
use crate::error::{Error, ParseError, ParseErrorKind, Result};

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (i, v) in self.vars().iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

impl fmt::Display for SparsePolyF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, m) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn err(column: usize, msg: &str) -> Error {
    ParseError::new(1, column, ParseErrorKind::Syntax(msg.to_string())).into()
}

/// Parses a polynomial. Monomials may come in any order and repeats cancel.
/// With `n = None` the variable count is one past the largest index.
pub fn parse_poly(text: &str, n: Option<u32>) -> Result<SparsePolyF2> {
    let mut monomials = Vec::new();
    let mut offset = 0;
    let mut max_var = None;
    for term in text.split('+') {
        let column = offset + term.len() - term.trim_start().len() + 1;
        offset += term.len() + 1;
        let term = term.trim();
        if term.is_empty() {
            return Err(err(column, "empty term"));
        }
        let mut vars = Vec::new();
        let mut constant = None;
        for factor in term.split('*') {
            let factor = factor.trim();
            match factor {
                "1" => constant = Some(constant.unwrap_or(true)),
                "0" => constant = Some(false),
                _ => {
                    let v: u32 = factor
                        .strip_prefix('x')
                        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                        .and_then(|d| d.parse().ok())
                        .ok_or_else(|| err(column, "expected x<i>, 0 or 1"))?;
                    max_var = max_var.max(Some(v));
                    vars.push(v);
                }
            }
        }
        if constant != Some(false) {
            monomials.push(Monomial::new(vars));
        }
    }
    let needed = max_var.map_or(0, |v| v + 1);
    let n = n.unwrap_or(needed);
    if needed > n {
        return Err(Error::DimensionMismatch { left: n as usize, right: needed as usize });
    }
    SparsePolyF2::from_monomials(n, monomials)
}

impl FromStr for SparsePolyF2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn canonical_output() {
        let p = parse_poly("x1*x0 + 1 + x2 + x0*x0", Some(4)).unwrap();
        assert_eq!(p.to_string(), "1 + x0 + x2 + x0*x1");
        assert_eq!(SparsePolyF2::zero(3).to_string(), "0");
        assert_eq!(parse_poly("x0 + x0", None).unwrap().to_string(), "0");
        assert_eq!(parse_poly("0", None).unwrap().num_vars(), 0);
    }

    #[test]
    fn roundtrip_and_errors() {
        let p: SparsePolyF2 = "x3*x7 + x2 + 1".parse().unwrap();
        assert_eq!(p.num_vars(), 8);
        assert_eq!(p.to_string().parse::<SparsePolyF2>().unwrap(), p);
        assert!(parse_poly("x0 + ", None).is_err());
        assert!(parse_poly("y1", None).is_err());
        assert!(parse_poly("x5", Some(3)).is_err());
    }
}
