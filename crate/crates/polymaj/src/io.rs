//! Input formats: hex truth tables, netlists and formula files.
//!
//! A hex truth table lists the `2^n` output bits most significant first,
//! so the last digit holds the outputs on inputs 3, 2, 1, 0 (in that
//! order). `MAJ_3` is `e8` and `OR_2` is `e`.

use std::fs;
use std::path::Path;

use polymaj_core::circuit::{parse_formula, parse_netlist};
use polymaj_core::{CircuitDag, Formula, TruthTable};

use crate::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn load_netlist(path: &Path) -> Result<CircuitDag> {
    Ok(parse_netlist(&read_text(path)?)?)
}

pub fn load_formula(path: &Path) -> Result<Formula> {
    Ok(parse_formula(&read_text(path)?)?)
}

/// Parses a big-endian hex truth table. Without `vars`, `n` is inferred
/// from the digit count (one digit means `n = 2`); with it, the digits
/// beyond `2^n` bits must be zero.
pub fn parse_hex_table(text: &str, vars: Option<u32>) -> Result<TruthTable> {
    let s = text.trim();
    let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    let digits: Vec<u8> = s
        .chars()
        .filter(|c| *c != '_')
        .map(|c| c.to_digit(16).map(|d| d as u8).ok_or_else(|| Error::Usage(format!("invalid hex digit `{c}`"))))
        .collect::<Result<_>>()?;
    if digits.is_empty() {
        return Err(Error::Usage("empty truth table".into()));
    }
    let n = match vars {
        Some(n) => n,
        None => {
            let bits = digits.len() * 4;
            if !bits.is_power_of_two() {
                return Err(Error::Usage(format!("{} hex digits is not 2^n bits; pass --vars", digits.len())));
            }
            bits.trailing_zeros()
        }
    };
    if n > 30 {
        return Err(Error::Usage(format!("{n} variables is too many for a hex table")));
    }
    let len = 1usize << n;
    let need = len.div_ceil(4);
    if digits.len() > need && digits[..digits.len() - need].iter().any(|&d| d != 0) {
        return Err(Error::Usage(format!("truth table has more than 2^{n} bits")));
    }
    let mut t = TruthTable::zeros(n);
    for (k, &d) in digits.iter().rev().enumerate() {
        for b in 0..4 {
            let i = 4 * k + b;
            if d >> b & 1 == 1 {
                if i >= len {
                    return Err(Error::Usage(format!("truth table has more than 2^{n} bits")));
                }
                t.set(i, true);
            }
        }
    }
    Ok(t)
}

/// Inverse of [`parse_hex_table`], with `max(1, 2^n / 4)` digits.
pub fn format_hex_table(t: &TruthTable) -> String {
    let digits = (t.len() / 4).max(1);
    (0..digits)
        .rev()
        .map(|k| {
            let d = (0..4).filter(|&b| 4 * k + b < t.len() && t.get(4 * k + b)).fold(0u32, |acc, b| acc | 1 << b);
            char::from_digit(d, 16).expect("nibble")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_tables() {
        assert_eq!(parse_hex_table("e8", None).unwrap(), TruthTable::majority(3));
        assert_eq!(parse_hex_table("e", None).unwrap(), TruthTable::or_all(2));
        assert_eq!(parse_hex_table("0x2", Some(1)).unwrap(), TruthTable::var(1, 0));
        assert_eq!(format_hex_table(&TruthTable::majority(3)), "e8");
        assert_eq!(format_hex_table(&TruthTable::var(1, 0)), "2");
        assert_eq!(format_hex_table(&TruthTable::parity(4)), "6996");
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(parse_hex_table("", None).is_err());
        assert!(parse_hex_table("e8g", None).is_err());
        assert!(parse_hex_table("abc", None).is_err());
        assert!(parse_hex_table("e", Some(1)).is_err());
        assert!(parse_hex_table("10e8", Some(3)).is_err());
        assert_eq!(parse_hex_table("00e8", Some(3)).unwrap(), TruthTable::majority(3));
    }

    #[test]
    fn roundtrip_random() {
        let mut w = 0x9e37_79b9_7f4a_7c15u64;
        for n in 0..9u32 {
            w = w.rotate_left(17).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            let t = TruthTable::from_fn(n, |i| (w.rotate_left(i as u32) & 1) == 1);
            assert_eq!(parse_hex_table(&format_hex_table(&t), Some(n)).unwrap(), t);
        }
    }
}
