use std::io::Write;

use crate::cnf::{Clause, Lit, MAX_VAR};
use crate::error::{Error, Position, Result};

use super::dimacs::write_clause_line;
use super::tokens::Tokens;
use super::ProofStep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DratEncoding {
    Text,
    Binary,
}

/// Binary proofs start with an `a`/`d` tag byte and contain NUL terminators;
/// text proofs never contain NUL.
pub fn detect_drat_encoding(input: &[u8]) -> DratEncoding {
    match input.first() {
        Some(b'a') | Some(b'd') if input.contains(&0) => DratEncoding::Binary,
        _ => DratEncoding::Text,
    }
}

pub fn parse_drat(input: &[u8], encoding: Option<DratEncoding>) -> Result<Vec<ProofStep>> {
    match encoding.unwrap_or_else(|| detect_drat_encoding(input)) {
        DratEncoding::Text => parse_drat_text(input),
        DratEncoding::Binary => parse_drat_binary(input),
    }
}

pub fn parse_drat_text(input: &[u8]) -> Result<Vec<ProofStep>> {
    let mut steps = Vec::new();
    let mut lits: Vec<Lit> = Vec::new();
    let mut deleting = false;
    let mut open_line = None;
    for token in Tokens::new(input) {
        if token.is(b"d") {
            if open_line.is_some() {
                return Err(Error::parse(Position::Line(token.line), "deletion marker inside a clause"));
            }
            deleting = true;
            open_line = Some(token.line);
            continue;
        }
        let value = token.int()?;
        if value == 0 {
            let clause = Clause::from_lits(lits.drain(..));
            steps.push(if deleting {
                ProofStep::Delete(clause)
            } else {
                ProofStep::Add(clause)
            });
            deleting = false;
            open_line = None;
            continue;
        }
        let lit = Lit::from_dimacs(value)
            .map_err(|_| Error::parse(Position::Line(token.line), format!("malformed literal {}", value)))?;
        open_line.get_or_insert(token.line);
        lits.push(lit);
    }
    if let Some(line) = open_line {
        return Err(Error::parse(Position::Line(line), "unterminated proof step at end of input"));
    }
    Ok(steps)
}

pub fn parse_drat_binary(input: &[u8]) -> Result<Vec<ProofStep>> {
    let mut steps = Vec::new();
    let mut pos = 0;
    while pos < input.len() {
        let tag_offset = pos;
        let deleting = match input[pos] {
            b'a' => false,
            b'd' => true,
            other => {
                return Err(Error::parse(
                    Position::Byte(tag_offset),
                    format!("unknown step tag 0x{:02x}", other),
                ))
            }
        };
        pos += 1;
        let mut lits = Vec::new();
        loop {
            let start = pos;
            let mut value: u64 = 0;
            let mut shift = 0;
            loop {
                let &byte = input
                    .get(pos)
                    .ok_or_else(|| Error::parse(Position::Byte(pos), "truncated step"))?;
                pos += 1;
                value |= ((byte & 0x7f) as u64) << shift;
                if byte & 0x80 == 0 {
                    break;
                }
                shift += 7;
                if shift > 35 {
                    return Err(Error::parse(Position::Byte(start), "literal encoding too long"));
                }
            }
            if value == 0 {
                if pos - start > 1 {
                    return Err(Error::parse(Position::Byte(start), "zero literal payload"));
                }
                break;
            }
            if value == 1 || value >> 1 > MAX_VAR as u64 {
                return Err(Error::parse(
                    Position::Byte(start),
                    format!("invalid literal payload {}", value),
                ));
            }
            lits.push(Lit::from_code(value as usize));
        }
        let clause = Clause::from_lits(lits);
        steps.push(if deleting {
            ProofStep::Delete(clause)
        } else {
            ProofStep::Add(clause)
        });
    }
    Ok(steps)
}

pub fn write_drat_text(steps: &[ProofStep]) -> Vec<u8> {
    let mut out = Vec::new();
    for step in steps {
        if let ProofStep::Delete(_) = step {
            out.extend_from_slice(b"d ");
        }
        write_clause_line(&mut out, step.clause());
    }
    out
}

pub fn write_drat_binary(steps: &[ProofStep]) -> Vec<u8> {
    let mut out = Vec::new();
    for step in steps {
        out.push(if step.is_add() { b'a' } else { b'd' });
        for lit in step.clause().lits() {
            // 2 * var + sign, which is exactly the literal code
            let mut value = lit.code() as u64;
            while value >= 0x80 {
                out.push((value as u8 & 0x7f) | 0x80);
                value >>= 7;
            }
            out.write_all(&[value as u8]).unwrap();
        }
        out.push(0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(raw: &[i64]) -> Clause {
        Clause::from_dimacs(raw).unwrap()
    }

    #[test]
    fn text_unit_then_empty() {
        assert_eq!(
            parse_drat_text(b"1 0\n0\n").unwrap(),
            vec![ProofStep::Add(clause(&[1])), ProofStep::Add(Clause::empty())]
        );
    }

    #[test]
    fn text_deletion() {
        assert_eq!(
            parse_drat_text(b"d 1 2 0\n").unwrap(),
            vec![ProofStep::Delete(clause(&[1, 2]))]
        );
    }

    #[test]
    fn text_errors() {
        assert!(parse_drat_text(b"1 2").is_err());
        assert!(parse_drat_text(b"d").is_err());
        assert!(parse_drat_text(b"1 d 0").is_err());
        assert!(parse_drat_text(b"1 x 0").is_err());
    }

    #[test]
    fn binary_bytes() {
        let steps = vec![ProofStep::Add(clause(&[1, -2]))];
        assert_eq!(write_drat_binary(&steps), vec![0x61, 0x02, 0x05, 0x00]);
        assert_eq!(parse_drat_binary(&[0x61, 0x02, 0x05, 0x00]).unwrap(), steps);
    }

    #[test]
    fn binary_multibyte_literal() {
        // literal 100 -> u = 200 = 0xc8 -> [0xc8, 0x01]
        let steps = vec![ProofStep::Delete(clause(&[100, -64]))];
        let bytes = write_drat_binary(&steps);
        assert_eq!(bytes, vec![0x64, 0xc8, 0x01, 0x81, 0x01, 0x00]);
        assert_eq!(parse_drat_binary(&bytes).unwrap(), steps);
    }

    #[test]
    fn binary_errors_carry_offsets() {
        let at = |bytes: &[u8]| match parse_drat_binary(bytes) {
            Err(Error::Parse { position: Position::Byte(offset), .. }) => offset,
            other => panic!("expected a parse error, got {:?}", other),
        };
        assert_eq!(at(&[0x61, 0x02]), 2);
        assert_eq!(at(&[0x61, 0x02, 0x00, 0x78]), 3);
        assert_eq!(at(&[0x61, 0x01, 0x00]), 1);
        assert_eq!(at(&[0x61, 0x80, 0x00]), 1);
        assert_eq!(at(&[0x61, 0x82]), 2);
    }

    #[test]
    fn detection() {
        assert_eq!(detect_drat_encoding(b"d 1 0\n"), DratEncoding::Text);
        assert_eq!(detect_drat_encoding(b"1 0\n"), DratEncoding::Text);
        assert_eq!(detect_drat_encoding(&[0x64, 0x20, 0x00]), DratEncoding::Binary);
        assert_eq!(detect_drat_encoding(&[0x61, 0x02, 0x00]), DratEncoding::Binary);
    }

    #[test]
    fn text_writer() {
        let steps = vec![
            ProofStep::Add(clause(&[1])),
            ProofStep::Delete(clause(&[2, -3])),
            ProofStep::Add(Clause::empty()),
        ];
        assert_eq!(write_drat_text(&steps), b"1 0\nd 2 -3 0\n0\n".to_vec());
    }
}
