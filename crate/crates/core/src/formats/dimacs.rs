use std::io::Write;

use crate::cnf::{Clause, Formula, Lit};
use crate::error::{Error, Position, Result};

use super::tokens::Tokens;

/// A parsed DIMACS file. Clause ids are `1..=clauses` in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimacs {
    pub formula: Formula,
    pub declared_vars: u32,
    pub declared_clauses: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DimacsOptions {
    /// Reject literals above the declared variable count instead of warning.
    pub strict: bool,
}

pub fn parse_dimacs(input: &[u8]) -> Result<Dimacs> {
    parse_dimacs_with(input, DimacsOptions::default())
}

pub fn parse_dimacs_with(input: &[u8], options: DimacsOptions) -> Result<Dimacs> {
    let mut tokens = Tokens::new(input);
    let header_error = |line| Error::parse(Position::Line(line), "expected header \"p cnf <vars> <clauses>\"");

    let p = tokens.next().ok_or_else(|| header_error(1))?;
    if !p.is(b"p") {
        return Err(header_error(p.line));
    }
    match tokens.next() {
        Some(t) if t.is(b"cnf") => {}
        _ => return Err(header_error(p.line)),
    }
    let mut count = |what: &str| -> Result<i64> {
        let t = tokens.next().ok_or_else(|| header_error(p.line))?;
        let value = t.int()?;
        if value < 0 || value > i32::MAX as i64 {
            return Err(Error::parse(Position::Line(t.line), format!("invalid {} count {}", what, value)));
        }
        Ok(value)
    };
    let declared_vars = count("variable")? as u32;
    let declared_clauses = count("clause")? as usize;

    let mut formula = Formula::new();
    formula.declare_vars(declared_vars);
    let mut current: Vec<Lit> = Vec::new();
    let mut open_line = None;
    for token in tokens.by_ref() {
        if token.is(b"%") {
            break;
        }
        let value = token.int()?;
        if value == 0 {
            formula.add_clause(Clause::from_lits(current.drain(..)));
            open_line = None;
            continue;
        }
        let lit = Lit::from_dimacs(value)
            .map_err(|_| Error::parse(Position::Line(token.line), format!("malformed literal {}", value)))?;
        if lit.var().index() > declared_vars {
            if options.strict {
                return Err(Error::parse(
                    Position::Line(token.line),
                    format!("literal {} exceeds the declared {} variables", value, declared_vars),
                ));
            }
            log::warn!(
                "line {}: literal {} exceeds the declared {} variables",
                token.line,
                value,
                declared_vars
            );
        }
        open_line.get_or_insert(token.line);
        current.push(lit);
    }
    if let Some(line) = open_line {
        return Err(Error::parse(Position::Line(line), "unterminated clause at end of input"));
    }
    if formula.len() != declared_clauses {
        log::warn!(
            "header declares {} clauses but {} were read",
            declared_clauses,
            formula.len()
        );
    }
    Ok(Dimacs {
        formula,
        declared_vars,
        declared_clauses,
    })
}

/// Writes the live clauses in id order. The header uses the formula's variable count.
pub fn write_dimacs(formula: &Formula) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.len()).unwrap();
    for (_, clause) in formula.iter() {
        write_clause_line(&mut out, clause);
    }
    out
}

pub(crate) fn write_clause_line(out: &mut Vec<u8>, clause: &Clause) {
    for lit in clause.lits() {
        write!(out, "{} ", lit).unwrap();
    }
    out.extend_from_slice(b"0\n");
}
