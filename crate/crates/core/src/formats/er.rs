use std::io::Write;

use crate::cnf::{Clause, ClauseId, Lit, Var};
use crate::error::{Error, Position, Result};

use super::tokens::{Token, Tokens};

/// One step of an extended-resolution proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErStep {
    /// Introduces `var <-> (pivot | (lits[0] & ... & lits[k-1]))`, occupying the
    /// `k + 2` ids starting at the step id (see [`extension_clauses`]).
    Extend { var: Var, pivot: Lit, lits: Vec<Lit> },
    /// Derives a clause subsumed-or-equal to `claimed` by folding resolution over the
    /// antecedents from left to right.
    Chain {
        claimed: Clause,
        antecedents: Vec<ClauseId>,
    },
    Delete(Vec<ClauseId>),
}

pub type ErDocument = Vec<(ClauseId, ErStep)>;

/// CNF of `x <-> (p | (l1 & ... & lk))`, in id order:
/// `{x, -p}`, `{x, -l1, ..., -lk}`, then `{-x, p, li}` for each `i`.
///
/// With `k = 0` the conjunction is empty (true), so this is `{x, -p}` and `{x}`.
pub fn extension_clauses(var: Var, pivot: Lit, lits: &[Lit]) -> Vec<Clause> {
    let x = var.positive();
    let mut family = Vec::with_capacity(lits.len() + 2);
    family.push(Clause::from_lits([x, !pivot]));
    family.push(Clause::from_lits(
        std::iter::once(x).chain(lits.iter().map(|&l| !l)),
    ));
    for &l in lits {
        family.push(Clause::from_lits([!x, pivot, l]));
    }
    family
}

fn error(token: &Token, message: impl Into<String>) -> Error {
    Error::parse(Position::Line(token.line), message)
}

fn literal(token: &Token) -> Result<Lit> {
    let value = token.int()?;
    Lit::from_dimacs(value).map_err(|_| error(token, format!("malformed literal {}", value)))
}

fn id_list<'a>(tokens: &mut Tokens<'a>, at: &Token<'a>) -> Result<Vec<ClauseId>> {
    let mut ids = Vec::new();
    loop {
        let t = tokens.next().ok_or_else(|| error(at, "unterminated id list"))?;
        let value = t.int()?;
        if value == 0 {
            return Ok(ids);
        }
        if value < 0 {
            return Err(error(&t, format!("negative clause id {}", value)));
        }
        ids.push(ClauseId(value as u64));
    }
}

/// Parses an ER proof.
///
/// Ids of extension and chain steps must increase, with an extension reserving one
/// id per clause of its family. An extension variable must exceed every variable the
/// document mentioned before it.
pub fn parse_er(input: &[u8]) -> Result<ErDocument> {
    let mut steps = Vec::new();
    let mut tokens = Tokens::new(input);
    let mut next_free: Option<u64> = None;
    let mut max_var = 0u32;

    while let Some(id_token) = tokens.next() {
        let value = id_token.int()?;
        if value <= 0 {
            return Err(error(&id_token, format!("invalid step id {}", value)));
        }
        let id = ClauseId(value as u64);
        let first = tokens.next().ok_or_else(|| error(&id_token, "truncated step"))?;

        if first.is(b"d") {
            steps.push((id, ErStep::Delete(id_list(&mut tokens, &first)?)));
            continue;
        }
        if let Some(next) = next_free {
            if id.0 < next {
                return Err(error(&id_token, format!("step id {} collides with an earlier step", id)));
            }
        }

        if first.is(b"e") {
            let var_token = tokens.next().ok_or_else(|| error(&first, "truncated extension"))?;
            let var_value = var_token.int()?;
            let var = u32::try_from(var_value)
                .ok()
                .and_then(|v| Var::new(v).ok())
                .ok_or_else(|| error(&var_token, format!("invalid extension variable {}", var_value)))?;
            let pivot_token = tokens.next().ok_or_else(|| error(&first, "truncated extension"))?;
            let pivot = literal(&pivot_token)?;
            let mut lits = Vec::new();
            loop {
                let t = tokens.next().ok_or_else(|| error(&first, "unterminated extension"))?;
                if t.int()? == 0 {
                    break;
                }
                lits.push(literal(&t)?);
            }
            let mentioned = lits
                .iter()
                .chain(std::iter::once(&pivot))
                .map(|l| l.var().index())
                .max()
                .unwrap_or(0)
                .max(max_var);
            if var.index() <= mentioned {
                return Err(error(&var_token, format!("extension variable {} is not fresh", var)));
            }
            max_var = var.index();
            next_free = Some(id.0 + lits.len() as u64 + 2);
            steps.push((id, ErStep::Extend { var, pivot, lits }));
            continue;
        }

        let mut lits = Vec::new();
        let mut token = first;
        loop {
            if token.int()? == 0 {
                break;
            }
            lits.push(literal(&token)?);
            token = tokens.next().ok_or_else(|| error(&id_token, "unterminated clause"))?;
        }
        let antecedents = id_list(&mut tokens, &id_token)?;
        if antecedents.is_empty() {
            return Err(error(&id_token, "chain step without antecedents"));
        }
        let claimed = Clause::from_lits(lits);
        if let Some(var) = claimed.max_var() {
            max_var = max_var.max(var.index());
        }
        next_free = Some(id.0 + 1);
        steps.push((id, ErStep::Chain { claimed, antecedents }));
    }
    Ok(steps)
}

pub fn write_er(document: &[(ClauseId, ErStep)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (id, step) in document {
        write!(out, "{}", id).unwrap();
        match step {
            ErStep::Extend { var, pivot, lits } => {
                write!(out, " e {} {}", var, pivot).unwrap();
                for lit in lits {
                    write!(out, " {}", lit).unwrap();
                }
                out.extend_from_slice(b" 0\n");
            }
            ErStep::Chain {
                claimed,
                antecedents,
            } => {
                for lit in claimed.lits() {
                    write!(out, " {}", lit).unwrap();
                }
                out.extend_from_slice(b" 0");
                for antecedent in antecedents {
                    write!(out, " {}", antecedent).unwrap();
                }
                out.extend_from_slice(b" 0\n");
            }
            ErStep::Delete(ids) => {
                out.extend_from_slice(b" d");
                for target in ids {
                    write!(out, " {}", target).unwrap();
                }
                out.extend_from_slice(b" 0\n");
            }
        }
    }
    out
}
