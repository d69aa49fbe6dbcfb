//! Parsers and writers for DIMACS CNF, DRAT (text and binary), LRAT and the ER proof format.
//!
//! All parsers read whitespace-separated tokens, so line breaks inside a step are
//! irrelevant. Writers emit one step per line. For every document `d`,
//! `parse(write(d)) == d`.

mod dimacs;
mod drat;
mod er;
mod lrat;
mod tokens;

pub use dimacs::{parse_dimacs, parse_dimacs_with, write_dimacs, Dimacs, DimacsOptions};
pub use drat::{
    detect_drat_encoding, parse_drat, parse_drat_binary, parse_drat_text, write_drat_binary,
    write_drat_text, DratEncoding,
};
pub use er::{extension_clauses, parse_er, write_er, ErDocument, ErStep};
pub use lrat::{parse_lrat, write_lrat, HintBlock, LratDocument, LratStep, RatGroup};

use crate::cnf::Clause;

/// One step of a DRAT proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofStep {
    Add(Clause),
    Delete(Clause),
}

impl ProofStep {
    pub fn clause(&self) -> &Clause {
        match self {
            ProofStep::Add(clause) | ProofStep::Delete(clause) => clause,
        }
    }

    pub fn is_add(&self) -> bool {
        matches!(self, ProofStep::Add(_))
    }
}
