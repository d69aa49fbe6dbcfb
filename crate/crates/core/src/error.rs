use std::fmt;

use crate::checkers::RejectReason;
use crate::cnf::{ClauseId, Lit};

/// Where in an input a parse error was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Line(usize),
    Byte(usize),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Line(line) => write!(f, "line {}", line),
            Position::Byte(offset) => write!(f, "byte {}", offset),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Error {
    #[error("malformed literal {0}")]
    MalformedLiteral(i64),
    #[error("parse error at {position}: {message}")]
    Parse { position: Position, message: String },
    #[error("invalid resolution: pivot {pivot} does not clash between the premises")]
    InvalidResolution { pivot: Lit },
    #[error("unknown clause id {0}")]
    UnknownClause(ClauseId),
    #[error("clause id {id} is not fresh (next free id is {next})")]
    StaleClauseId { id: ClauseId, next: ClauseId },
    #[error("pivot {0} is not a literal of the clause")]
    PivotNotInClause(Lit),
    #[error("oracle range exceeded: {vars} variables (cap {cap})")]
    OracleRange { vars: usize, cap: usize },
    #[error("forward check rejected step {step}: {reason}")]
    ForwardRejected { step: usize, reason: RejectReason },
    #[error("translated step {step} failed its local check: {reason}")]
    TranslationInvariantViolation { step: usize, reason: RejectReason },
}

impl Error {
    pub(crate) fn parse(position: Position, message: impl Into<String>) -> Error {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
