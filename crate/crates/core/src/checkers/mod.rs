//! Whole-proof checkers for DRAT, LRAT and ER documents.

mod drat;
mod er;
mod lrat;

use std::fmt;

pub use drat::{check_drat, check_drat_traced};
pub use er::{check_er, ErChecker};
pub use lrat::check_lrat;

use crate::cnf::{Clause, ClauseId, Lit, Var};
use crate::formats::RatGroup;
use crate::propagate::PivotPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Flavor {
    /// Deletions are applied literally.
    Specified,
    /// Deletions of clauses that are unit, or the reason of a top-level
    /// assignment, are ignored.
    #[default]
    Operational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckMode {
    pub flavor: Flavor,
    pub pivot_policy: PivotPolicy,
}

impl CheckMode {
    pub fn operational() -> CheckMode {
        CheckMode {
            flavor: Flavor::Operational,
            pivot_policy: PivotPolicy::FirstLiteral,
        }
    }

    pub fn specified() -> CheckMode {
        CheckMode {
            flavor: Flavor::Specified,
            pivot_policy: PivotPolicy::Any,
        }
    }
}

impl Default for CheckMode {
    fn default() -> CheckMode {
        CheckMode::operational()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// The added clause is neither RUP nor RAT.
    NotRat,
    /// The proof ended without deriving the empty clause.
    NoBottom,
    /// A hint at this position of the step's hint list is neither unit nor
    /// falsified, or the hints ran out without a conflict.
    BadHint(usize),
    /// A live clause containing the negated pivot has no RAT group.
    MissingRatCandidate(ClauseId),
    UnknownId(ClauseId),
    /// The step id does not exceed the previous one.
    IdOrder(ClauseId),
    /// The extension variable already occurs.
    NotFresh(Var),
    /// The definition mentions a variable that does not occur yet.
    UndefinedVariable(Var),
    /// Antecedent at this position does not clash with the accumulated resolvent
    /// on exactly one variable.
    NoPivot(usize),
    /// The folded resolvent is not a subset of the claimed clause.
    NotSubsumed,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::NotRat => write!(f, "clause is neither RUP nor RAT"),
            RejectReason::NoBottom => write!(f, "proof does not derive the empty clause"),
            RejectReason::BadHint(position) => write!(f, "bad hint at position {}", position),
            RejectReason::MissingRatCandidate(id) => write!(f, "missing RAT candidate {}", id),
            RejectReason::UnknownId(id) => write!(f, "unknown clause id {}", id),
            RejectReason::IdOrder(id) => write!(f, "clause id {} out of order", id),
            RejectReason::NotFresh(var) => write!(f, "extension variable {} is not fresh", var),
            RejectReason::UndefinedVariable(var) => write!(f, "variable {} is undefined", var),
            RejectReason::NoPivot(position) => {
                write!(f, "antecedent {} has no unique clashing variable", position)
            }
            RejectReason::NotSubsumed => write!(f, "resolvent is not a subset of the claimed clause"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    /// Step index is 0-based; for `NoBottom` it equals the number of steps.
    Rejected { step: usize, reason: RejectReason },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: Verdict,
    /// Additions, extensions and chains examined.
    pub steps_checked: usize,
    pub rat_steps: usize,
    pub visited_clauses_total: u64,
    pub skipped_deletions: usize,
    pub missing_deletions: usize,
    /// Filled by [`check_drat_traced`] only.
    pub per_step: Option<Vec<StepTrace>>,
}

impl CheckReport {
    fn new() -> CheckReport {
        CheckReport {
            verdict: Verdict::Verified,
            steps_checked: 0,
            rat_steps: 0,
            visited_clauses_total: 0,
            skipped_deletions: 0,
            missing_deletions: 0,
            per_step: None,
        }
    }

    pub fn is_verified(&self) -> bool {
        self.verdict.is_verified()
    }

    /// `(name, value)` pairs in a fixed order, for counter output.
    pub fn counters(&self) -> [(&'static str, u64); 5] {
        [
            ("steps_checked", self.steps_checked as u64),
            ("rat_steps", self.rat_steps as u64),
            ("visited_clauses", self.visited_clauses_total),
            ("skipped_deletions", self.skipped_deletions as u64),
            ("missing_deletions", self.missing_deletions as u64),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Add,
    Delete,
}

/// What the DRAT checker did with one proof step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub kind: StepKind,
    pub clause: Clause,
    /// Id given to an added clause, or id of the clause a deletion matched.
    /// `None` for deletions of absent clauses.
    pub id: Option<ClauseId>,
    /// Deletion ignored in operational mode.
    pub skipped: bool,
    /// RUP chain; empty for RAT steps.
    pub antecedents: Vec<ClauseId>,
    pub pivot: Option<Lit>,
    pub rat_groups: Vec<RatGroup>,
}
