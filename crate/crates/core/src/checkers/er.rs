use std::collections::HashSet;

use crate::cnf::{resolve, Clause, ClauseId, Formula, Lit};
use crate::formats::{extension_clauses, ErStep};

use super::{CheckReport, RejectReason, Verdict};

/// Incremental ER checker: applies one step at a time, so producers can validate
/// each step as they emit it.
#[derive(Debug, Clone)]
pub struct ErChecker {
    formula: Formula,
    last_id: ClauseId,
    verified: bool,
    steps_checked: usize,
    visited: u64,
}

impl ErChecker {
    pub fn new(formula: &Formula) -> ErChecker {
        ErChecker {
            formula: formula.clone(),
            last_id: ClauseId(formula.next_id().0 - 1),
            verified: formula.empty_clause().is_some(),
            steps_checked: 0,
            visited: 0,
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.formula.clause(id)
    }

    /// Largest variable occurring in the formula or in any accepted step.
    pub fn max_var(&self) -> u32 {
        self.formula.num_vars()
    }

    /// Whether an empty clause has been derived (or was present from the start).
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn apply(&mut self, id: ClauseId, step: &ErStep) -> Result<(), RejectReason> {
        match step {
            ErStep::Extend { var, pivot, lits } => {
                self.check_fresh_id(id)?;
                self.steps_checked += 1;
                if var.index() <= self.max_var() {
                    return Err(RejectReason::NotFresh(*var));
                }
                for lit in lits.iter().chain(std::iter::once(pivot)) {
                    if lit.var().index() > self.max_var() {
                        return Err(RejectReason::UndefinedVariable(lit.var()));
                    }
                }
                for (offset, clause) in extension_clauses(*var, *pivot, lits).into_iter().enumerate() {
                    let clause_id = ClauseId(id.0 + offset as u64);
                    self.formula.insert_clause(clause_id, clause).expect("fresh id");
                    self.last_id = clause_id;
                }
                Ok(())
            }
            ErStep::Chain { claimed, antecedents } => {
                self.check_fresh_id(id)?;
                self.steps_checked += 1;
                let resolvent = self.fold(antecedents)?;
                if !resolvent.is_subset_of(claimed) {
                    return Err(RejectReason::NotSubsumed);
                }
                self.formula.insert_clause(id, claimed.clone()).expect("fresh id");
                self.last_id = id;
                if claimed.is_empty() {
                    self.verified = true;
                }
                Ok(())
            }
            ErStep::Delete(ids) => {
                for &target in ids {
                    self.formula
                        .remove_clause(target)
                        .map_err(|_| RejectReason::UnknownId(target))?;
                }
                Ok(())
            }
        }
    }

    fn check_fresh_id(&self, id: ClauseId) -> Result<(), RejectReason> {
        if id <= self.last_id {
            return Err(RejectReason::IdOrder(id));
        }
        Ok(())
    }

    /// Left fold of resolution over the antecedents, each step resolving on the
    /// single variable that clashes.
    fn fold(&mut self, antecedents: &[ClauseId]) -> Result<Clause, RejectReason> {
        let lookup = |id: &ClauseId| self.formula.clause(*id).ok_or(RejectReason::UnknownId(*id));
        let (first, rest) = antecedents.split_first().ok_or(RejectReason::NoPivot(0))?;
        let mut resolvent = lookup(first)?.clone();
        for (offset, id) in rest.iter().enumerate() {
            let position = offset + 1;
            let other = lookup(id)?;
            let present: HashSet<Lit> = resolvent.lits().iter().copied().collect();
            let mut clashes = other.lits().iter().filter(|&&lit| present.contains(&!lit));
            let pivot = match (clashes.next(), clashes.next()) {
                (Some(&lit), None) => !lit,
                _ => return Err(RejectReason::NoPivot(position)),
            };
            resolvent = resolve(&resolvent, other, pivot)
                .expect("pivot clashes")
                .into_clause();
        }
        self.visited += antecedents.len() as u64;
        Ok(resolvent)
    }
}

/// Checks an ER proof against `formula`.
pub fn check_er(formula: &Formula, steps: &[(ClauseId, ErStep)]) -> CheckReport {
    let mut report = CheckReport::new();
    let mut checker = ErChecker::new(formula);
    let mut verdict = None;
    if !checker.is_verified() {
        for (index, (id, step)) in steps.iter().enumerate() {
            if let Err(reason) = checker.apply(*id, step) {
                verdict = Some(Verdict::Rejected { step: index, reason });
                break;
            }
            if checker.is_verified() {
                break;
            }
        }
    }
    report.verdict = verdict.unwrap_or(if checker.is_verified() {
        Verdict::Verified
    } else {
        Verdict::Rejected {
            step: steps.len(),
            reason: RejectReason::NoBottom,
        }
    });
    report.steps_checked = checker.steps_checked;
    report.visited_clauses_total = checker.visited;
    report
}
