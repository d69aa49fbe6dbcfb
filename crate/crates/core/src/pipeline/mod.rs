//! Backward checking, trimming, LRAT emission and DRAT-to-ER translation.
//!
//! Every stage starts from a [`CheckedProof`]: the forward DRAT check with each
//! step's propagation chains recorded, plus the core marking computed backwards
//! from the empty clause.

mod er;
mod trim;

use std::collections::{BTreeSet, HashMap, HashSet};

pub use er::to_er;
pub use trim::{emit_lrat, emit_trimmed};

use crate::checkers::{check_drat_traced, CheckMode, CheckReport, StepKind, StepTrace, Verdict};
use crate::cnf::{Clause, ClauseId, Formula};
use crate::error::{Error, Result};
use crate::formats::ProofStep;

/// One processed DRAT step with its core flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    /// Position in the input proof.
    pub index: usize,
    pub trace: StepTrace,
    /// Additions only: the step contributes to the empty clause.
    pub core: bool,
}

impl StepRecord {
    pub fn is_add(&self) -> bool {
        self.trace.kind == StepKind::Add
    }

    /// Clause ids the step's check relied on: the RUP chain, or every RAT candidate
    /// together with its chain.
    pub fn citations(&self) -> impl Iterator<Item = ClauseId> + '_ {
        self.trace.antecedents.iter().copied().chain(
            self.trace
                .rat_groups
                .iter()
                .flat_map(|group| std::iter::once(group.candidate).chain(group.chain.iter().copied())),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedProof {
    pub formula: Formula,
    pub mode: CheckMode,
    /// Steps up to and including the empty-clause addition.
    pub steps: Vec<StepRecord>,
    /// Original clauses some core step relies on.
    pub core_formula_ids: BTreeSet<ClauseId>,
    /// Set when the formula itself contains the empty clause.
    pub original_empty: Option<ClauseId>,
    /// Counters of the forward check.
    pub report: CheckReport,
}

impl CheckedProof {
    /// Literals of every original clause and every added clause, by id.
    pub fn clauses(&self) -> HashMap<ClauseId, &Clause> {
        let mut map: HashMap<ClauseId, &Clause> = self.formula.iter().collect();
        for record in self.steps.iter().filter(|r| r.is_add()) {
            map.insert(record.trace.id.expect("added clauses have ids"), &record.trace.clause);
        }
        map
    }

    pub fn core_additions(&self) -> usize {
        self.steps.iter().filter(|r| r.core).count()
    }

    /// Core original clauses, renumbered from 1 in id order.
    pub fn core_formula(&self) -> Formula {
        let mut core = Formula::from_clauses(
            self.core_formula_ids
                .iter()
                .map(|&id| self.formula.clause(id).expect("original clause").clone()),
        );
        core.declare_vars(self.formula.num_vars());
        core
    }

    /// For each clause the original proof deleted (or tried to delete), the index into
    /// `steps` of the last core addition citing it.
    pub(crate) fn last_uses_of_deleted(&self) -> HashMap<ClauseId, usize> {
        let deleted: HashSet<ClauseId> = self
            .steps
            .iter()
            .filter(|r| !r.is_add())
            .filter_map(|r| r.trace.id)
            .collect();
        let mut last_use = HashMap::new();
        for (position, record) in self.steps.iter().enumerate().filter(|(_, r)| r.core) {
            for id in record.citations() {
                if deleted.contains(&id) {
                    last_use.insert(id, position);
                }
            }
        }
        last_use
    }
}

/// Checks `proof` forward, recording chains, then marks the steps and original
/// clauses the empty clause depends on.
pub fn backward_check(formula: &Formula, proof: &[ProofStep], mode: CheckMode) -> Result<CheckedProof> {
    let mut report = check_drat_traced(formula, proof, mode);
    if let Verdict::Rejected { step, reason } = report.verdict {
        return Err(Error::ForwardRejected { step, reason });
    }
    let traces = report.per_step.take().unwrap_or_default();

    // deletions of absent clauses are traced too, so traces align with proof steps
    let mut records: Vec<StepRecord> = traces
        .into_iter()
        .enumerate()
        .map(|(index, trace)| StepRecord { index, trace, core: false })
        .collect();

    let original_empty = formula.empty_clause();
    let mut needed: HashSet<ClauseId> = HashSet::new();
    if let Some(id) = original_empty {
        needed.insert(id);
        records.clear();
    } else if let Some(last) = records.last() {
        needed.insert(last.trace.id.expect("final empty clause"));
    }
    for record in records.iter_mut().rev().filter(|r| r.trace.kind == StepKind::Add) {
        let id = record.trace.id.expect("added clauses have ids");
        if needed.remove(&id) {
            record.core = true;
            needed.extend(record.citations());
        }
    }
    let core_formula_ids = needed
        .into_iter()
        .filter(|&id| formula.contains_id(id))
        .collect();

    Ok(CheckedProof {
        formula: formula.clone(),
        mode,
        steps: records,
        core_formula_ids,
        original_empty,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::RejectReason;

    fn add(raw: &[i64]) -> ProofStep {
        ProofStep::Add(Clause::from_dimacs(raw).unwrap())
    }

    fn full2() -> Formula {
        Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]])
    }

    #[test]
    fn redundant_addition_is_not_core() {
        let cp = backward_check(&full2(), &[add(&[1, 2]), add(&[1]), add(&[])], CheckMode::default()).unwrap();
        let core: Vec<bool> = cp.steps.iter().map(|r| r.core).collect();
        assert_eq!(core, vec![false, true, true]);
        assert_eq!(cp.core_formula_ids.len(), 4);
    }

    #[test]
    fn core_closure() {
        let cp = backward_check(&full2(), &[add(&[1, 2]), add(&[1]), add(&[])], CheckMode::default()).unwrap();
        let non_core: HashSet<ClauseId> = cp.steps.iter().filter(|r| !r.core).filter_map(|r| r.trace.id).collect();
        for record in cp.steps.iter().filter(|r| r.core) {
            assert!(record.citations().all(|id| !non_core.contains(&id)));
        }
    }

    #[test]
    fn invalid_middle_step() {
        let proof = [add(&[1, 2]), ProofStep::Delete(Clause::from_dimacs(&[1, -2]).unwrap()), add(&[1]), add(&[])];
        let err = backward_check(&full2(), &proof, CheckMode::specified());
        assert_eq!(err, Err(Error::ForwardRejected { step: 2, reason: RejectReason::NotRat }));
    }

    #[test]
    fn original_empty_clause() {
        let f = Formula::from_dimacs(&[&[1], &[]]);
        let cp = backward_check(&f, &[add(&[1])], CheckMode::default()).unwrap();
        assert_eq!(cp.original_empty, Some(ClauseId(2)));
        assert!(cp.steps.is_empty());
        assert_eq!(cp.core_formula_ids, BTreeSet::from([ClauseId(2)]));
    }
}
