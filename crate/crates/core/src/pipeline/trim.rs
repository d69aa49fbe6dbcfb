use std::collections::{BTreeMap, HashMap};

use crate::cnf::{Clause, ClauseId, Formula};
use crate::formats::{HintBlock, LratDocument, LratStep, ProofStep, RatGroup};

use super::{CheckedProof, StepRecord};

/// The added clause with its RAT pivot, if any, moved to the front.
fn emitted_clause(record: &StepRecord) -> Clause {
    match record.trace.pivot {
        Some(pivot) => record.trace.clause.with_first(pivot),
        None => record.trace.clause.clone(),
    }
}

/// Deletions to emit after each core step: clauses the proof deleted, placed right
/// after the last core step citing them. Nothing is deleted after the final step.
fn deletion_schedule(cp: &CheckedProof) -> BTreeMap<usize, Vec<ClauseId>> {
    let final_position = cp.steps.len().saturating_sub(1);
    let mut schedule: BTreeMap<usize, Vec<ClauseId>> = BTreeMap::new();
    for (id, position) in cp.last_uses_of_deleted() {
        if position != final_position {
            schedule.entry(position).or_default().push(id);
        }
    }
    for ids in schedule.values_mut() {
        ids.sort_unstable();
    }
    schedule
}

/// The trimmed DRAT proof and the core CNF it refutes.
///
/// Only core additions are kept, with RAT pivots first so the first-literal policy
/// finds them.
pub fn emit_trimmed(cp: &CheckedProof) -> (Vec<ProofStep>, Formula) {
    let core_cnf = cp.core_formula();
    if cp.original_empty.is_some() {
        return (vec![ProofStep::Add(Clause::empty())], core_cnf);
    }
    let clauses = cp.clauses();
    let schedule = deletion_schedule(cp);
    let mut proof = Vec::new();
    for (position, record) in cp.steps.iter().enumerate().filter(|(_, r)| r.core) {
        proof.push(ProofStep::Add(emitted_clause(record)));
        for id in schedule.get(&position).into_iter().flatten() {
            proof.push(ProofStep::Delete(clauses[id].clone()));
        }
    }
    (proof, core_cnf)
}

/// LRAT proof over the original formula.
///
/// Original clauses keep their ids and added clauses are numbered from the first
/// free id. Non-core original clauses are deleted up front, so RAT candidate sets
/// match the ones seen by the forward check.
pub fn emit_lrat(cp: &CheckedProof) -> LratDocument {
    let first_free = cp.formula.next_id();
    if let Some(empty) = cp.original_empty {
        return vec![(
            first_free,
            LratStep::Add {
                clause: Clause::empty(),
                hints: HintBlock::rup(vec![empty]),
            },
        )];
    }

    let mut document = Vec::new();
    let non_core: Vec<ClauseId> = cp
        .formula
        .ids()
        .filter(|id| !cp.core_formula_ids.contains(id))
        .collect();
    if !non_core.is_empty() {
        document.push((ClauseId(first_free.0 - 1), LratStep::Delete(non_core)));
    }

    let schedule = deletion_schedule(cp);
    let mut renumbered: HashMap<ClauseId, ClauseId> = HashMap::new();
    let map = |renumbered: &HashMap<ClauseId, ClauseId>, id: ClauseId| *renumbered.get(&id).unwrap_or(&id);
    let mut next = first_free;
    for (position, record) in cp.steps.iter().enumerate().filter(|(_, r)| r.core) {
        let id = next;
        next = ClauseId(next.0 + 1);
        let hints = HintBlock {
            rup_chain: record.trace.antecedents.iter().map(|&a| map(&renumbered, a)).collect(),
            rat_groups: record
                .trace
                .rat_groups
                .iter()
                .map(|group| RatGroup {
                    candidate: map(&renumbered, group.candidate),
                    chain: group.chain.iter().map(|&a| map(&renumbered, a)).collect(),
                })
                .collect(),
        };
        renumbered.insert(record.trace.id.expect("added clauses have ids"), id);
        document.push((
            id,
            LratStep::Add {
                clause: emitted_clause(record),
                hints,
            },
        ));
        if let Some(ids) = schedule.get(&position) {
            document.push((id, LratStep::Delete(ids.iter().map(|&d| map(&renumbered, d)).collect())));
        }
    }
    document
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::{check_drat, check_lrat, CheckMode};
    use crate::formats::{write_drat_text, write_lrat};
    use crate::pipeline::backward_check;

    fn add(raw: &[i64]) -> ProofStep {
        ProofStep::Add(Clause::from_dimacs(raw).unwrap())
    }

    fn delete(raw: &[i64]) -> ProofStep {
        ProofStep::Delete(Clause::from_dimacs(raw).unwrap())
    }

    fn full2() -> Formula {
        Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]])
    }

    #[test]
    fn trims_redundant_addition() {
        let cp = backward_check(&full2(), &[add(&[1, 2]), add(&[1]), add(&[])], CheckMode::default()).unwrap();
        let (proof, core) = emit_trimmed(&cp);
        assert_eq!(write_drat_text(&proof), b"1 0\n0\n".to_vec());
        assert_eq!(core.len(), 4);
        assert!(check_drat(&core, &proof, CheckMode::default()).is_verified());
    }

    #[test]
    fn lrat_for_full_two_variable_cnf() {
        let cp = backward_check(&full2(), &[add(&[1]), add(&[])], CheckMode::default()).unwrap();
        let lrat = emit_lrat(&cp);
        assert_eq!(write_lrat(&lrat), b"5 1 0 1 3 0\n6 0 5 2 4 0\n".to_vec());
        assert!(check_lrat(&full2(), &lrat).is_verified());
    }

    #[test]
    fn deletions_follow_last_use() {
        // {2} and {-2} refute; {1,3} is unused; {2} comes from 1 and 2, which the proof deletes
        let f = Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[-2], &[1, 3]]);
        let proof = [add(&[2]), delete(&[1, 2]), delete(&[-1, 2]), add(&[])];
        let cp = backward_check(&f, &proof, CheckMode::specified()).unwrap();
        let (trimmed, core) = emit_trimmed(&cp);
        assert_eq!(write_drat_text(&trimmed), b"2 0\nd 1 2 0\nd -1 2 0\n0\n".to_vec());
        assert_eq!(core.len(), 3);
        let lrat = emit_lrat(&cp);
        assert_eq!(write_lrat(&lrat), b"4 d 4 0\n5 2 0 1 2 0\n5 d 1 2 0\n6 0 3 5 0\n".to_vec());
        assert!(check_lrat(&f, &lrat).is_verified());
    }

    #[test]
    fn rat_pivot_moves_first() {
        // {-3, 1} is RAT on 1 only if 1 is the pivot; the trimmed proof must start with 1
        let f = Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[-2, 3], &[-2, -3]]);
        let proof = [add(&[-3, 1]), add(&[-2]), add(&[])];
        let cp = backward_check(&f, &proof, CheckMode::specified()).unwrap();
        let (trimmed, core) = emit_trimmed(&cp);
        assert!(check_drat(&core, &trimmed, CheckMode::operational()).is_verified());
        assert!(check_lrat(&f, &emit_lrat(&cp)).is_verified());
    }

    #[test]
    fn original_empty_clause() {
        let f = Formula::from_dimacs(&[&[1], &[]]);
        let cp = backward_check(&f, &[], CheckMode::default()).unwrap();
        let (trimmed, core) = emit_trimmed(&cp);
        assert_eq!(trimmed, vec![ProofStep::Add(Clause::empty())]);
        assert_eq!(core.len(), 1);
        assert_eq!(write_lrat(&emit_lrat(&cp)), b"3 0 2 0\n".to_vec());
    }
}
