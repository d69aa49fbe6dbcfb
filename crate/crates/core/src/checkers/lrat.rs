use std::collections::BTreeSet;

use crate::cnf::{Clause, ClauseId, Formula};
use crate::formats::{HintBlock, LratStep};
use crate::propagate::{Assumed, Engine, Replay};

use super::{CheckReport, RejectReason, Verdict};

/// Checks an LRAT proof against `formula` by replaying its hints.
///
/// Addition ids must exceed every id seen before, including the original clauses.
/// A RAT step (one with RAT groups, or whose RUP hints run out while no clause
/// contains the negated pivot) uses the first literal as pivot.
pub fn check_lrat(formula: &Formula, steps: &[(ClauseId, LratStep)]) -> CheckReport {
    let mut report = CheckReport::new();
    let mut engine = Engine::new(formula.clone());
    let mut last_id = ClauseId(formula.next_id().0 - 1);

    let verdict = 'proof: {
        if formula.empty_clause().is_some() {
            break 'proof Verdict::Verified;
        }
        for (index, (id, step)) in steps.iter().enumerate() {
            let reject = |reason| Verdict::Rejected { step: index, reason };
            match step {
                LratStep::Add { clause, hints } => {
                    if *id <= last_id {
                        break 'proof reject(RejectReason::IdOrder(*id));
                    }
                    last_id = *id;
                    report.steps_checked += 1;
                    match check_addition(&mut engine, clause, hints) {
                        Ok(rat) => report.rat_steps += rat as usize,
                        Err(reason) => break 'proof reject(reason),
                    }
                    engine
                        .insert_clause(*id, clause.clone())
                        .expect("id exceeds every earlier id");
                    if clause.is_empty() {
                        break 'proof Verdict::Verified;
                    }
                }
                LratStep::Delete(ids) => {
                    for &target in ids {
                        if engine.remove_clause(target).is_err() {
                            break 'proof reject(RejectReason::UnknownId(target));
                        }
                    }
                }
            }
        }
        Verdict::Rejected {
            step: steps.len(),
            reason: RejectReason::NoBottom,
        }
    };

    report.verdict = verdict;
    report.visited_clauses_total = engine.visited();
    report
}

/// `Ok(true)` for an accepted RAT step, `Ok(false)` for RUP.
fn check_addition(engine: &mut Engine, clause: &Clause, hints: &HintBlock) -> Result<bool, RejectReason> {
    let mark = engine.mark();
    let result = replay_addition(engine, clause, hints);
    engine.rollback(mark);
    result
}

fn replay(engine: &mut Engine, chain: &[ClauseId], offset: usize) -> Result<bool, RejectReason> {
    match engine.replay_hints(chain) {
        Replay::Conflict(_) => Ok(true),
        Replay::Exhausted => Ok(false),
        Replay::BadHint(position) => Err(RejectReason::BadHint(offset + position)),
        Replay::UnknownId(position) => Err(RejectReason::UnknownId(chain[position])),
    }
}

fn replay_addition(engine: &mut Engine, clause: &Clause, hints: &HintBlock) -> Result<bool, RejectReason> {
    for &lit in clause.lits() {
        if engine.assume(!lit) == Assumed::Contradiction {
            return Ok(false);
        }
    }
    if replay(engine, &hints.rup_chain, 0)? {
        return Ok(false);
    }
    let exhausted = RejectReason::BadHint(hints.rup_chain.len());
    let Some(&pivot) = clause.lits().first() else {
        return Err(exhausted);
    };
    let mut expected: BTreeSet<ClauseId> = engine.formula().occurrences(!pivot).collect();
    if hints.rat_groups.is_empty() && !expected.is_empty() {
        return Err(exhausted);
    }

    let mut offset = hints.rup_chain.len();
    for group in &hints.rat_groups {
        let candidate = engine
            .formula()
            .clause(group.candidate)
            .ok_or(RejectReason::UnknownId(group.candidate))?
            .clone();
        if !expected.remove(&group.candidate) {
            // not a clause with the negated pivot, or a repeated group
            return Err(RejectReason::BadHint(offset));
        }
        let mark = engine.mark();
        let vacuous = candidate
            .lits()
            .iter()
            .filter(|&&lit| lit != !pivot)
            .any(|&lit| engine.assume(!lit) == Assumed::Contradiction);
        let outcome = if vacuous {
            Ok(())
        } else {
            match replay(engine, &group.chain, offset + 1) {
                Ok(true) => Ok(()),
                Ok(false) => Err(RejectReason::BadHint(offset + 1 + group.chain.len())),
                Err(reason) => Err(reason),
            }
        };
        engine.rollback(mark);
        outcome?;
        offset += 1 + group.chain.len();
    }
    match expected.first() {
        Some(&missing) => Err(RejectReason::MissingRatCandidate(missing)),
        None => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_lrat;

    fn full2() -> Formula {
        Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]])
    }

    fn check(formula: &Formula, text: &str) -> CheckReport {
        check_lrat(formula, &parse_lrat(text.as_bytes()).unwrap())
    }

    #[test]
    fn rup_document() {
        let report = check(&full2(), "5 1 0 1 3 0\n6 0 5 2 4 0\n");
        assert_eq!(report.verdict, Verdict::Verified);
        assert_eq!(report.visited_clauses_total, 5);
    }

    #[test]
    fn missing_hint() {
        let report = check(&full2(), "5 1 0 1 0\n6 0 5 2 4 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 0, reason: RejectReason::BadHint(1) });
    }

    #[test]
    fn id_order_and_unknown_ids() {
        let report = check(&full2(), "4 1 0 1 3 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 0, reason: RejectReason::IdOrder(ClauseId(4)) });
        let report = check(&full2(), "5 d 9 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 0, reason: RejectReason::UnknownId(ClauseId(9)) });
        let mut steps = parse_lrat(b"5 d 1 0\n").unwrap();
        steps.extend(parse_lrat(b"6 1 0 1 3 0\n").unwrap());
        let report = check_lrat(&full2(), &steps);
        assert_eq!(report.verdict, Verdict::Rejected { step: 1, reason: RejectReason::UnknownId(ClauseId(1)) });
    }

    #[test]
    fn no_bottom() {
        let report = check(&full2(), "5 1 0 1 3 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 1, reason: RejectReason::NoBottom });
    }

    #[test]
    fn rat_groups_must_cover_candidates() {
        // {1} is RAT on 1: resolvents {1,2} and {1,3} are refuted by clauses 1 and 2
        let f = Formula::from_dimacs(&[&[1, 2], &[1, 3], &[-1, 2], &[-1, 3]]);
        let report = check(&f, "5 1 0 -3 1 -4 2 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 1, reason: RejectReason::NoBottom });
        assert_eq!(report.rat_steps, 1);
        let report = check(&f, "5 1 0 -3 1 0\n");
        assert_eq!(
            report.verdict,
            Verdict::Rejected { step: 0, reason: RejectReason::MissingRatCandidate(ClauseId(4)) }
        );
        // a group naming a clause without the negated pivot
        let report = check(&f, "5 1 0 -3 1 -4 2 -1 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 0, reason: RejectReason::BadHint(4) });
        // a group whose chain does not refute the resolvent
        let report = check(&f, "5 1 0 -3 2 -4 2 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 0, reason: RejectReason::BadHint(2) });
    }

    #[test]
    fn rat_without_candidates() {
        let f = Formula::from_dimacs(&[&[1, 2]]);
        let report = check(&f, "2 3 0 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 1, reason: RejectReason::NoBottom });
        assert_eq!(report.rat_steps, 1);
    }

    #[test]
    fn tautological_resolvent_needs_no_chain() {
        let f = Formula::from_dimacs(&[&[1, 2], &[-1, 2]]);
        let report = check(&f, "3 1 -2 0 -2 0\n");
        assert_eq!(report.verdict, Verdict::Rejected { step: 1, reason: RejectReason::NoBottom });
        assert_eq!(report.rat_steps, 1);
    }
}
