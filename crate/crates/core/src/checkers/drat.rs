use crate::cnf::Formula;
use crate::formats::ProofStep;
use crate::propagate::{Engine, RupOutcome};

use super::{CheckMode, CheckReport, Flavor, RejectReason, StepKind, StepTrace, Verdict};

/// Checks a DRAT proof against `formula`.
///
/// Additions must be RUP, or RAT on a pivot allowed by the mode's pivot policy; the
/// empty clause must be RUP. Checking stops at the first accepted empty clause and
/// ignores the remaining steps.
pub fn check_drat(formula: &Formula, proof: &[ProofStep], mode: CheckMode) -> CheckReport {
    run(formula, proof, mode, false)
}

/// Like [`check_drat`], additionally recording a [`StepTrace`] per processed step.
pub fn check_drat_traced(formula: &Formula, proof: &[ProofStep], mode: CheckMode) -> CheckReport {
    run(formula, proof, mode, true)
}

fn run(formula: &Formula, proof: &[ProofStep], mode: CheckMode, trace: bool) -> CheckReport {
    let mut report = CheckReport::new();
    let mut traces = Vec::new();
    let mut engine = Engine::new(formula.clone());

    let verdict = 'proof: {
        if formula.empty_clause().is_some() {
            break 'proof Verdict::Verified;
        }
        for (index, step) in proof.iter().enumerate() {
            let clause = step.clause();
            match step {
                ProofStep::Add(_) => {
                    report.steps_checked += 1;
                    let mut record = StepTrace {
                        kind: StepKind::Add,
                        clause: clause.clone(),
                        id: None,
                        skipped: false,
                        antecedents: Vec::new(),
                        pivot: None,
                        rat_groups: Vec::new(),
                    };
                    match engine.check_rup(clause) {
                        RupOutcome::Rup(chain) => record.antecedents = chain,
                        RupOutcome::NotRup if !clause.is_empty() => {
                            match engine.find_pivot(clause, mode.pivot_policy) {
                                Some((pivot, groups)) => {
                                    report.rat_steps += 1;
                                    record.pivot = Some(pivot);
                                    record.rat_groups = groups;
                                }
                                None => {
                                    break 'proof Verdict::Rejected {
                                        step: index,
                                        reason: RejectReason::NotRat,
                                    }
                                }
                            }
                        }
                        RupOutcome::NotRup => {
                            break 'proof Verdict::Rejected {
                                step: index,
                                reason: RejectReason::NotRat,
                            }
                        }
                    }
                    record.id = Some(engine.add_clause(clause.clone()));
                    if trace {
                        traces.push(record);
                    }
                    if clause.is_empty() {
                        break 'proof Verdict::Verified;
                    }
                }
                ProofStep::Delete(_) => {
                    let target = engine.formula().find(clause).last().copied();
                    let skipped = match target {
                        None => {
                            log::warn!("proof step {}: deleted clause {} is not present", index, clause);
                            report.missing_deletions += 1;
                            false
                        }
                        Some(id) => {
                            let protected = mode.flavor == Flavor::Operational && engine.is_reason_or_unit(id);
                            if protected {
                                report.skipped_deletions += 1;
                            } else {
                                engine.remove_clause(id).expect("live clause");
                            }
                            protected
                        }
                    };
                    if trace {
                        traces.push(StepTrace {
                            kind: StepKind::Delete,
                            clause: clause.clone(),
                            id: target,
                            skipped,
                            antecedents: Vec::new(),
                            pivot: None,
                            rat_groups: Vec::new(),
                        });
                    }
                }
            }
        }
        if engine.formula().empty_clause().is_some() {
            Verdict::Verified
        } else {
            Verdict::Rejected {
                step: proof.len(),
                reason: RejectReason::NoBottom,
            }
        }
    };

    report.verdict = verdict;
    report.visited_clauses_total = engine.visited();
    if trace {
        report.per_step = Some(traces);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{Clause, ClauseId};

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
    fn full_two_variable_cnf() {
        for mode in [CheckMode::specified(), CheckMode::operational()] {
            let report = check_drat(&full2(), &[add(&[1]), add(&[])], mode);
            assert_eq!(report.verdict, Verdict::Verified);
            assert_eq!(report.steps_checked, 2);
            assert_eq!(report.rat_steps, 0);
        }
    }

    #[test]
    fn proper_rat_without_bottom() {
        let f = Formula::from_dimacs(&[&[1, 2], &[-1, 2]]);
        let report = check_drat(&f, &[add(&[1])], CheckMode::default());
        assert_eq!(report.verdict, Verdict::Rejected { step: 1, reason: RejectReason::NoBottom });
        assert_eq!(report.rat_steps, 1);
    }

    #[test]
    fn contradictory_units() {
        let f = Formula::from_dimacs(&[&[1], &[-1]]);
        assert!(check_drat(&f, &[add(&[])], CheckMode::default()).is_verified());
    }

    #[test]
    fn deletion_semantics_diverge() {
        let f = Formula::from_dimacs(&[&[1], &[-1]]);
        let proof = [delete(&[1]), add(&[])];
        let operational = check_drat(&f, &proof, CheckMode::operational());
        assert_eq!(operational.verdict, Verdict::Verified);
        assert_eq!(operational.skipped_deletions, 1);
        let specified = check_drat(&f, &proof, CheckMode::specified());
        assert_eq!(specified.verdict, Verdict::Rejected { step: 1, reason: RejectReason::NotRat });
    }

    #[test]
    fn rejects_invalid_step() {
        let f = Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[1, -2]]);
        let report = check_drat(&f, &[add(&[-2]), add(&[])], CheckMode::default());
        assert_eq!(report.verdict, Verdict::Rejected { step: 0, reason: RejectReason::NotRat });
    }

    #[test]
    fn trailing_steps_ignored_and_absent_deletions_counted() {
        let report = check_drat(
            &full2(),
            &[delete(&[3]), add(&[1]), add(&[]), add(&[5, 6, 7])],
            CheckMode::default(),
        );
        assert!(report.is_verified());
        assert_eq!(report.missing_deletions, 1);
        assert_eq!(report.steps_checked, 2);
    }

    #[test]
    fn trace_records_chains() {
        let report = check_drat_traced(&full2(), &[add(&[1]), add(&[])], CheckMode::default());
        let traces = report.per_step.unwrap();
        assert_eq!(traces[0].id, Some(ClauseId(5)));
        assert_eq!(traces[0].antecedents, vec![ClauseId(1), ClauseId(3)]);
        assert_eq!(traces[1].antecedents, vec![ClauseId(5), ClauseId(2), ClauseId(4)]);
    }

    #[test]
    fn original_empty_clause() {
        let f = Formula::from_dimacs(&[&[1], &[]]);
        assert!(check_drat(&f, &[], CheckMode::default()).is_verified());
    }
}
