//! DRAT to ER translation.
//!
//! RUP additions become resolution chains rebuilt from their recorded propagation
//! chains. A RAT addition `C = {p, l1, ..., lk}` introduces a fresh `x` defined as
//! `x <-> (p | (!l1 & ... & !lk))`. The second clause of that definition is
//! `C[p := x]`, and clauses still needed later are re-derived over `x`:
//! `E[p := x]` for clauses with `p`, and `{!x} | D'` for clauses `{!p} | D'`.
//! From then on `p` is read as `x` through a substitution map.
//!
//! Each DRAT clause has an ER image: a clause that is a subset of the DRAT clause
//! under the current substitution. Only clauses that some later step cites get images.

use std::collections::{HashMap, HashSet};

use crate::checkers::{ErChecker, RejectReason};
use crate::cnf::{resolve, Clause, ClauseId, Lit, Var};
use crate::error::{Error, Result};
use crate::formats::{ErDocument, ErStep};

use super::{CheckedProof, StepRecord};

/// Translates the core of a checked DRAT proof into an ER proof of the original formula.
///
/// Every emitted step is checked as it is produced; a failure is reported as
/// [`Error::TranslationInvariantViolation`].
pub fn to_er(cp: &CheckedProof) -> Result<ErDocument> {
    let first_free = cp.formula.next_id();
    if let Some(empty) = cp.original_empty {
        return Ok(vec![(
            first_free,
            ErStep::Chain {
                claimed: Clause::empty(),
                antecedents: vec![empty],
            },
        )]);
    }
    let Some(final_position) = cp.steps.len().checked_sub(1) else {
        return Ok(Vec::new());
    };

    // Backward pass: which additions need an image, and what is needed after each RAT step.
    let mut needed: HashSet<ClauseId> = HashSet::new();
    let mut wanted = vec![false; cp.steps.len()];
    let mut needed_after: HashMap<usize, Vec<ClauseId>> = HashMap::new();
    for (position, record) in cp.steps.iter().enumerate().rev() {
        if !record.core {
            continue;
        }
        let id = record.trace.id.expect("added clauses have ids");
        if !(needed.remove(&id) || position == final_position) {
            continue;
        }
        wanted[position] = true;
        if record.trace.pivot.is_none() {
            needed.extend(record.trace.antecedents.iter().copied());
            continue;
        }
        let mut after: Vec<ClauseId> = needed.iter().copied().collect();
        after.sort_unstable();
        for group in &record.trace.rat_groups {
            if needed.contains(&group.candidate) {
                needed.extend(group.chain.iter().copied());
            }
        }
        needed_after.insert(position, after);
    }

    let next_var = cp
        .steps
        .iter()
        .filter_map(|r| r.trace.clause.max_var())
        .map(Var::index)
        .fold(cp.formula.num_vars(), u32::max)
        + 1;
    let mut translator = Translator {
        clauses: cp.clauses(),
        sigma: HashMap::new(),
        images: HashMap::new(),
        checker: ErChecker::new(&cp.formula),
        next_id: first_free,
        next_var,
        document: Vec::new(),
        step: 0,
    };

    for (position, record) in cp.steps.iter().enumerate() {
        translator.step = record.index;
        if !record.is_add() {
            translator.delete(cp, record)?;
        } else if wanted[position] {
            match record.trace.pivot {
                None => translator.rup(record)?,
                Some(pivot) => translator.rat(record, pivot, &needed_after[&position])?,
            }
        }
    }
    if !translator.checker.is_verified() {
        return Err(translator.violation(RejectReason::NoBottom));
    }
    Ok(translator.document)
}

struct Translator<'a> {
    /// DRAT clauses by DRAT id.
    clauses: HashMap<ClauseId, &'a Clause>,
    /// Variable renaming introduced by RAT steps.
    sigma: HashMap<Var, Lit>,
    /// DRAT id to ER id, for clauses whose image is not the original clause itself.
    images: HashMap<ClauseId, ClauseId>,
    checker: ErChecker,
    next_id: ClauseId,
    next_var: u32,
    document: ErDocument,
    /// Proof step being translated, for error reports.
    step: usize,
}

impl Translator<'_> {
    fn violation(&self, reason: RejectReason) -> Error {
        Error::TranslationInvariantViolation {
            step: self.step,
            reason,
        }
    }

    fn map_lit(&self, lit: Lit) -> Lit {
        match self.sigma.get(&lit.var()) {
            Some(&image) if lit.is_negative() => !image,
            Some(&image) => image,
            None => lit,
        }
    }

    fn map_clause<'c>(&self, lits: impl IntoIterator<Item = &'c Lit>) -> Clause {
        lits.into_iter().map(|&lit| self.map_lit(lit)).collect()
    }

    fn image(&self, id: ClauseId) -> ClauseId {
        self.images.get(&id).copied().unwrap_or(id)
    }

    fn er_clause(&self, id: ClauseId) -> Result<Clause> {
        self.checker
            .clause(id)
            .cloned()
            .ok_or_else(|| self.violation(RejectReason::UnknownId(id)))
    }

    fn emit(&mut self, step: ErStep) -> Result<ClauseId> {
        let id = self.next_id;
        self.checker.apply(id, &step).map_err(|reason| self.violation(reason))?;
        let used = match &step {
            ErStep::Extend { lits, .. } => lits.len() as u64 + 2,
            ErStep::Chain { .. } => 1,
            ErStep::Delete(_) => 0,
        };
        self.next_id = ClauseId(id.0 + used);
        self.document.push((id, step));
        Ok(id)
    }

    /// Replays a DRAT propagation chain on the ER images under the negation of
    /// `negated`, then folds it backwards from the conflict into a resolution chain.
    /// Returns the ER antecedents and the resolvent, a subset of `negated`.
    fn refute(&self, negated: &Clause, chain: &[ClauseId]) -> Result<(Vec<ClauseId>, Clause)> {
        let mut true_lits: HashSet<Lit> = negated.lits().iter().map(|&lit| !lit).collect();
        let mut units: Vec<(ClauseId, Lit)> = Vec::new();
        let mut conflict = None;
        for (position, &drat_id) in chain.iter().enumerate() {
            let id = self.image(drat_id);
            let clause = self.er_clause(id)?;
            let open: Vec<Lit> = clause
                .lits()
                .iter()
                .copied()
                .filter(|&lit| !true_lits.contains(&!lit))
                .collect();
            match open[..] {
                [] => {
                    conflict = Some((id, clause));
                    break;
                }
                [lit] if !true_lits.contains(&lit) => {
                    true_lits.insert(lit);
                    units.push((id, lit));
                }
                _ => return Err(self.violation(RejectReason::BadHint(position))),
            }
        }
        let (conflict_id, mut resolvent) =
            conflict.ok_or_else(|| self.violation(RejectReason::BadHint(chain.len())))?;
        let mut antecedents = vec![conflict_id];
        for &(id, lit) in units.iter().rev() {
            if resolvent.contains(!lit) {
                let reason = self.er_clause(id)?;
                resolvent = resolve(&reason, &resolvent, lit)?.into_clause();
                antecedents.push(id);
            }
        }
        Ok((antecedents, resolvent))
    }

    fn rup(&mut self, record: &StepRecord) -> Result<()> {
        let claimed = self.map_clause(record.trace.clause.lits());
        let (antecedents, _) = self.refute(&claimed, &record.trace.antecedents)?;
        let id = self.emit(ErStep::Chain { claimed, antecedents })?;
        self.images.insert(record.trace.id.expect("added clauses have ids"), id);
        Ok(())
    }

    fn rat(&mut self, record: &StepRecord, pivot: Lit, needed_after: &[ClauseId]) -> Result<()> {
        let clause = &record.trace.clause;
        let mapped_pivot = self.map_lit(pivot);
        let max_var = self.checker.max_var();
        let pivot_defined = mapped_pivot.var().index() <= max_var;
        // a pivot over a variable the ER proof has not seen yet occurs in no clause;
        // any defined literal can stand in for it in the definition
        let definition_pivot = if pivot_defined {
            mapped_pivot
        } else {
            Var::new(1).map_err(|_| self.violation(RejectReason::UndefinedVariable(mapped_pivot.var())))?.positive()
        };
        let others: Vec<Lit> = clause.lits().iter().copied().filter(|&lit| lit != pivot).collect();
        let defined: Vec<Lit> = others
            .iter()
            .map(|&lit| self.map_lit(lit))
            .filter(|lit| lit.var().index() <= max_var)
            .collect();

        let var = Var::new(self.next_var).map_err(|_| self.violation(RejectReason::NotFresh(Var::new(1).unwrap())))?;
        self.next_var += 1;
        let x = var.positive();
        let family = self.emit(ErStep::Extend {
            var,
            pivot: definition_pivot,
            lits: defined.iter().map(|&lit| !lit).collect(),
        })?;
        let family_clause_for: HashMap<Lit, ClauseId> = defined
            .iter()
            .enumerate()
            .map(|(i, &lit)| (lit, ClauseId(family.0 + 2 + i as u64)))
            .collect();

        let mut updates = Vec::new();
        for &id in needed_after {
            let drat = self.clauses[&id];
            let image = self.image(id);
            if drat.contains(pivot) && !drat.contains(!pivot) {
                if !pivot_defined || !self.er_clause(image)?.contains(mapped_pivot) {
                    continue;
                }
                let claimed = drat
                    .lits()
                    .iter()
                    .map(|&lit| if lit == pivot { x } else { self.map_lit(lit) })
                    .collect();
                let new = self.emit(ErStep::Chain {
                    claimed,
                    antecedents: vec![image, family],
                })?;
                updates.push((id, new));
            } else if drat.contains(!pivot) && !drat.contains(pivot) {
                let image_clause = self.er_clause(image)?;
                if !pivot_defined || !image_clause.contains(!mapped_pivot) {
                    continue;
                }
                let rest: Vec<Lit> = drat.lits().iter().copied().filter(|&lit| lit != !pivot).collect();
                let mapped_rest = self.map_clause(&rest);
                let target: Clause = std::iter::once(!x).chain(mapped_rest.lits().iter().copied()).collect();
                let family_clause = |lit: Lit| {
                    family_clause_for
                        .get(&self.map_lit(lit))
                        .copied()
                        .ok_or_else(|| self.violation(RejectReason::UndefinedVariable(lit.var())))
                };

                let antecedents = if let Some(&clash) = others.iter().find(|&&lit| rest.contains(&!lit)) {
                    // tautological resolvent: {!x, p, !l} resolves with the image on p
                    vec![family_clause(clash)?, image]
                } else {
                    let group = record
                        .trace
                        .rat_groups
                        .iter()
                        .find(|g| g.candidate == id)
                        .ok_or_else(|| self.violation(RejectReason::MissingRatCandidate(id)))?;
                    let negated = self.map_clause(clause.lits().iter().chain(&rest));
                    let (mut antecedents, mut resolvent) = self.refute(&negated, &group.chain)?;
                    for &lit in &others {
                        let mapped = self.map_lit(lit);
                        if resolvent.contains(mapped) && !mapped_rest.contains(mapped) {
                            let id = family_clause(lit)?;
                            resolvent = resolve(&resolvent, &self.er_clause(id)?, mapped)?.into_clause();
                            antecedents.push(id);
                        }
                    }
                    if resolvent.contains(mapped_pivot) {
                        antecedents.push(image);
                    }
                    antecedents
                };
                let new = self.emit(ErStep::Chain {
                    claimed: target,
                    antecedents,
                })?;
                updates.push((id, new));
            }
        }
        self.images.extend(updates);
        self.images
            .insert(record.trace.id.expect("added clauses have ids"), ClauseId(family.0 + 1));
        self.sigma.insert(pivot.var(), if pivot.is_positive() { x } else { !x });
        Ok(())
    }

    fn delete(&mut self, cp: &CheckedProof, record: &StepRecord) -> Result<()> {
        let Some(id) = record.trace.id.filter(|_| !record.trace.skipped) else {
            return Ok(());
        };
        let target = match self.images.remove(&id) {
            Some(image) => image,
            None if cp.formula.contains_id(id) => id,
            None => return Ok(()),
        };
        if self.checker.clause(target).is_none() {
            return Ok(());
        }
        self.next_id = ClauseId(self.next_id.0 - 1);
        self.emit(ErStep::Delete(vec![target]))?;
        self.next_id = ClauseId(self.next_id.0 + 1);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::{check_er, CheckMode};
    use crate::cnf::Formula;
    use crate::formats::{parse_er, write_er, ProofStep};
    use crate::pipeline::backward_check;

    fn add(raw: &[i64]) -> ProofStep {
        ProofStep::Add(Clause::from_dimacs(raw).unwrap())
    }

    fn translate(f: &Formula, proof: &[ProofStep]) -> ErDocument {
        let cp = backward_check(f, proof, CheckMode::specified()).unwrap();
        let document = to_er(&cp).unwrap();
        assert!(check_er(f, &document).is_verified(), "{}", String::from_utf8_lossy(&write_er(&document)));
        assert_eq!(parse_er(&write_er(&document)).unwrap(), document);
        document
    }

    #[test]
    fn rup_only_proof() {
        let f = Formula::from_dimacs(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        let document = translate(&f, &[add(&[1]), add(&[])]);
        assert_eq!(write_er(&document), b"5 1 0 3 1 0\n6 0 4 2 5 0\n".to_vec());
    }

    /// Every clause over variables `1..=n`.
    fn full(n: u32) -> Formula {
        Formula::from_clauses((0..1u32 << n).map(|signs| {
            (1..=n)
                .map(|v| Var::new(v).unwrap().lit(signs >> (v - 1) & 1 == 0))
                .collect::<Clause>()
        }))
    }

    fn extensions(document: &ErDocument) -> Vec<usize> {
        document
            .iter()
            .filter_map(|(_, step)| match step {
                ErStep::Extend { lits, .. } => Some(lits.len()),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn singleton_rat() {
        // {1} is not RUP in the full 3-variable CNF, but every resolvent on 1 is
        let f = full(3);
        let document = translate(&f, &[add(&[1]), add(&[2]), add(&[])]);
        assert_eq!(extensions(&document), vec![0]);
    }

    #[test]
    fn rat_steps_with_tautological_resolvents() {
        let f = full(4);
        let proof = [
            add(&[1, -2]),
            add(&[1, 2]),
            add(&[1]),
            add(&[2, -3]),
            add(&[2, 3]),
            add(&[2]),
            add(&[3, -4]),
            add(&[3, 4]),
            add(&[3]),
            add(&[]),
        ];
        let cp = backward_check(&f, &proof, CheckMode::specified()).unwrap();
        assert!(cp.report.rat_steps >= 2);
        let document = translate(&f, &proof);
        assert!(extensions(&document).iter().any(|&k| k > 0));
    }

    #[test]
    fn rat_on_fresh_variable() {
        let f = full(2);
        let proof = [add(&[3, -1, -2]), add(&[-3, 1]), add(&[-3, 2]), add(&[1]), add(&[])];
        translate(&f, &proof);
    }

    #[test]
    fn original_empty_clause() {
        let f = Formula::from_dimacs(&[&[1], &[]]);
        let cp = backward_check(&f, &[], CheckMode::default()).unwrap();
        assert_eq!(write_er(&to_er(&cp).unwrap()), b"3 0 2 0\n".to_vec());
    }
}
