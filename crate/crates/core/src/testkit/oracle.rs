//! Semantic oracles that share no code with the propagation engine.

use std::collections::{BTreeMap, HashMap};

use crate::cnf::{Clause, Formula, Lit, Var};
use crate::error::{Error, Result};

/// Largest number of distinct variables [`brute_force`] accepts.
pub const ORACLE_VAR_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    /// One literal per variable occurring in the clauses.
    Sat(Vec<Lit>),
    Unsat,
}

impl Satisfiability {
    pub fn is_sat(&self) -> bool {
        matches!(self, Satisfiability::Sat(_))
    }
}

/// Clauses as bit masks over the compacted list of occurring variables.
struct Masks {
    vars: Vec<Var>,
    clauses: Vec<(u32, u32)>,
    has_empty: bool,
}

fn masks<'a>(clauses: impl Iterator<Item = &'a Clause>, extra: &[Lit]) -> Result<Masks> {
    let mut index: BTreeMap<Var, usize> = BTreeMap::new();
    let collected: Vec<Vec<Lit>> = clauses
        .map(|c| c.lits().to_vec())
        .chain(extra.iter().map(|&lit| vec![lit]))
        .collect();
    for lit in collected.iter().flatten() {
        let next = index.len();
        index.entry(lit.var()).or_insert(next);
    }
    if index.len() > ORACLE_VAR_CAP {
        return Err(Error::OracleRange {
            vars: index.len(),
            cap: ORACLE_VAR_CAP,
        });
    }
    let mut vars = vec![Var::new(1).unwrap(); index.len()];
    for (&var, &i) in &index {
        vars[i] = var;
    }
    let mut has_empty = false;
    let clauses = collected
        .iter()
        .map(|lits| {
            has_empty |= lits.is_empty();
            lits.iter().fold((0u32, 0u32), |(pos, neg), lit| {
                let bit = 1u32 << index[&lit.var()];
                if lit.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    Ok(Masks { vars, clauses, has_empty })
}

fn enumerate(m: &Masks) -> Satisfiability {
    if m.has_empty {
        return Satisfiability::Unsat;
    }
    let n = m.vars.len();
    for assignment in 0u32..(1u32 << n) {
        let satisfied = m
            .clauses
            .iter()
            .all(|&(pos, neg)| assignment & pos != 0 || !assignment & neg != 0);
        if satisfied {
            let model = m
                .vars
                .iter()
                .enumerate()
                .map(|(i, var)| var.lit(assignment >> i & 1 == 1))
                .collect();
            return Satisfiability::Sat(model);
        }
    }
    Satisfiability::Unsat
}

/// Exhaustive truth-table search.
pub fn brute_force(formula: &Formula) -> Result<Satisfiability> {
    Ok(enumerate(&masks(formula.iter().map(|(_, c)| c), &[])?))
}

/// Whether every model of `formula` satisfies `clause`.
pub fn entails(formula: &Formula, clause: &Clause) -> Result<bool> {
    let negation: Vec<Lit> = clause.lits().iter().map(|&lit| !lit).collect();
    Ok(!enumerate(&masks(formula.iter().map(|(_, c)| c), &negation)?).is_sat())
}

/// Like [`entails`], for a plain clause list.
pub fn clauses_entail(clauses: &[Clause], clause: &Clause) -> Result<bool> {
    let negation: Vec<Lit> = clause.lits().iter().map(|&lit| !lit).collect();
    Ok(!enumerate(&masks(clauses.iter(), &negation)?).is_sat())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveOutcome {
    Conflict,
    /// Assigned literals at the fixpoint, sorted.
    Fixpoint(Vec<Lit>),
}

/// Unit propagation by repeated full passes over the clauses until nothing changes.
pub fn naive_propagate(formula: &Formula, assumptions: &[Lit]) -> NaiveOutcome {
    let mut value: HashMap<Var, bool> = HashMap::new();
    for &lit in assumptions {
        match value.insert(lit.var(), lit.is_positive()) {
            Some(previous) if previous != lit.is_positive() => return NaiveOutcome::Conflict,
            _ => {}
        }
    }
    let lit_value = |value: &HashMap<Var, bool>, lit: Lit| {
        value.get(&lit.var()).map(|&v| v == lit.is_positive())
    };
    loop {
        let mut changed = false;
        for (_, clause) in formula.iter() {
            if clause.is_tautology() {
                continue;
            }
            let mut open = Vec::new();
            let mut satisfied = false;
            for &lit in clause.lits() {
                match lit_value(&value, lit) {
                    Some(true) => satisfied = true,
                    Some(false) => {}
                    None => open.push(lit),
                }
            }
            if satisfied {
                continue;
            }
            match open[..] {
                [] => return NaiveOutcome::Conflict,
                [lit] => {
                    value.insert(lit.var(), lit.is_positive());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            let mut lits: Vec<Lit> = value.iter().map(|(&var, &v)| var.lit(v)).collect();
            lits.sort_unstable();
            return NaiveOutcome::Fixpoint(lits);
        }
    }
}

pub fn naive_rup(formula: &Formula, clause: &Clause) -> bool {
    let negation: Vec<Lit> = clause.lits().iter().map(|&lit| !lit).collect();
    naive_propagate(formula, &negation) == NaiveOutcome::Conflict
}

/// RAT on `pivot` with the resolvent `clause | (D - {-pivot})` for every clause `D`
/// containing `-pivot`.
pub fn naive_rat(formula: &Formula, clause: &Clause, pivot: Lit) -> bool {
    formula
        .iter()
        .filter(|(_, d)| d.contains(!pivot))
        .all(|(_, d)| {
            let resolvent: Clause = clause
                .lits()
                .iter()
                .chain(d.lits().iter().filter(|&&lit| lit != !pivot))
                .copied()
                .collect();
            resolvent.is_tautology() || naive_rup(formula, &resolvent)
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(raw: &[i64]) -> Clause {
        Clause::from_dimacs(raw).unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(brute_force(&Formula::from_dimacs(&[&[1], &[-1]])).unwrap(), Satisfiability::Unsat);
        let Satisfiability::Sat(model) = brute_force(&Formula::from_dimacs(&[&[1, 2]])).unwrap() else {
            panic!()
        };
        assert!(model.iter().any(|l| l.to_dimacs() == 1 || l.to_dimacs() == 2));
        assert!(entails(&Formula::from_dimacs(&[&[1], &[-1, 2]]), &clause(&[2])).unwrap());
        assert!(!entails(&Formula::from_dimacs(&[&[1, 2]]), &clause(&[1])).unwrap());
        assert!(brute_force(&Formula::new()).unwrap().is_sat());
        assert!(!brute_force(&Formula::from_dimacs(&[&[]])).unwrap().is_sat());
    }

    #[test]
    fn variable_cap() {
        let wide: Vec<i64> = (1..=25).collect();
        let f = Formula::from_dimacs(&[&wide]);
        assert_eq!(brute_force(&f), Err(Error::OracleRange { vars: 25, cap: 24 }));
    }

    #[test]
    fn naive_checks() {
        let f = Formula::from_dimacs(&[&[1], &[-1, 2]]);
        assert_eq!(
            naive_propagate(&f, &[]),
            NaiveOutcome::Fixpoint(vec![Lit::from_dimacs(1).unwrap(), Lit::from_dimacs(2).unwrap()])
        );
        assert!(naive_rup(&f, &clause(&[2])));
        let g = Formula::from_dimacs(&[&[1, 2], &[-1, 2]]);
        assert!(!naive_rup(&g, &clause(&[1])));
        assert!(naive_rat(&g, &clause(&[1]), Lit::from_dimacs(1).unwrap()));
        assert!(!naive_rat(&Formula::from_dimacs(&[&[-1, 2], &[-1, 3]]), &clause(&[1]), Lit::from_dimacs(1).unwrap()));
    }
}
