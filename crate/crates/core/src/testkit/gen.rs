//! Formula and proof generators.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Clause, Formula, Var};
use crate::formats::ProofStep;
use crate::propagate::{Engine, RatOutcome};

use super::solver::{cdcl_solve, SolveStatus};

fn var(index: u32) -> Var {
    Var::new(index).expect("positive variable index")
}

/// Pigeonhole formula: `n + 1` pigeons, `n` holes. Pigeon `i` in hole `j` is
/// variable `(i - 1) * n + j`.
pub fn gen_php(n: u32) -> Formula {
    assert!(n >= 1, "at least one hole");
    let x = |i: u32, j: u32| var((i - 1) * n + j);
    let mut formula = Formula::new();
    for i in 1..=n + 1 {
        formula.add_clause((1..=n).map(|j| x(i, j).positive()).collect());
    }
    for j in 1..=n {
        for i in 1..=n + 1 {
            for k in i + 1..=n + 1 {
                formula.add_clause(Clause::from_lits([x(i, j).negative(), x(k, j).negative()]));
            }
        }
    }
    formula.declare_vars(n * (n + 1));
    formula
}

fn random_clause(rng: &mut ChaCha8Rng, vars: u32, width: usize) -> Clause {
    sample(rng, vars as usize, width.min(vars as usize))
        .into_iter()
        .map(|i| var(i as u32 + 1).lit(rng.random()))
        .collect()
}

/// `clauses` random clauses of `width` distinct variables over `1..=vars`.
pub fn gen_random(vars: u32, clauses: usize, width: usize, seed: u64) -> Formula {
    gen_random_widths(vars, clauses, width, width, seed)
}

/// Like [`gen_random`] with each clause width drawn uniformly from `min_width..=max_width`.
pub fn gen_random_widths(vars: u32, clauses: usize, min_width: usize, max_width: usize, seed: u64) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut formula = Formula::new();
    for _ in 0..clauses {
        let width = rng.random_range(min_width..=max_width);
        formula.add_clause(random_clause(&mut rng, vars, width));
    }
    formula.declare_vars(vars);
    formula
}

/// A DRAT refutation of `formula` that starts with RAT additions.
///
/// The prefix holds up to `attempts` candidates that passed a RAT check on their
/// first literal without being RUP: random short clauses, and definitions
/// `x <-> (a & b)` of fresh variables. The solver then refutes the formula extended
/// by the prefix. Returns `None` if the formula is satisfiable.
pub fn gen_rat_proof(formula: &Formula, attempts: usize, seed: u64) -> Option<Vec<ProofStep>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut engine = Engine::new(formula.clone());
    let mut prefix = Vec::new();
    let base_vars = formula.num_vars().max(1);
    let mut next_var = base_vars + 1;

    for _ in 0..attempts {
        if rng.random_bool(0.25) && base_vars >= 2 {
            let x = var(next_var);
            next_var += 1;
            let picked = sample(&mut rng, base_vars as usize, 2);
            let a = var(picked.index(0) as u32 + 1).lit(rng.random());
            let b = var(picked.index(1) as u32 + 1).lit(rng.random());
            for clause in [
                Clause::from_lits([x.positive(), !a, !b]),
                Clause::from_lits([x.negative(), a]),
                Clause::from_lits([x.negative(), b]),
            ] {
                if !try_rat(&mut engine, &clause) {
                    break;
                }
                prefix.push(ProofStep::Add(clause));
            }
        } else {
            let width = rng.random_range(1..=3);
            let clause = random_clause(&mut rng, base_vars, width);
            if try_rat(&mut engine, &clause) {
                prefix.push(ProofStep::Add(clause));
            }
        }
    }

    let seed_for_solver = rng.random();
    match cdcl_solve(engine.formula(), seed_for_solver).status {
        SolveStatus::Unsat(proof) => {
            prefix.extend(proof);
            Some(prefix)
        }
        SolveStatus::Sat(_) => None,
    }
}

/// Adds `clause` if it is a proper RAT on its first literal.
fn try_rat(engine: &mut Engine, clause: &Clause) -> bool {
    let Some(&pivot) = clause.lits().first() else {
        return false;
    };
    if clause.is_tautology() || engine.check_rup(clause).is_rup() {
        return false;
    }
    match engine.check_rat(clause, pivot) {
        Ok(RatOutcome::Rat(_)) => {
            engine.add_clause(clause.clone());
            true
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::oracle::brute_force;

    #[test]
    fn php_sizes() {
        let php2 = gen_php(2);
        assert_eq!((php2.num_vars(), php2.len()), (6, 9));
        let php1 = gen_php(1);
        assert_eq!((php1.num_vars(), php1.len()), (2, 3));
        assert!(!brute_force(&php1).unwrap().is_sat());
        assert_eq!(php2.clause(crate::cnf::ClauseId(3)).unwrap().to_dimacs(), vec![5, 6]);
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(gen_random(5, 20, 3, 7), gen_random(5, 20, 3, 7));
        assert_ne!(gen_random(5, 20, 3, 7), gen_random(5, 20, 3, 8));
        let f = gen_random(5, 20, 3, 7);
        assert!(f.iter().all(|(_, c)| c.len() == 3 && !c.is_tautology()));
    }
}
