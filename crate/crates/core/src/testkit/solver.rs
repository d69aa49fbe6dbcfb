//! A small proof-logging CDCL solver.
//!
//! Watched literals, first-UIP learning, phase saving, geometric restarts and a
//! linear-scan activity heuristic. Every learned clause is logged as a DRAT
//! addition and every clause-database deletion as a DRAT deletion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Clause, Formula, Lit, Var};
use crate::formats::ProofStep;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    /// One literal per variable `1..=num_vars`.
    Sat(Vec<Lit>),
    /// DRAT proof ending with the empty clause.
    Unsat(Vec<ProofStep>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_unsat(&self) -> bool {
        matches!(self.status, SolveStatus::Unsat(_))
    }
}

const FIRST_RESTART: u64 = 100;
const RESTART_GROWTH: f64 = 1.5;
const ACTIVITY_DECAY: f64 = 0.95;

struct StoredClause {
    lits: Vec<Lit>,
    learned: bool,
    deleted: bool,
}

struct Solver {
    clauses: Vec<StoredClause>,
    watches: Vec<Vec<usize>>,
    /// Per variable index: assigned polarity.
    values: Vec<Option<bool>>,
    levels: Vec<usize>,
    reasons: Vec<Option<usize>>,
    saved_phase: Vec<bool>,
    activity: Vec<f64>,
    bump: f64,
    trail: Vec<Lit>,
    trail_limits: Vec<usize>,
    queue_head: usize,
    proof: Vec<ProofStep>,
    stats: SolveStats,
    max_learned: usize,
}

impl Solver {
    fn value(&self, lit: Lit) -> Option<bool> {
        self.values[lit.var().index() as usize].map(|v| v == lit.is_positive())
    }

    fn level(&self) -> usize {
        self.trail_limits.len()
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<usize>) {
        let v = lit.var().index() as usize;
        self.values[v] = Some(lit.is_positive());
        self.levels[v] = self.level();
        self.reasons[v] = reason;
        self.trail.push(lit);
    }

    fn attach(&mut self, lits: Vec<Lit>, learned: bool) -> usize {
        let index = self.clauses.len();
        self.watches[lits[0].code()].push(index);
        self.watches[lits[1].code()].push(index);
        self.clauses.push(StoredClause { lits, learned, deleted: false });
        index
    }

    /// Returns the index of a falsified clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.queue_head < self.trail.len() {
            let false_lit = !self.trail[self.queue_head];
            self.queue_head += 1;
            self.stats.propagations += 1;
            let mut watching = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut kept = 0;
            let mut conflict = None;
            let mut position = 0;
            while position < watching.len() {
                let index = watching[position];
                position += 1;
                if self.clauses[index].deleted {
                    continue;
                }
                if conflict.is_some() {
                    watching[kept] = index;
                    kept += 1;
                    continue;
                }
                let lits = &mut self.clauses[index].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let other = lits[0];
                if self.values[other.var().index() as usize] == Some(other.is_positive()) {
                    watching[kept] = index;
                    kept += 1;
                    continue;
                }
                let replacement = (2..lits.len()).find(|&i| {
                    let lit = lits[i];
                    self.values[lit.var().index() as usize] != Some(!lit.is_positive())
                });
                if let Some(i) = replacement {
                    lits.swap(1, i);
                    let new_watch = lits[1];
                    self.watches[new_watch.code()].push(index);
                    continue;
                }
                watching[kept] = index;
                kept += 1;
                match self.value(other) {
                    Some(false) => conflict = Some(index),
                    _ => self.enqueue(other, Some(index)),
                }
            }
            watching.truncate(kept);
            let slot = &mut self.watches[false_lit.code()];
            watching.append(slot);
            *slot = watching;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP clause with the asserting literal first, and the backjump level.
    /// Literals false at level zero are dropped.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, usize) {
        let mut seen = vec![false; self.values.len()];
        let mut learned = vec![];
        let mut pending = 0;
        let mut clause = conflict;
        let mut index = self.trail.len();
        loop {
            for i in 0..self.clauses[clause].lits.len() {
                let lit = self.clauses[clause].lits[i];
                let v = lit.var().index() as usize;
                if seen[v] || self.levels[v] == 0 {
                    continue;
                }
                seen[v] = true;
                self.activity[v] += self.bump;
                if self.levels[v] == self.level() {
                    pending += 1;
                } else {
                    learned.push(lit);
                }
            }
            let lit = loop {
                index -= 1;
                if seen[self.trail[index].var().index() as usize] {
                    break self.trail[index];
                }
            };
            pending -= 1;
            if pending == 0 {
                learned.insert(0, !lit);
                break;
            }
            clause = self.reasons[lit.var().index() as usize].expect("implied literal");
        }
        self.bump /= ACTIVITY_DECAY;
        if self.bump > 1e100 {
            self.activity.iter_mut().for_each(|a| *a *= 1e-100);
            self.bump *= 1e-100;
        }
        // second watch on the deepest remaining level
        let mut backjump = 0;
        if learned.len() > 1 {
            let deepest = (1..learned.len())
                .max_by_key(|&i| self.levels[learned[i].var().index() as usize])
                .expect("non-empty tail");
            learned.swap(1, deepest);
            backjump = self.levels[learned[1].var().index() as usize];
        }
        (learned, backjump)
    }

    fn backtrack(&mut self, level: usize) {
        if self.level() <= level {
            return;
        }
        let start = self.trail_limits[level];
        for lit in self.trail.drain(start..) {
            let v = lit.var().index() as usize;
            self.saved_phase[v] = lit.is_positive();
            self.values[v] = None;
            self.reasons[v] = None;
        }
        self.trail_limits.truncate(level);
        self.queue_head = start;
    }

    fn decide(&mut self) -> Option<Lit> {
        let v = (1..self.values.len())
            .filter(|&v| self.values[v].is_none())
            .max_by(|&a, &b| self.activity[a].total_cmp(&self.activity[b]).then(b.cmp(&a)))?;
        Some(Var::new(v as u32).expect("index from 1").lit(self.saved_phase[v]))
    }

    fn is_locked(&self, index: usize) -> bool {
        let lits = &self.clauses[index].lits;
        lits.iter().any(|&lit| {
            let v = lit.var().index() as usize;
            self.value(lit) == Some(true) && self.reasons[v] == Some(index)
        })
    }

    /// Deletes the older half of the unlocked learned clauses longer than two literals.
    fn reduce(&mut self) {
        let candidates: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learned && !c.deleted && c.lits.len() > 2 && !self.is_locked(i)
            })
            .collect();
        for &index in &candidates[..candidates.len() / 2] {
            self.clauses[index].deleted = true;
            let lits = self.clauses[index].lits.clone();
            self.proof.push(ProofStep::Delete(Clause::from_lits(lits)));
        }
        self.max_learned += (self.max_learned / 10).max(1);
    }

    fn learned_count(&self) -> usize {
        self.clauses.iter().filter(|c| c.learned && !c.deleted).count()
    }
}

/// Solves `formula`; `seed` perturbs the initial variable order.
pub fn cdcl_solve(formula: &Formula, seed: u64) -> SolveResult {
    let num_vars = formula
        .iter()
        .filter_map(|(_, c)| c.max_var())
        .map(Var::index)
        .fold(formula.num_vars(), u32::max) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut solver = Solver {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * num_vars + 2],
        values: vec![None; num_vars + 1],
        levels: vec![0; num_vars + 1],
        reasons: vec![None; num_vars + 1],
        saved_phase: vec![false; num_vars + 1],
        activity: (0..=num_vars).map(|_| rng.random::<f64>() * 1e-3).collect(),
        bump: 1.0,
        trail: Vec::new(),
        trail_limits: Vec::new(),
        queue_head: 0,
        proof: Vec::new(),
        stats: SolveStats::default(),
        max_learned: (formula.len() / 8).max(4),
    };
    let unsat = |mut solver: Solver| {
        solver.proof.push(ProofStep::Add(Clause::empty()));
        SolveResult {
            status: SolveStatus::Unsat(solver.proof),
            stats: solver.stats,
        }
    };

    for (_, clause) in formula.iter() {
        if clause.is_tautology() {
            continue;
        }
        match clause.lits() {
            [] => return unsat(solver),
            &[lit] => match solver.value(lit) {
                Some(false) => return unsat(solver),
                Some(true) => {}
                None => solver.enqueue(lit, None),
            },
            lits => {
                solver.attach(lits.to_vec(), false);
            }
        }
    }

    let mut restart_limit = FIRST_RESTART as f64;
    let mut conflicts_since_restart = 0u64;
    loop {
        if let Some(conflict) = solver.propagate() {
            solver.stats.conflicts += 1;
            conflicts_since_restart += 1;
            if solver.level() == 0 {
                return unsat(solver);
            }
            let (learned, backjump) = solver.analyze(conflict);
            solver.proof.push(ProofStep::Add(Clause::from_lits(learned.iter().copied())));
            solver.backtrack(backjump);
            let asserting = learned[0];
            if learned.len() == 1 {
                solver.enqueue(asserting, None);
            } else {
                let index = solver.attach(learned, true);
                solver.enqueue(asserting, Some(index));
            }
            if solver.learned_count() > solver.max_learned {
                solver.reduce();
            }
            continue;
        }
        if conflicts_since_restart as f64 >= restart_limit {
            conflicts_since_restart = 0;
            restart_limit *= RESTART_GROWTH;
            solver.backtrack(0);
            continue;
        }
        match solver.decide() {
            Some(lit) => {
                solver.stats.decisions += 1;
                solver.trail_limits.push(solver.trail.len());
                solver.enqueue(lit, None);
            }
            None => {
                let model = (1..=num_vars)
                    .map(|v| {
                        Var::new(v as u32)
                            .expect("index from 1")
                            .lit(solver.values[v].unwrap_or(false))
                    })
                    .collect();
                return SolveResult {
                    status: SolveStatus::Sat(model),
                    stats: solver.stats,
                };
            }
        }
    }
}
