//! Two-watched-literal unit propagation with exact rollback, and the RUP / RAT
//! redundancy checks built on it.
//!
//! The engine owns a [`Formula`] and keeps its watch lists in sync with it. Clause
//! additions and removals are only allowed while the trail is empty. Every check
//! starts from the current trail, propagates, and rolls back both the trail and any
//! watch movements, so the engine is bit-for-bit unchanged afterwards.
//!
//! Iteration order is fixed everywhere (unit clauses by id, FIFO propagation queue,
//! watch lists in insertion order), which makes counters and chains reproducible.

use std::collections::{BTreeSet, HashMap};

use crate::cnf::{Clause, ClauseId, Formula, Lit, Var};
use crate::error::{Error, Result};
use crate::formats::RatGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Assumption,
    Clause(ClauseId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailEntry {
    pub lit: Lit,
    pub reason: Reason,
}

/// Rollback point for [`Engine::rollback`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark {
    trail: usize,
    undo: usize,
    queue_head: usize,
    seeded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    Conflict(ClauseId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationOutcome {
    pub result: Propagation,
    /// Clause inspections performed by this call.
    pub visited_clauses: u64,
    /// On conflict: the reasons that contributed to it in propagation order,
    /// followed by the conflict clause.
    pub antecedents: Vec<ClauseId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RupOutcome {
    /// Propagation chain usable as an LRAT hint list. Empty when the clause is a
    /// tautology (its negation is contradictory by itself).
    Rup(Vec<ClauseId>),
    NotRup,
}

impl RupOutcome {
    pub fn is_rup(&self) -> bool {
        matches!(self, RupOutcome::Rup(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuidedOutcome {
    Rup,
    /// The hint at this position was neither unit nor falsified, or the chain
    /// ended (position = chain length) without a conflict.
    BadHint(usize),
    /// The hint at this position does not name a live clause.
    UnknownId(usize),
}

/// How far a hint replay got.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replay {
    /// The hint at this position was falsified.
    Conflict(usize),
    /// Every hint was unit; no conflict yet.
    Exhausted,
    BadHint(usize),
    UnknownId(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatOutcome {
    /// One group per candidate clause containing the negated pivot, in id order.
    /// Candidates whose resolvent is a tautology get an empty chain.
    Rat(Vec<RatGroup>),
    /// The resolvent with this candidate is not RUP.
    NotRat { candidate: ClauseId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotPolicy {
    /// Only the first literal of the clause as written.
    #[default]
    FirstLiteral,
    /// Every literal, in clause order.
    Any,
}

/// Result of assuming a literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumed {
    Assigned,
    AlreadyTrue,
    /// The literal is already false.
    Contradiction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Watched,
    Unit,
    Empty,
    Tautology,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Slot {
    id: ClauseId,
    lits: Box<[Lit]>,
    watch: [usize; 2],
    kind: Kind,
    live: bool,
}

/// A watch that moved from one literal's list to another's.
#[derive(Debug, Clone, PartialEq, Eq)]
struct WatchMove {
    slot: u32,
    which: usize,
    old_pos: usize,
    from: Lit,
    from_index: usize,
    to: Lit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Engine {
    formula: Formula,
    slots: Vec<Slot>,
    slot_of: HashMap<ClauseId, u32>,
    watches: Vec<Vec<u32>>,
    units: BTreeSet<ClauseId>,
    empties: BTreeSet<ClauseId>,
    values: Vec<Option<bool>>,
    reasons: Vec<Option<u32>>,
    seen: Vec<bool>,
    trail: Vec<TrailEntry>,
    queue_head: usize,
    seeded: bool,
    undo: Vec<WatchMove>,
    visited: u64,
}

impl Default for Engine {
    fn default() -> Engine {
        Engine::new(Formula::new())
    }
}

impl Engine {
    pub fn new(formula: Formula) -> Engine {
        let mut engine = Engine {
            formula: Formula::new(),
            slots: Vec::new(),
            slot_of: HashMap::new(),
            watches: Vec::new(),
            units: BTreeSet::new(),
            empties: BTreeSet::new(),
            values: Vec::new(),
            reasons: Vec::new(),
            seen: Vec::new(),
            trail: Vec::new(),
            queue_head: 0,
            seeded: false,
            undo: Vec::new(),
            visited: 0,
        };
        for (id, clause) in formula.iter() {
            engine.attach(id, clause);
        }
        engine.formula = formula;
        engine
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn into_formula(self) -> Formula {
        self.formula
    }

    /// Total clause inspections since the engine was created.
    pub fn visited(&self) -> u64 {
        self.visited
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }

    /// Watch lists as clause ids, indexed by literal code. Trailing empty lists are
    /// omitted, so lists allocated for variables that only a check mentioned do not show.
    pub fn watch_lists(&self) -> Vec<Vec<ClauseId>> {
        let used = self.watches.iter().rposition(|list| !list.is_empty()).map_or(0, |i| i + 1);
        self.watches[..used]
            .iter()
            .map(|list| list.iter().map(|&s| self.slots[s as usize].id).collect())
            .collect()
    }

    pub fn add_clause(&mut self, clause: Clause) -> ClauseId {
        assert!(self.trail.is_empty(), "clauses change only at the top level");
        let id = self.formula.add_clause(clause.clone());
        self.attach(id, &clause);
        id
    }

    pub fn insert_clause(&mut self, id: ClauseId, clause: Clause) -> Result<()> {
        assert!(self.trail.is_empty(), "clauses change only at the top level");
        self.formula.insert_clause(id, clause.clone())?;
        self.attach(id, &clause);
        Ok(())
    }

    pub fn remove_clause(&mut self, id: ClauseId) -> Result<Clause> {
        assert!(self.trail.is_empty(), "clauses change only at the top level");
        let clause = self.formula.remove_clause(id)?;
        self.detach(id);
        Ok(clause)
    }

    /// Removes one live clause with exactly these literals, if any.
    pub fn remove_matching(&mut self, clause: &Clause) -> Option<ClauseId> {
        let id = *self.formula.find(clause).last()?;
        self.remove_clause(id).ok()?;
        Some(id)
    }

    fn ensure_var(&mut self, var: Var) {
        let needed = var.index() as usize + 1;
        if self.values.len() < needed {
            self.values.resize(needed, None);
            self.reasons.resize(needed, None);
            self.seen.resize(needed, false);
            self.watches.resize_with(2 * needed, Vec::new);
        }
    }

    fn attach(&mut self, id: ClauseId, clause: &Clause) {
        if let Some(var) = clause.max_var() {
            self.ensure_var(var);
        }
        let slot = self.slots.len() as u32;
        let kind = match clause.len() {
            0 => Kind::Empty,
            1 => Kind::Unit,
            _ if clause.is_tautology() => Kind::Tautology,
            _ => Kind::Watched,
        };
        match kind {
            Kind::Empty => {
                self.empties.insert(id);
            }
            Kind::Unit => {
                self.units.insert(id);
            }
            Kind::Watched => {
                self.watches[clause.lits()[0].code()].push(slot);
                self.watches[clause.lits()[1].code()].push(slot);
            }
            Kind::Tautology => {}
        }
        self.slots.push(Slot {
            id,
            lits: clause.lits().into(),
            watch: [0, 1],
            kind,
            live: true,
        });
        self.slot_of.insert(id, slot);
    }

    fn detach(&mut self, id: ClauseId) {
        let slot = self.slot_of.remove(&id).expect("attached clause");
        let entry = &mut self.slots[slot as usize];
        entry.live = false;
        match entry.kind {
            Kind::Empty => {
                self.empties.remove(&id);
            }
            Kind::Unit => {
                self.units.remove(&id);
            }
            Kind::Watched => {
                for which in 0..2 {
                    let lit = entry.lits[entry.watch[which]];
                    self.watches[lit.code()].retain(|&s| s != slot);
                }
            }
            Kind::Tautology => {}
        }
    }

    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.values
            .get(lit.var().index() as usize)
            .copied()
            .flatten()
            .map(|positive| positive == lit.is_positive())
    }

    fn assign(&mut self, lit: Lit, reason: Option<u32>) {
        let var = lit.var().index() as usize;
        self.values[var] = Some(lit.is_positive());
        self.reasons[var] = reason;
        self.trail.push(TrailEntry {
            lit,
            reason: match reason {
                Some(slot) => Reason::Clause(self.slots[slot as usize].id),
                None => Reason::Assumption,
            },
        });
    }

    pub fn mark(&self) -> Mark {
        Mark {
            trail: self.trail.len(),
            undo: self.undo.len(),
            queue_head: self.queue_head,
            seeded: self.seeded,
        }
    }

    /// Restores the trail and the watch lists to the state at `mark`.
    pub fn rollback(&mut self, mark: Mark) {
        for entry in self.trail.drain(mark.trail..) {
            let var = entry.lit.var().index() as usize;
            self.values[var] = None;
            self.reasons[var] = None;
        }
        while self.undo.len() > mark.undo {
            let m = self.undo.pop().unwrap();
            let moved = self.watches[m.to.code()].pop();
            debug_assert_eq!(moved, Some(m.slot));
            let list = &mut self.watches[m.from.code()];
            list.push(m.slot);
            let last = list.len() - 1;
            list.swap(m.from_index, last);
            self.slots[m.slot as usize].watch[m.which] = m.old_pos;
        }
        self.queue_head = mark.queue_head;
        self.seeded = mark.seeded;
    }

    pub fn assume(&mut self, lit: Lit) -> Assumed {
        self.ensure_var(lit.var());
        match self.value(lit) {
            Some(true) => Assumed::AlreadyTrue,
            Some(false) => Assumed::Contradiction,
            None => {
                self.assign(lit, None);
                Assumed::Assigned
            }
        }
    }

    /// Assumes the negation of every literal; `false` if that is contradictory.
    fn assume_negation(&mut self, clause: &Clause) -> bool {
        clause
            .lits()
            .iter()
            .all(|&lit| self.assume(!lit) != Assumed::Contradiction)
    }

    /// Extends the trail to a unit-propagation fixpoint or stops at the first conflict.
    ///
    /// The first call after a top-level rollback also processes the empty and unit
    /// clauses of the formula, which cannot be watched.
    pub fn propagate(&mut self) -> PropagationOutcome {
        let start = self.visited;
        let result = self.run_propagation();
        let antecedents = match result {
            Propagation::Conflict(id) => self.analyze(id),
            Propagation::Fixpoint => Vec::new(),
        };
        PropagationOutcome {
            result,
            visited_clauses: self.visited - start,
            antecedents,
        }
    }

    fn run_propagation(&mut self) -> Propagation {
        if !self.seeded {
            self.seeded = true;
            if let Some(&id) = self.empties.iter().next() {
                self.visited += 1;
                return Propagation::Conflict(id);
            }
            let units: Vec<ClauseId> = self.units.iter().copied().collect();
            for id in units {
                self.visited += 1;
                let slot = self.slot_of[&id];
                let lit = self.slots[slot as usize].lits[0];
                match self.value(lit) {
                    Some(true) => {}
                    Some(false) => return Propagation::Conflict(id),
                    None => self.assign(lit, Some(slot)),
                }
            }
        }

        while self.queue_head < self.trail.len() {
            let falsified = !self.trail[self.queue_head].lit;
            self.queue_head += 1;
            let mut i = 0;
            while i < self.watches[falsified.code()].len() {
                let slot = self.watches[falsified.code()][i];
                self.visited += 1;
                let s = &self.slots[slot as usize];
                let which = if s.lits[s.watch[0]] == falsified { 0 } else { 1 };
                let other = s.lits[s.watch[1 - which]];
                if self.value(other) == Some(true) {
                    i += 1;
                    continue;
                }
                let replacement = (0..s.lits.len()).find(|&j| {
                    j != s.watch[0] && j != s.watch[1] && self.value(s.lits[j]) != Some(false)
                });
                if let Some(j) = replacement {
                    let to = s.lits[j];
                    let old_pos = s.watch[which];
                    self.watches[falsified.code()].swap_remove(i);
                    self.watches[to.code()].push(slot);
                    self.slots[slot as usize].watch[which] = j;
                    self.undo.push(WatchMove {
                        slot,
                        which,
                        old_pos,
                        from: falsified,
                        from_index: i,
                        to,
                    });
                    continue;
                }
                if self.value(other) == Some(false) {
                    return Propagation::Conflict(self.slots[slot as usize].id);
                }
                self.assign(other, Some(slot));
                i += 1;
            }
        }
        Propagation::Fixpoint
    }

    /// Reasons contributing to the conflict, in propagation order, then the
    /// conflict clause itself.
    fn analyze(&mut self, conflict: ClauseId) -> Vec<ClauseId> {
        let conflict_slot = self.slot_of[&conflict] as usize;
        for &lit in self.slots[conflict_slot].lits.iter() {
            self.seen[lit.var().index() as usize] = true;
        }
        let mut chain = Vec::new();
        for entry in self.trail.iter().rev() {
            let var = entry.lit.var().index() as usize;
            if !self.seen[var] {
                continue;
            }
            if let Some(slot) = self.reasons[var] {
                let reason = &self.slots[slot as usize];
                chain.push(reason.id);
                for &lit in reason.lits.iter() {
                    self.seen[lit.var().index() as usize] = true;
                }
            }
        }
        chain.reverse();
        chain.push(conflict);
        for entry in &self.trail {
            self.seen[entry.lit.var().index() as usize] = false;
        }
        for &lit in self.slots[conflict_slot].lits.iter() {
            self.seen[lit.var().index() as usize] = false;
        }
        chain
    }

    /// Reverse unit propagation: assume the negation of `clause` and propagate.
    pub fn check_rup(&mut self, clause: &Clause) -> RupOutcome {
        let mark = self.mark();
        let outcome = if !self.assume_negation(clause) {
            RupOutcome::Rup(Vec::new())
        } else {
            let propagation = self.propagate();
            match propagation.result {
                Propagation::Conflict(_) => RupOutcome::Rup(propagation.antecedents),
                Propagation::Fixpoint => RupOutcome::NotRup,
            }
        };
        self.rollback(mark);
        outcome
    }

    /// Consumes hints left to right under the current trail. Each hinted clause must
    /// be unit (its literal gets assigned) or falsified (replay stops there).
    pub fn replay_hints(&mut self, chain: &[ClauseId]) -> Replay {
        for (position, id) in chain.iter().enumerate() {
            let Some(&slot) = self.slot_of.get(id) else {
                return Replay::UnknownId(position);
            };
            self.visited += 1;
            let mut open = None;
            let mut open_count = 0;
            for &lit in self.slots[slot as usize].lits.iter() {
                match self.value(lit) {
                    Some(true) => return Replay::BadHint(position),
                    Some(false) => {}
                    None => {
                        open_count += 1;
                        open = Some(lit);
                    }
                }
            }
            match (open_count, open) {
                (0, _) => return Replay::Conflict(position),
                (1, Some(lit)) => self.assign(lit, Some(slot)),
                _ => return Replay::BadHint(position),
            }
        }
        Replay::Exhausted
    }

    /// RUP check driven by a hint chain instead of free propagation.
    pub fn check_rup_guided(&mut self, clause: &Clause, chain: &[ClauseId]) -> GuidedOutcome {
        let mark = self.mark();
        let outcome = if !self.assume_negation(clause) {
            GuidedOutcome::Rup
        } else {
            match self.replay_hints(chain) {
                Replay::Conflict(_) => GuidedOutcome::Rup,
                Replay::Exhausted => GuidedOutcome::BadHint(chain.len()),
                Replay::BadHint(position) => GuidedOutcome::BadHint(position),
                Replay::UnknownId(position) => GuidedOutcome::UnknownId(position),
            }
        };
        self.rollback(mark);
        outcome
    }

    /// RAT check on `pivot`: every resolution candidate `D` (a live clause containing
    /// `-pivot`) must make `clause | (D - {-pivot})` a RUP.
    pub fn check_rat(&mut self, clause: &Clause, pivot: Lit) -> Result<RatOutcome> {
        if !clause.contains(pivot) {
            return Err(Error::PivotNotInClause(pivot));
        }
        let candidates: Vec<ClauseId> = self.formula.occurrences(!pivot).collect();
        let mut groups = Vec::with_capacity(candidates.len());
        for candidate in candidates {
            let resolvent = self.resolution_candidate(clause, pivot, candidate);
            if resolvent.is_tautology() {
                groups.push(RatGroup { candidate, chain: Vec::new() });
                continue;
            }
            match self.check_rup(&resolvent) {
                RupOutcome::Rup(chain) => groups.push(RatGroup { candidate, chain }),
                RupOutcome::NotRup => return Ok(RatOutcome::NotRat { candidate }),
            }
        }
        Ok(RatOutcome::Rat(groups))
    }

    /// `clause | (candidate - {-pivot})`, keeping the clause's literals first.
    pub fn resolution_candidate(&self, clause: &Clause, pivot: Lit, candidate: ClauseId) -> Clause {
        let other = self.formula.clause(candidate).expect("live candidate");
        clause
            .lits()
            .iter()
            .copied()
            .chain(other.lits().iter().copied().filter(|&lit| lit != !pivot))
            .collect()
    }

    /// Searches for a pivot under `policy`; returns it with its RAT groups.
    pub fn find_pivot(&mut self, clause: &Clause, policy: PivotPolicy) -> Option<(Lit, Vec<RatGroup>)> {
        let tried = match policy {
            PivotPolicy::FirstLiteral => clause.len().min(1),
            PivotPolicy::Any => clause.len(),
        };
        for &pivot in &clause.lits()[..tried] {
            if let Ok(RatOutcome::Rat(groups)) = self.check_rat(clause, pivot) {
                return Some((pivot, groups));
            }
        }
        None
    }

    /// Whether the clause is unit, or is the reason of an assignment, under the
    /// top-level propagation fixpoint.
    pub fn is_reason_or_unit(&mut self, id: ClauseId) -> bool {
        let Some(&slot) = self.slot_of.get(&id) else {
            return false;
        };
        if self.slots[slot as usize].lits.len() == 1 {
            return true;
        }
        let mark = self.mark();
        self.propagate();
        let is_reason = self
            .trail
            .iter()
            .any(|entry| entry.reason == Reason::Clause(id));
        let lits = &self.slots[slot as usize].lits;
        let non_false = lits
            .iter()
            .filter(|&&lit| self.value(lit) != Some(false))
            .count();
        let unit = !lits.is_empty() && non_false == 1;
        self.rollback(mark);
        is_reason || unit
    }
}
