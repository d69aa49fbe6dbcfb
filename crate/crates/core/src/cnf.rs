//! Variables, literals, clauses and CNF formulas with stable clause identities.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Not;

use crate::error::{Error, Result};

/// Largest variable index representable by a DIMACS literal.
pub const MAX_VAR: u32 = i32::MAX as u32;

/// A propositional variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Result<Var> {
        if index == 0 || index > MAX_VAR {
            return Err(Error::MalformedLiteral(index as i64));
        }
        Ok(Var(index))
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Lit {
        Lit(self.0 << 1)
    }

    pub fn negative(self) -> Lit {
        Lit(self.0 << 1 | 1)
    }

    pub fn lit(self, positive: bool) -> Lit {
        if positive {
            self.positive()
        } else {
            self.negative()
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A variable or its negation.
///
/// Encoded as `2 * var + sign`, so literal codes of one variable are adjacent and
/// can index dense per-literal tables.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn from_dimacs(value: i64) -> Result<Lit> {
        let magnitude = value.unsigned_abs();
        if value == 0 || magnitude > MAX_VAR as u64 {
            return Err(Error::MalformedLiteral(value));
        }
        let var = Var(magnitude as u32);
        Ok(var.lit(value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let var = (self.0 >> 1) as i64;
        if self.is_negative() {
            -var
        } else {
            var
        }
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_positive(self) -> bool {
        !self.is_negative()
    }

    /// Dense index for per-literal tables.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Identity of a clause inside a [`Formula`]. Original clauses are numbered from 1
/// in file order, which is also the LRAT numbering convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClauseId(pub u64);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of literals kept in first-occurrence order.
///
/// Duplicates are always removed. A clause may still contain a complementary pair;
/// such clauses come from inputs and proofs and are reported by [`Clause::is_tautology`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

/// Result of normalizing a raw literal list or of resolving two clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    Clause(Clause),
    /// The literals contain a complementary pair; the deduplicated clause is kept.
    Tautology(Clause),
}

impl Normalized {
    pub fn into_clause(self) -> Clause {
        match self {
            Normalized::Clause(clause) | Normalized::Tautology(clause) => clause,
        }
    }

    pub fn is_tautology(&self) -> bool {
        matches!(self, Normalized::Tautology(_))
    }
}

impl Clause {
    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    /// Builds a clause, dropping repeated literals.
    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Clause {
        let mut seen = HashSet::new();
        let lits = lits.into_iter().filter(|&lit| seen.insert(lit)).collect();
        Clause { lits }
    }

    /// Parses DIMACS-style integers into a clause.
    pub fn from_dimacs(raw: &[i64]) -> Result<Clause> {
        let lits = raw
            .iter()
            .map(|&value| Lit::from_dimacs(value))
            .collect::<Result<Vec<_>>>()?;
        Ok(Clause::from_lits(lits))
    }

    pub fn normalize(raw: &[i64]) -> Result<Normalized> {
        let clause = Clause::from_dimacs(raw)?;
        Ok(clause.classify())
    }

    fn classify(self) -> Normalized {
        if self.is_tautology() {
            Normalized::Tautology(self)
        } else {
            Normalized::Clause(self)
        }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.lits.len() == 1
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.contains(&lit)
    }

    pub fn is_tautology(&self) -> bool {
        let lits: HashSet<Lit> = self.lits.iter().copied().collect();
        self.lits.iter().any(|&lit| lits.contains(&!lit))
    }

    /// Literal-set inclusion, ignoring order.
    pub fn is_subset_of(&self, other: &Clause) -> bool {
        let other: HashSet<Lit> = other.lits.iter().copied().collect();
        self.lits.iter().all(|lit| other.contains(lit))
    }

    pub fn same_literals(&self, other: &Clause) -> bool {
        self.len() == other.len() && self.is_subset_of(other)
    }

    /// Sorted literal list, the key for set-semantics lookups.
    pub fn sorted_key(&self) -> Box<[Lit]> {
        let mut key = self.lits.clone();
        key.sort_unstable();
        key.into_boxed_slice()
    }

    /// The same literals with `lit` moved to the front.
    pub fn with_first(&self, lit: Lit) -> Clause {
        let mut lits = Vec::with_capacity(self.lits.len());
        lits.push(lit);
        lits.extend(self.lits.iter().copied().filter(|&other| other != lit));
        Clause { lits }
    }

    pub fn max_var(&self) -> Option<Var> {
        self.lits.iter().map(|lit| lit.var()).max()
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.lits.iter().map(|lit| lit.to_dimacs()).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, lit) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", lit)?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Clause {
        Clause::from_lits(iter)
    }
}

/// Resolves `c` (containing `pivot`) with `d` (containing `!pivot`).
pub fn resolve(c: &Clause, d: &Clause, pivot: Lit) -> Result<Normalized> {
    if !c.contains(pivot) || !d.contains(!pivot) {
        return Err(Error::InvalidResolution { pivot });
    }
    let resolvent = c
        .lits
        .iter()
        .copied()
        .filter(|&lit| lit != pivot)
        .chain(d.lits.iter().copied().filter(|&lit| lit != !pivot))
        .collect::<Clause>();
    Ok(resolvent.classify())
}

/// A CNF formula whose clauses carry identities that are never reused.
///
/// Keeps a literal occurrence index and a content index (literal sets) in sync
/// with the clause map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    clauses: BTreeMap<ClauseId, Clause>,
    occurrences: Vec<BTreeSet<ClauseId>>,
    by_content: HashMap<Box<[Lit]>, Vec<ClauseId>>,
    next_id: ClauseId,
    num_vars: u32,
}

impl Default for Formula {
    fn default() -> Formula {
        Formula::new()
    }
}

impl Formula {
    pub fn new() -> Formula {
        Formula {
            clauses: BTreeMap::new(),
            occurrences: Vec::new(),
            by_content: HashMap::new(),
            next_id: ClauseId(1),
            num_vars: 0,
        }
    }

    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Formula {
        let mut formula = Formula::new();
        for clause in clauses {
            formula.add_clause(clause);
        }
        formula
    }

    /// Convenience constructor from DIMACS integer lists; panics on literal 0.
    pub fn from_dimacs(clauses: &[&[i64]]) -> Formula {
        Formula::from_clauses(
            clauses
                .iter()
                .map(|raw| Clause::from_dimacs(raw).expect("valid literals")),
        )
    }

    /// Adds a clause under the next free id.
    pub fn add_clause(&mut self, clause: Clause) -> ClauseId {
        let id = self.next_id;
        self.link(id, clause);
        id
    }

    /// Adds a clause under a caller-chosen id, which must not be below the next free id.
    pub fn insert_clause(&mut self, id: ClauseId, clause: Clause) -> Result<()> {
        if id < self.next_id {
            return Err(Error::StaleClauseId {
                id,
                next: self.next_id,
            });
        }
        self.link(id, clause);
        Ok(())
    }

    fn link(&mut self, id: ClauseId, clause: Clause) {
        for &lit in clause.lits() {
            let code = lit.code().max((!lit).code());
            if self.occurrences.len() <= code {
                self.occurrences.resize_with(code + 1, BTreeSet::new);
            }
            self.occurrences[lit.code()].insert(id);
        }
        if let Some(var) = clause.max_var() {
            self.num_vars = self.num_vars.max(var.index());
        }
        self.by_content
            .entry(clause.sorted_key())
            .or_default()
            .push(id);
        self.clauses.insert(id, clause);
        self.next_id = ClauseId(id.0 + 1);
    }

    pub fn remove_clause(&mut self, id: ClauseId) -> Result<Clause> {
        let clause = self.clauses.remove(&id).ok_or(Error::UnknownClause(id))?;
        for &lit in clause.lits() {
            self.occurrences[lit.code()].remove(&id);
        }
        let key = clause.sorted_key();
        if let Some(ids) = self.by_content.get_mut(&key) {
            ids.retain(|&other| other != id);
            if ids.is_empty() {
                self.by_content.remove(&key);
            }
        }
        Ok(clause)
    }

    /// Removes one clause with exactly these literals (as a set); the most recently
    /// added copy goes first. Returns `None` when no such clause is live.
    pub fn remove_matching(&mut self, clause: &Clause) -> Option<ClauseId> {
        let id = *self.find(clause).last()?;
        self.remove_clause(id).ok()?;
        Some(id)
    }

    /// Ids of live clauses with exactly these literals, oldest first.
    pub fn find(&self, clause: &Clause) -> &[ClauseId] {
        self.by_content
            .get(&clause.sorted_key())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn clause(&self, id: ClauseId) -> Option<&Clause> {
        self.clauses.get(&id)
    }

    pub fn contains_id(&self, id: ClauseId) -> bool {
        self.clauses.contains_key(&id)
    }

    /// Live clauses containing `lit`, in id order.
    pub fn occurrences(&self, lit: Lit) -> impl Iterator<Item = ClauseId> + '_ {
        self.occurrences
            .get(lit.code())
            .into_iter()
            .flat_map(|ids| ids.iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClauseId, &Clause)> + '_ {
        self.clauses.iter().map(|(&id, clause)| (id, clause))
    }

    pub fn ids(&self) -> impl Iterator<Item = ClauseId> + '_ {
        self.clauses.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn next_id(&self) -> ClauseId {
        self.next_id
    }

    pub fn max_id(&self) -> Option<ClauseId> {
        self.clauses.keys().next_back().copied()
    }

    /// Largest variable index declared or used so far.
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn declare_vars(&mut self, count: u32) {
        self.num_vars = self.num_vars.max(count);
    }

    /// Id of some live empty clause.
    pub fn empty_clause(&self) -> Option<ClauseId> {
        self.find(&Clause::empty()).first().copied()
    }

    /// Rebuilds the occurrence index from scratch and compares it with the
    /// incrementally maintained one.
    pub fn occurrence_index_is_consistent(&self) -> bool {
        let mut rebuilt: BTreeMap<usize, BTreeSet<ClauseId>> = BTreeMap::new();
        for (id, clause) in self.iter() {
            for lit in clause.lits() {
                rebuilt.entry(lit.code()).or_default().insert(id);
            }
        }
        self.occurrences
            .iter()
            .enumerate()
            .all(|(code, ids)| rebuilt.get(&code).map_or(ids.is_empty(), |r| r == ids))
            && rebuilt
                .keys()
                .all(|&code| code < self.occurrences.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(value: i64) -> Lit {
        Lit::from_dimacs(value).unwrap()
    }

    fn clause(raw: &[i64]) -> Clause {
        Clause::from_dimacs(raw).unwrap()
    }

    #[test]
    fn normalize_removes_duplicates() {
        assert_eq!(
            Clause::normalize(&[1, 2, 1]).unwrap(),
            Normalized::Clause(clause(&[1, 2]))
        );
    }

    #[test]
    fn normalize_reports_tautology() {
        assert!(Clause::normalize(&[1, -1]).unwrap().is_tautology());
    }

    #[test]
    fn normalize_empty() {
        assert_eq!(
            Clause::normalize(&[]).unwrap(),
            Normalized::Clause(Clause::empty())
        );
    }

    #[test]
    fn zero_is_malformed() {
        assert_eq!(Clause::normalize(&[1, 0]), Err(Error::MalformedLiteral(0)));
        assert!(Lit::from_dimacs(i64::MIN).is_err());
        assert!(Var::new(0).is_err());
    }

    #[test]
    fn literal_roundtrip() {
        for value in [1, -1, 7, -42, i32::MAX as i64, -(i32::MAX as i64)] {
            let l = lit(value);
            assert_eq!(l.to_dimacs(), value);
            assert_eq!(!!l, l);
            assert_eq!((!l).var(), l.var());
        }
    }

    #[test]
    fn resolve_textbook() {
        let r = resolve(&clause(&[1, 2]), &clause(&[-1, 3]), lit(1)).unwrap();
        assert_eq!(r, Normalized::Clause(clause(&[2, 3])));
    }

    #[test]
    fn resolve_units_gives_empty() {
        let r = resolve(&clause(&[1]), &clause(&[-1]), lit(1)).unwrap();
        assert_eq!(r, Normalized::Clause(Clause::empty()));
    }

    #[test]
    fn resolve_tautology() {
        let r = resolve(&clause(&[1, 2]), &clause(&[-1, -2]), lit(1)).unwrap();
        assert!(r.is_tautology());
        assert!(r.into_clause().same_literals(&clause(&[2, -2])));
    }

    #[test]
    fn resolve_requires_pivot() {
        assert!(resolve(&clause(&[1, 2]), &clause(&[3]), lit(1)).is_err());
        assert!(resolve(&clause(&[2]), &clause(&[-1]), lit(1)).is_err());
    }

    #[test]
    fn first_id_is_one() {
        let mut f = Formula::new();
        assert_eq!(f.add_clause(clause(&[1, 2])), ClauseId(1));
        assert_eq!(f.add_clause(clause(&[3])), ClauseId(2));
    }

    #[test]
    fn remove_uses_set_semantics() {
        let mut f = Formula::new();
        f.add_clause(clause(&[1, 2]));
        assert_eq!(f.remove_matching(&clause(&[2, 1])), Some(ClauseId(1)));
        assert!(f.is_empty());
    }

    #[test]
    fn remove_absent_is_noop() {
        let mut f = Formula::from_dimacs(&[&[1, 2]]);
        assert_eq!(f.remove_matching(&clause(&[3])), None);
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn remove_unknown_id_errors() {
        let mut f = Formula::new();
        assert_eq!(
            f.remove_clause(ClauseId(9)),
            Err(Error::UnknownClause(ClauseId(9)))
        );
    }

    #[test]
    fn duplicates_get_distinct_ids() {
        let mut f = Formula::new();
        let a = f.add_clause(clause(&[1, 2]));
        let b = f.add_clause(clause(&[2, 1]));
        assert_ne!(a, b);
        assert_eq!(f.find(&clause(&[1, 2])), &[a, b]);
        assert_eq!(f.remove_matching(&clause(&[1, 2])), Some(b));
    }

    #[test]
    fn ids_are_never_reused() {
        let mut f = Formula::new();
        let a = f.add_clause(clause(&[1]));
        f.remove_clause(a).unwrap();
        assert_eq!(f.add_clause(clause(&[1])), ClauseId(2));
        assert!(f.insert_clause(ClauseId(1), clause(&[2])).is_err());
        f.insert_clause(ClauseId(10), clause(&[2])).unwrap();
        assert_eq!(f.next_id(), ClauseId(11));
    }

    #[test]
    fn occurrence_lists_in_id_order() {
        let f = Formula::from_dimacs(&[&[1, 2], &[-1], &[1, 3]]);
        let ids: Vec<_> = f.occurrences(lit(1)).collect();
        assert_eq!(ids, vec![ClauseId(1), ClauseId(3)]);
        assert_eq!(f.occurrences(lit(-3)).count(), 0);
        assert_eq!(f.occurrences(lit(99)).count(), 0);
        assert!(f.occurrence_index_is_consistent());
        assert_eq!(f.num_vars(), 3);
    }
}
