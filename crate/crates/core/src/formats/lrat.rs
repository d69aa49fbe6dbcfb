use std::collections::HashSet;
use std::io::Write;

use crate::cnf::{Clause, ClauseId, Lit};
use crate::error::{Error, Position, Result};

use super::tokens::{Token, Tokens};

/// Hints for one candidate clause of a RAT check: the candidate's id and the
/// unit-propagation chain refuting its resolvent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatGroup {
    pub candidate: ClauseId,
    pub chain: Vec<ClauseId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HintBlock {
    pub rup_chain: Vec<ClauseId>,
    pub rat_groups: Vec<RatGroup>,
}

impl HintBlock {
    pub fn rup(chain: Vec<ClauseId>) -> HintBlock {
        HintBlock {
            rup_chain: chain,
            rat_groups: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rup_chain.is_empty() && self.rat_groups.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rup_chain.len()
            + self
                .rat_groups
                .iter()
                .map(|group| 1 + group.chain.len())
                .sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LratStep {
    /// Adds a clause; for RAT steps the pivot is the first literal.
    Add { clause: Clause, hints: HintBlock },
    /// Deletes clauses by id.
    Delete(Vec<ClauseId>),
}

pub type LratDocument = Vec<(ClauseId, LratStep)>;

fn error(token: &Token, message: impl Into<String>) -> Error {
    Error::parse(Position::Line(token.line), message)
}

fn positive_id(token: &Token, value: i64) -> Result<ClauseId> {
    if value <= 0 {
        return Err(error(token, format!("expected a positive clause id, found {}", value)));
    }
    Ok(ClauseId(value as u64))
}

/// Parses a text LRAT proof.
///
/// Besides syntax, the parser checks what it can without the formula: addition ids
/// increase strictly, hints only refer to ids below the current step that the
/// document has not deleted, and an empty-clause addition carries hints.
pub fn parse_lrat(input: &[u8]) -> Result<LratDocument> {
    let mut steps = Vec::new();
    let mut tokens = Tokens::new(input);
    let mut last_added: Option<ClauseId> = None;
    let mut deleted: HashSet<ClauseId> = HashSet::new();

    while let Some(id_token) = tokens.next() {
        let id = positive_id(&id_token, id_token.int()?)?;
        let first = tokens
            .next()
            .ok_or_else(|| error(&id_token, "truncated step"))?;

        if first.is(b"d") {
            let mut ids = Vec::new();
            loop {
                let t = tokens.next().ok_or_else(|| error(&first, "unterminated deletion"))?;
                let value = t.int()?;
                if value == 0 {
                    break;
                }
                let target = positive_id(&t, value)?;
                deleted.insert(target);
                ids.push(target);
            }
            steps.push((id, LratStep::Delete(ids)));
            continue;
        }

        if let Some(last) = last_added {
            if id <= last {
                return Err(error(&id_token, format!("addition id {} does not exceed previous id {}", id, last)));
            }
        }
        last_added = Some(id);

        let mut lits = Vec::new();
        let mut token = first;
        loop {
            let value = token.int()?;
            if value == 0 {
                break;
            }
            lits.push(Lit::from_dimacs(value).map_err(|_| error(&token, "malformed literal"))?);
            token = tokens.next().ok_or_else(|| error(&id_token, "unterminated clause"))?;
        }
        let clause = Clause::from_lits(lits);

        let mut hints = HintBlock::default();
        loop {
            let t = tokens.next().ok_or_else(|| error(&id_token, "unterminated hint list"))?;
            let value = t.int()?;
            if value == 0 {
                break;
            }
            let target = ClauseId(value.unsigned_abs());
            if target >= id || deleted.contains(&target) {
                return Err(error(&t, format!("hint {} does not name a live clause", target)));
            }
            if value < 0 {
                hints.rat_groups.push(RatGroup {
                    candidate: target,
                    chain: Vec::new(),
                });
            } else if let Some(group) = hints.rat_groups.last_mut() {
                group.chain.push(target);
            } else {
                hints.rup_chain.push(target);
            }
        }
        if clause.is_empty() && hints.is_empty() {
            return Err(error(&id_token, "empty clause without hints"));
        }
        steps.push((id, LratStep::Add { clause, hints }));
    }
    Ok(steps)
}

pub fn write_lrat(document: &[(ClauseId, LratStep)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (id, step) in document {
        write!(out, "{} ", id).unwrap();
        match step {
            LratStep::Add { clause, hints } => {
                for lit in clause.lits() {
                    write!(out, "{} ", lit).unwrap();
                }
                out.extend_from_slice(b"0");
                for hint in &hints.rup_chain {
                    write!(out, " {}", hint).unwrap();
                }
                for group in &hints.rat_groups {
                    write!(out, " -{}", group.candidate).unwrap();
                    for hint in &group.chain {
                        write!(out, " {}", hint).unwrap();
                    }
                }
                out.extend_from_slice(b" 0\n");
            }
            LratStep::Delete(ids) => {
                out.extend_from_slice(b"d");
                for target in ids {
                    write!(out, " {}", target).unwrap();
                }
                out.extend_from_slice(b" 0\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(values: &[u64]) -> Vec<ClauseId> {
        values.iter().map(|&v| ClauseId(v)).collect()
    }

    #[test]
    fn rup_addition() {
        let doc = parse_lrat(b"3 2 0 1 2 0").unwrap();
        assert_eq!(
            doc,
            vec![(
                ClauseId(3),
                LratStep::Add {
                    clause: Clause::from_dimacs(&[2]).unwrap(),
                    hints: HintBlock::rup(ids(&[1, 2])),
                }
            )]
        );
    }

    #[test]
    fn deletion_record() {
        assert_eq!(
            parse_lrat(b"4 d 1 0").unwrap(),
            vec![(ClauseId(4), LratStep::Delete(ids(&[1])))]
        );
    }

    #[test]
    fn empty_clause_with_chain() {
        let doc = parse_lrat(b"5 0 3 2 0").unwrap();
        assert_eq!(
            doc[0].1,
            LratStep::Add {
                clause: Clause::empty(),
                hints: HintBlock::rup(ids(&[3, 2])),
            }
        );
    }

    #[test]
    fn rat_groups() {
        let doc = parse_lrat(b"7 1 2 0 4 -5 1 3 -6 0\n").unwrap();
        let LratStep::Add { hints, .. } = &doc[0].1 else { panic!() };
        assert_eq!(hints.rup_chain, ids(&[4]));
        assert_eq!(
            hints.rat_groups,
            vec![
                RatGroup { candidate: ClauseId(5), chain: ids(&[1, 3]) },
                RatGroup { candidate: ClauseId(6), chain: vec![] },
            ]
        );
        assert_eq!(write_lrat(&doc), b"7 1 2 0 4 -5 1 3 -6 0\n".to_vec());
    }

    #[test]
    fn rejects_bad_documents() {
        // non-monotone ids
        assert!(parse_lrat(b"5 1 0 1 0\n5 2 0 1 0\n").is_err());
        // hint to a later id
        assert!(parse_lrat(b"5 1 0 6 0\n").is_err());
        // hint to a deleted id
        assert!(parse_lrat(b"5 d 1 0\n6 1 0 1 0\n").is_err());
        // empty clause without hints
        assert!(parse_lrat(b"5 0 0\n").is_err());
        // truncated
        assert!(parse_lrat(b"5 1 0 1").is_err());
        assert!(parse_lrat(b"5").is_err());
        assert!(parse_lrat(b"0 1 0 0").is_err());
    }

    #[test]
    fn writes_canonical_lines() {
        let doc = vec![
            (ClauseId(5), LratStep::Add { clause: Clause::from_dimacs(&[1]).unwrap(), hints: HintBlock::rup(ids(&[1, 3])) }),
            (ClauseId(6), LratStep::Add { clause: Clause::empty(), hints: HintBlock::rup(ids(&[5, 2, 4])) }),
            (ClauseId(6), LratStep::Delete(ids(&[5]))),
        ];
        let bytes = write_lrat(&doc);
        assert_eq!(bytes, b"5 1 0 1 3 0\n6 0 5 2 4 0\n6 d 5 0\n".to_vec());
        assert_eq!(parse_lrat(&bytes).unwrap(), doc);
    }
}
