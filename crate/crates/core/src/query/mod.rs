//! Boolean marker queries.
//!
//! Surface syntax (keywords are case-insensitive, `AND` binds tighter than `OR`):
//!
//! ```text
//! query   := and ( OR and )*
//! and     := primary ( AND primary )*
//! primary := term | "quoted phrase" | any(name, ...) | atleast(k, name, ...) | ( query )
//! ```
//!
//! Inside `any` and `atleast`, a name is a group of the active lexicon, a
//! lexicon term, or a quoted phrase. Groups expand to their members and the
//! operand list is deduplicated, so `atleast(2, strong)` means "at least two
//! distinct strong markers".

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Lexicon;

pub use parser::parse_query;

/// A leaf reference: a single folded token or a folded phrase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operand {
    Term(String),
    Phrase(String),
}

impl Operand {
    /// Builds an operand from a normalized key (tokens joined by spaces).
    pub fn from_key(key: String) -> Self {
        if key.contains(' ') {
            Operand::Phrase(key)
        } else {
            Operand::Term(key)
        }
    }

    pub fn key(&self) -> &str {
        match self {
            Operand::Term(t) | Operand::Phrase(t) => t,
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Term(t) => f.write_str(t),
            Operand::Phrase(p) => write!(f, "\"{p}\""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Query {
    Term(String),
    Phrase(String),
    AnyOf(Vec<Operand>),
    AtLeast { k: usize, operands: Vec<Operand> },
    And(Vec<Query>),
    Or(Vec<Query>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown group or term {name:?} at byte {offset}")]
    UnknownName { name: String, offset: usize },
    #[error("atleast({k}, ...) needs 1 <= k <= {n} (number of distinct operands)")]
    KOutOfRange { k: usize, n: usize },
    #[error("{0} is not in the indexed vocabulary; evaluate by corpus scan instead")]
    Unindexed(String),
    #[error("year {0} is not in the index")]
    UnknownYear(i32),
}

/// Name lookup used while parsing list operands.
pub trait NameResolver {
    /// Members of a named group, as written in the lexicon.
    fn group_members(&self, name: &str) -> Option<Vec<String>>;
    /// Whether `key` (folded) is a known vocabulary term or phrase.
    fn knows_term(&self, key: &str) -> bool;
}

impl NameResolver for Lexicon {
    fn group_members(&self, name: &str) -> Option<Vec<String>> {
        self.group(name).map(<[String]>::to_vec)
    }

    fn knows_term(&self, key: &str) -> bool {
        self.entry(key).is_some()
    }
}

impl Query {
    /// Builds a validated `AtLeast` node, deduplicating operands.
    pub fn at_least(k: usize, operands: Vec<Operand>) -> Result<Query, QueryError> {
        let operands = dedup(operands);
        if k == 0 || k > operands.len() {
            return Err(QueryError::KOutOfRange {
                k,
                n: operands.len(),
            });
        }
        Ok(Query::AtLeast { k, operands })
    }

    pub fn any_of(operands: Vec<Operand>) -> Query {
        Query::AnyOf(dedup(operands))
    }

    /// Evaluates the query given a presence test for each leaf.
    pub fn matches(&self, has: &impl Fn(&Operand) -> bool) -> bool {
        match self {
            Query::Term(t) => has(&Operand::Term(t.clone())),
            Query::Phrase(p) => has(&Operand::Phrase(p.clone())),
            Query::AnyOf(ops) => ops.iter().any(has),
            Query::AtLeast { k, operands } => {
                operands.iter().filter(|o| has(o)).take(*k).count() >= *k
            }
            Query::And(qs) => qs.iter().all(|q| q.matches(has)),
            Query::Or(qs) => qs.iter().any(|q| q.matches(has)),
        }
    }

    /// Every distinct leaf the query refers to.
    pub fn operands(&self) -> BTreeSet<Operand> {
        let mut out = BTreeSet::new();
        self.collect_operands(&mut out);
        out
    }

    fn collect_operands(&self, out: &mut BTreeSet<Operand>) {
        match self {
            Query::Term(t) => {
                out.insert(Operand::Term(t.clone()));
            }
            Query::Phrase(p) => {
                out.insert(Operand::Phrase(p.clone()));
            }
            Query::AnyOf(ops) | Query::AtLeast { operands: ops, .. } => {
                out.extend(ops.iter().cloned());
            }
            Query::And(qs) | Query::Or(qs) => qs.iter().for_each(|q| q.collect_operands(out)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Query::And(qs) | Query::Or(qs) => 1 + qs.iter().map(Query::depth).max().unwrap_or(0),
            _ => 1,
        }
    }
}

fn dedup(operands: Vec<Operand>) -> Vec<Operand> {
    let mut seen = BTreeSet::new();
    operands
        .into_iter()
        .filter(|o| seen.insert(o.clone()))
        .collect()
}

fn write_list(f: &mut fmt::Formatter<'_>, ops: &[Operand]) -> fmt::Result {
    for (i, o) in ops.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{o}")?;
    }
    Ok(())
}

impl fmt::Display for Query {
    /// Renders parseable syntax; nested nodes are parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Term(t) => f.write_str(t),
            Query::Phrase(p) => write!(f, "\"{p}\""),
            Query::AnyOf(ops) => {
                f.write_str("any(")?;
                write_list(f, ops)?;
                f.write_str(")")
            }
            Query::AtLeast { k, operands } => {
                write!(f, "atleast({k}, ")?;
                write_list(f, operands)?;
                f.write_str(")")
            }
            Query::And(qs) | Query::Or(qs) => {
                let sep = if matches!(self, Query::And(_)) {
                    " AND "
                } else {
                    " OR "
                };
                for (i, q) in qs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    if matches!(q, Query::And(_) | Query::Or(_)) {
                        write!(f, "({q})")?;
                    } else {
                        write!(f, "{q}")?;
                    }
                }
                Ok(())
            }
        }
    }
}
