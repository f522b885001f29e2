//! Immutable per-year index of lexicon term presence.
//!
//! Each document is reduced to a bitset over the lexicon vocabulary (terms and
//! disclosure phrases alike). Yearly totals, document frequencies, pairwise
//! co-occurrence and category totals are aggregated from those bitsets once,
//! after all documents are in, so the result does not depend on input order or
//! on how the corpus was partitioned.

mod persist;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::{Range, RangeInclusive};

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{Document, TermMatcher, VocabTerm, Vocabulary, DEFAULT_YEAR_RANGE};
use crate::lexicon::Lexicon;
use crate::query::{NameResolver, Operand, Query, QueryError};

pub use persist::{from_bytes, load_index, save_index, to_bytes, FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("document {id:?} has year {year} outside {}-{}", range.start(), range.end())]
    YearOutOfRange {
        id: String,
        year: i32,
        range: RangeInclusive<i32>,
    },
    #[error("index file version {found} is not supported (expected {supported})")]
    Version { found: u32, supported: u32 },
    #[error("index file checksum mismatch: {0}")]
    Checksum(String),
    #[error("not an index file")]
    BadMagic,
    #[error("corrupt index file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-document metadata kept alongside its term bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocMark {
    pub id: String,
    pub year: i32,
    /// Indices into [`YearTermIndex::categories`], sorted and distinct.
    pub categories: Vec<u32>,
}

fn words_for(n_terms: usize) -> usize {
    n_terms.div_ceil(64).max(1)
}

fn has_bit(marks: &[u64], bit: usize) -> bool {
    marks[bit / 64] & (1 << (bit % 64)) != 0
}

fn set_bits(marks: &[u64]) -> impl Iterator<Item = usize> + '_ {
    marks.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + b)
        })
    })
}

/// Accumulates document bitsets; [`IndexBuilder::finish`] produces the index.
pub struct IndexBuilder {
    lexicon_name: String,
    vocabulary: Vec<VocabTerm>,
    groups: BTreeMap<String, Vec<String>>,
    matcher: TermMatcher,
    years: RangeInclusive<i32>,
    words: usize,
    docs: Vec<(String, i32, Vec<String>)>,
    marks: Vec<u64>,
}

impl IndexBuilder {
    pub fn new(lexicon: &Lexicon) -> Self {
        Self::with_years(lexicon, DEFAULT_YEAR_RANGE)
    }

    pub fn with_years(lexicon: &Lexicon, years: RangeInclusive<i32>) -> Self {
        let vocab = lexicon.vocabulary();
        IndexBuilder {
            lexicon_name: lexicon.name().to_string(),
            words: words_for(vocab.len()),
            matcher: TermMatcher::new(&vocab),
            vocabulary: vocab.entries().to_vec(),
            groups: lexicon.groups().clone(),
            years,
            docs: Vec::new(),
            marks: Vec::new(),
        }
    }

    pub fn add(&mut self, doc: &Document) -> Result<(), IndexError> {
        if !self.years.contains(&doc.year) {
            return Err(IndexError::YearOutOfRange {
                id: doc.id.clone(),
                year: doc.year,
                range: self.years.clone(),
            });
        }
        let base = self.marks.len();
        self.marks.resize(base + self.words, 0);
        let marks = &mut self.marks[base..];
        self.matcher
            .scan(&doc.text, |id| marks[id / 64] |= 1 << (id % 64));
        self.docs
            .push((doc.id.clone(), doc.year, doc.categories.clone()));
        Ok(())
    }

    /// Appends another partition built over the same lexicon.
    pub fn merge(mut self, other: IndexBuilder) -> Self {
        debug_assert_eq!(self.vocabulary, other.vocabulary);
        self.docs.extend(other.docs);
        self.marks.extend(other.marks);
        self
    }

    pub fn finish(self) -> Result<YearTermIndex, IndexError> {
        let mut categories: BTreeSet<&str> = BTreeSet::new();
        for (_, _, cats) in &self.docs {
            categories.extend(cats.iter().map(String::as_str));
        }
        let categories: Vec<String> = categories.into_iter().map(str::to_string).collect();
        let cat_ids: HashMap<&str, u32> = categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i as u32))
            .collect();

        let mut order: Vec<usize> = (0..self.docs.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            let (ida, ya, _) = &self.docs[a];
            let (idb, yb, _) = &self.docs[b];
            ya.cmp(yb).then_with(|| ida.cmp(idb))
        });

        let mut seen = HashSet::with_capacity(self.docs.len());
        let mut docs = Vec::with_capacity(self.docs.len());
        let mut marks = Vec::with_capacity(self.marks.len());
        for &i in &order {
            let (id, year, cats) = &self.docs[i];
            if !seen.insert(id.as_str()) {
                return Err(IndexError::DuplicateId(id.clone()));
            }
            let mut cats: Vec<u32> = cats.iter().map(|c| cat_ids[c.as_str()]).collect();
            cats.sort_unstable();
            cats.dedup();
            docs.push(DocMark {
                id: id.clone(),
                year: *year,
                categories: cats,
            });
            marks.extend_from_slice(&self.marks[i * self.words..(i + 1) * self.words]);
        }
        Ok(YearTermIndex::assemble(
            self.lexicon_name,
            self.vocabulary,
            self.groups,
            categories,
            docs,
            marks,
        ))
    }
}

/// Builds an index on the calling thread.
pub fn build_index(docs: &[Document], lexicon: &Lexicon) -> Result<YearTermIndex, IndexError> {
    let mut b = IndexBuilder::new(lexicon);
    for d in docs {
        b.add(d)?;
    }
    b.finish()
}

/// Builds an index from `partitions` chunks processed in parallel.
pub fn build_index_partitioned(
    docs: &[Document],
    lexicon: &Lexicon,
    partitions: usize,
) -> Result<YearTermIndex, IndexError> {
    let chunk = docs.len().div_ceil(partitions.max(1)).max(1);
    let builders: Vec<IndexBuilder> = docs
        .par_chunks(chunk)
        .map(|part| {
            let mut b = IndexBuilder::new(lexicon);
            for d in part {
                b.add(d)?;
            }
            Ok(b)
        })
        .collect::<Result<_, IndexError>>()?;
    builders
        .into_iter()
        .reduce(IndexBuilder::merge)
        .unwrap_or_else(|| IndexBuilder::new(lexicon))
        .finish()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearTermIndex {
    lexicon_name: String,
    vocabulary: Vec<VocabTerm>,
    groups: BTreeMap<String, Vec<String>>,
    categories: Vec<String>,
    docs: Vec<DocMark>,
    words: usize,
    marks: Vec<u64>,
    // Derived from the fields above.
    key_ids: HashMap<String, usize>,
    years: Vec<i32>,
    year_ranges: Vec<Range<usize>>,
    totals: Vec<u64>,
    df: Vec<u64>,
    pair_df: Vec<u64>,
    category_totals: Vec<u64>,
}

impl YearTermIndex {
    fn assemble(
        lexicon_name: String,
        vocabulary: Vec<VocabTerm>,
        groups: BTreeMap<String, Vec<String>>,
        categories: Vec<String>,
        docs: Vec<DocMark>,
        marks: Vec<u64>,
    ) -> Self {
        let n = vocabulary.len();
        let words = words_for(n);
        let key_ids = vocabulary
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.key().map(|k| (k, i)))
            .collect();

        let mut years = Vec::new();
        let mut year_ranges: Vec<Range<usize>> = Vec::new();
        for (i, d) in docs.iter().enumerate() {
            if years.last() != Some(&d.year) {
                years.push(d.year);
                year_ranges.push(i..i);
            }
            year_ranges.last_mut().unwrap().end = i + 1;
        }

        let n_pairs = n * n.saturating_sub(1) / 2;
        let n_cat = categories.len();
        let mut totals = vec![0u64; years.len()];
        let mut df = vec![0u64; years.len() * n];
        let mut pair_df = vec![0u64; years.len() * n_pairs];
        let mut category_totals = vec![0u64; years.len() * n_cat];
        let mut bits = Vec::with_capacity(n);
        for (yi, range) in year_ranges.iter().enumerate() {
            totals[yi] = range.len() as u64;
            for di in range.clone() {
                bits.clear();
                bits.extend(set_bits(&marks[di * words..(di + 1) * words]));
                for (x, &a) in bits.iter().enumerate() {
                    df[yi * n + a] += 1;
                    for &b in &bits[x + 1..] {
                        pair_df[yi * n_pairs + pair_slot(n, a, b)] += 1;
                    }
                }
                for &c in &docs[di].categories {
                    category_totals[yi * n_cat + c as usize] += 1;
                }
            }
        }

        YearTermIndex {
            lexicon_name,
            vocabulary,
            groups,
            categories,
            docs,
            words,
            marks,
            key_ids,
            years,
            year_ranges,
            totals,
            df,
            pair_df,
            category_totals,
        }
    }

    pub fn lexicon_name(&self) -> &str {
        &self.lexicon_name
    }

    pub fn vocabulary(&self) -> &[VocabTerm] {
        &self.vocabulary
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<String>> {
        &self.groups
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn docs(&self) -> &[DocMark] {
        &self.docs
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    fn year_idx(&self, year: i32) -> Result<usize, QueryError> {
        self.years
            .binary_search(&year)
            .map_err(|_| QueryError::UnknownYear(year))
    }

    /// Vocabulary position of a term or phrase, by folded key.
    pub fn term_id(&self, term: &str) -> Option<usize> {
        let key = crate::corpus::normalize_term(term)?;
        self.key_ids.get(&key).copied()
    }

    pub fn total(&self, year: i32) -> Option<u64> {
        self.year_idx(year).ok().map(|yi| self.totals[yi])
    }

    /// Documents per year.
    pub fn totals(&self) -> BTreeMap<i32, u64> {
        self.years
            .iter()
            .copied()
            .zip(self.totals.iter().copied())
            .collect()
    }

    /// Documents in `year` containing `term`; `None` when either is unknown.
    pub fn df(&self, term: &str, year: i32) -> Option<u64> {
        let t = self.term_id(term)?;
        let yi = self.year_idx(year).ok()?;
        Some(self.df[yi * self.vocabulary.len() + t])
    }

    pub fn df_by_id(&self, term: usize, year: i32) -> Option<u64> {
        let yi = self.year_idx(year).ok()?;
        Some(self.df[yi * self.vocabulary.len() + term])
    }

    /// Documents in `year` containing both terms.
    pub fn pair_df(&self, a: &str, b: &str, year: i32) -> Option<u64> {
        let a = self.term_id(a)?;
        let b = self.term_id(b)?;
        self.pair_df_by_id(a, b, year)
    }

    pub fn pair_df_by_id(&self, a: usize, b: usize, year: i32) -> Option<u64> {
        if a == b {
            return self.df_by_id(a, year);
        }
        let yi = self.year_idx(year).ok()?;
        let n = self.vocabulary.len();
        let n_pairs = n * (n - 1) / 2;
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Some(self.pair_df[yi * n_pairs + pair_slot(n, a, b)])
    }

    pub fn category_total(&self, category: &str, year: i32) -> Option<u64> {
        let c = self.categories.iter().position(|x| x == category)?;
        let yi = self.year_idx(year).ok()?;
        Some(self.category_totals[yi * self.categories.len() + c])
    }

    fn doc_marks(&self, di: usize) -> &[u64] {
        &self.marks[di * self.words..(di + 1) * self.words]
    }

    /// Whether document `di` contains vocabulary entry `term`.
    pub fn doc_has(&self, di: usize, term: usize) -> bool {
        has_bit(self.doc_marks(di), term)
    }

    /// Resolves the query against the indexed vocabulary.
    pub fn compile(&self, q: &Query) -> Result<CompiledQuery, QueryError> {
        let id = |o: &Operand| {
            self.key_ids
                .get(o.key())
                .copied()
                .ok_or_else(|| QueryError::Unindexed(o.to_string()))
        };
        let mask = |ops: &[Operand]| -> Result<Vec<u64>, QueryError> {
            let mut m = vec![0u64; self.words];
            for o in ops {
                let b = id(o)?;
                m[b / 64] |= 1 << (b % 64);
            }
            Ok(m)
        };
        Ok(match q {
            Query::Term(t) => CompiledQuery::Bit(id(&Operand::Term(t.clone()))?),
            Query::Phrase(p) => CompiledQuery::Bit(id(&Operand::Phrase(p.clone()))?),
            Query::AnyOf(ops) => CompiledQuery::Any(mask(ops)?),
            Query::AtLeast { k, operands } => CompiledQuery::AtLeast(*k as u32, mask(operands)?),
            Query::And(qs) => CompiledQuery::And(
                qs.iter()
                    .map(|q| self.compile(q))
                    .collect::<Result<_, _>>()?,
            ),
            Query::Or(qs) => CompiledQuery::Or(
                qs.iter()
                    .map(|q| self.compile(q))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Positions of documents in `year` matching `q`.
    pub fn matching_docs(&self, q: &Query, year: i32) -> Result<Vec<usize>, QueryError> {
        let compiled = self.compile(q)?;
        let yi = self.year_idx(year)?;
        Ok(self.year_ranges[yi]
            .clone()
            .filter(|&di| compiled.eval(self.doc_marks(di)))
            .collect())
    }

    /// Number of documents published in `year` that satisfy `q`.
    pub fn eval_count(&self, q: &Query, year: i32) -> Result<u64, QueryError> {
        let compiled = self.compile(q)?;
        let yi = self.year_idx(year)?;
        Ok(match &compiled {
            CompiledQuery::Bit(t) => self.df[yi * self.vocabulary.len() + t],
            CompiledQuery::And(parts) if parts.len() == 2 => match (&parts[0], &parts[1]) {
                (CompiledQuery::Bit(a), CompiledQuery::Bit(b)) => {
                    self.pair_df_by_id(*a, *b, year).unwrap_or(0)
                }
                _ => self.count_range(&compiled, yi),
            },
            _ => self.count_range(&compiled, yi),
        })
    }

    fn count_range(&self, compiled: &CompiledQuery, yi: usize) -> u64 {
        self.year_ranges[yi]
            .clone()
            .filter(|&di| compiled.eval(self.doc_marks(di)))
            .count() as u64
    }

    /// Matching document counts for every indexed year.
    pub fn eval_counts(&self, q: &Query) -> Result<BTreeMap<i32, u64>, QueryError> {
        self.years
            .iter()
            .map(|&y| Ok((y, self.eval_count(q, y)?)))
            .collect()
    }
}

impl NameResolver for YearTermIndex {
    fn group_members(&self, name: &str) -> Option<Vec<String>> {
        self.groups.get(name).cloned()
    }

    fn knows_term(&self, key: &str) -> bool {
        self.key_ids.contains_key(key)
    }
}

fn pair_slot(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// A query resolved to vocabulary bit positions.
#[derive(Debug, Clone)]
pub enum CompiledQuery {
    Bit(usize),
    Any(Vec<u64>),
    AtLeast(u32, Vec<u64>),
    And(Vec<CompiledQuery>),
    Or(Vec<CompiledQuery>),
}

impl CompiledQuery {
    pub fn eval(&self, marks: &[u64]) -> bool {
        match self {
            CompiledQuery::Bit(b) => has_bit(marks, *b),
            CompiledQuery::Any(m) => m.iter().zip(marks).any(|(m, d)| m & d != 0),
            CompiledQuery::AtLeast(k, m) => {
                m.iter()
                    .zip(marks)
                    .map(|(m, d)| (m & d).count_ones())
                    .sum::<u32>()
                    >= *k
            }
            CompiledQuery::And(qs) => qs.iter().all(|q| q.eval(marks)),
            CompiledQuery::Or(qs) => qs.iter().any(|q| q.eval(marks)),
        }
    }
}

/// Counts documents of `year` matching `q` by scanning the corpus directly.
///
/// Works for any term, indexed or not. Case sensitivity follows the lexicon
/// entry when the operand is a lexicon term.
pub fn eval_count_scan(docs: &[Document], lexicon: &Lexicon, q: &Query, year: i32) -> u64 {
    let operands: Vec<Operand> = q.operands().into_iter().collect();
    if operands.is_empty() {
        return 0;
    }
    let vocab = Vocabulary::from_entries(operands.iter().map(|o| VocabTerm {
        term: match lexicon.entry(o.key()) {
            Some(e) => e.term.clone(),
            None => o.key().to_string(),
        },
        case_sensitive: lexicon.entry(o.key()).is_some_and(|e| e.case_sensitive),
    }))
    .expect("query operands are non-empty terms");
    let mut matcher = TermMatcher::new(&vocab);
    let mut present = vec![false; operands.len()];
    docs.iter()
        .filter(|d| d.year == year)
        .filter(|d| {
            present.iter_mut().for_each(|p| *p = false);
            matcher.scan(&d.text, |i| present[i] = true);
            q.matches(&|o: &Operand| {
                operands
                    .binary_search(o)
                    .map(|i| present[i])
                    .unwrap_or(false)
            })
        })
        .count() as u64
}
