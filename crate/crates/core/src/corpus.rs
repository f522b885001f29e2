//! Document ingestion and whole-word term evidence.
//!
//! Tokens are maximal runs of alphabetic characters. A hyphen or apostrophe
//! is kept only when it sits between two letters, so `state-of-the-art` is a
//! single token while `gpt-4` yields `gpt`. Digits always end a token. Tokens
//! are lowercased and the typographic apostrophe is normalized to `'`. There
//! is no stemming: `meticulous` and `meticulously` stay distinct.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::ops::{Range, RangeInclusive};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default accepted publication years.
pub const DEFAULT_YEAR_RANGE: RangeInclusive<i32> = 2000..=2100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub year: i32,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, year: i32, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            year,
            text: text.into(),
            categories: Vec::new(),
        }
    }

    pub fn with_categories<I, S>(mut self, categories: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.categories = categories.into_iter().map(Into::into).collect();
        self
    }
}

/// The distinct case-folded tokens of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSet {
    pub doc_id: String,
    pub year: i32,
    pub tokens: BTreeSet<String>,
    /// Whether ordered tokens were kept, which phrase matching needs.
    pub token_sequence_available: bool,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("duplicate document id {id:?} on lines {first_line} and {second_line}")]
    DuplicateId {
        id: String,
        first_line: usize,
        second_line: usize,
    },
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("{0:?} is not a valid term (it does not tokenize to itself)")]
    InvalidTerm(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CorpusError {
    /// Line number the error refers to, if it concerns a single record.
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::Record { line, .. } => Some(*line),
            CorpusError::DuplicateId { second_line, .. } => Some(*second_line),
            _ => None,
        }
    }
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Byte ranges of every token in `text`, in order.
pub fn token_spans(text: &str) -> TokenSpans<'_> {
    TokenSpans { text, pos: 0 }
}

pub struct TokenSpans<'a> {
    text: &'a str,
    pos: usize,
}

impl Iterator for TokenSpans<'_> {
    type Item = Range<usize>;

    fn next(&mut self) -> Option<Range<usize>> {
        let rest = &self.text[self.pos..];
        let (skip, _) = rest.char_indices().find(|(_, c)| c.is_alphabetic())?;
        let start = self.pos + skip;
        let mut end = start;
        let mut chars = self.text[start..].char_indices().peekable();
        while let Some((off, c)) = chars.next() {
            if c.is_alphabetic() {
                end = start + off + c.len_utf8();
            } else if is_joiner(c) && matches!(chars.peek(), Some((_, n)) if n.is_alphabetic()) {
                continue;
            } else {
                break;
            }
        }
        self.pos = end;
        Some(start..end)
    }
}

/// Appends the case-folded form of `token` to `out`.
pub fn fold_into(token: &str, out: &mut String) {
    if token.is_ascii() {
        out.extend(token.bytes().map(|b| b.to_ascii_lowercase() as char));
        return;
    }
    for c in token.chars() {
        if c == '\u{2019}' {
            out.push('\'');
        } else {
            out.extend(c.to_lowercase());
        }
    }
}

pub fn fold(token: &str) -> String {
    let mut s = String::with_capacity(token.len());
    fold_into(token, &mut s);
    s
}

/// Splits `text` into case-folded tokens, preserving order.
pub fn tokenize(text: &str) -> Vec<String> {
    token_spans(text).map(|r| fold(&text[r])).collect()
}

/// Normalizes a term or phrase to its folded tokens joined by single spaces.
/// Returns `None` when the input contains no token.
pub fn normalize_term(term: &str) -> Option<String> {
    let tokens = tokenize(term);
    if tokens.is_empty() {
        None
    } else {
        Some(tokens.join(" "))
    }
}

/// A set of terms and phrases to look for in documents.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entries: Vec<VocabTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabTerm {
    /// The term as written.
    pub term: String,
    pub case_sensitive: bool,
}

impl VocabTerm {
    pub fn new(term: impl Into<String>) -> Self {
        VocabTerm {
            term: term.into(),
            case_sensitive: false,
        }
    }

    /// Folded lookup key: tokens joined by single spaces.
    pub fn key(&self) -> Option<String> {
        normalize_term(&self.term)
    }
}

impl Vocabulary {
    pub fn new<I, S>(terms: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_entries(terms.into_iter().map(VocabTerm::new))
    }

    pub fn from_entries<I>(entries: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = VocabTerm>,
    {
        let entries: Vec<VocabTerm> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(CorpusError::EmptyVocabulary);
        }
        for e in &entries {
            if e.key().is_none() {
                return Err(CorpusError::InvalidTerm(e.term.clone()));
            }
        }
        Ok(Vocabulary { entries })
    }

    pub fn entries(&self) -> &[VocabTerm] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reusable per-document token storage.
#[derive(Default)]
struct TokenBuf {
    folded: String,
    folded_spans: Vec<Range<usize>>,
    raw_spans: Vec<Range<usize>>,
}

impl TokenBuf {
    fn fill(&mut self, text: &str) {
        self.folded.clear();
        self.folded_spans.clear();
        self.raw_spans.clear();
        for span in token_spans(text) {
            let start = self.folded.len();
            fold_into(&text[span.clone()], &mut self.folded);
            self.folded_spans.push(start..self.folded.len());
            self.raw_spans.push(span);
        }
    }

    fn len(&self) -> usize {
        self.raw_spans.len()
    }

    fn folded(&self, i: usize) -> &str {
        &self.folded[self.folded_spans[i].clone()]
    }

    fn raw<'t>(&self, text: &'t str, i: usize) -> &'t str {
        &text[self.raw_spans[i].clone()]
    }
}

struct PhrasePattern {
    id: usize,
    tokens: Vec<String>,
    case_sensitive: bool,
}

/// Compiled matcher mapping tokens and phrases to vocabulary positions.
///
/// Each vocabulary entry is reported at most once per document.
pub struct TermMatcher {
    n_terms: usize,
    folded_single: HashMap<String, Vec<usize>>,
    exact_single: HashMap<String, Vec<usize>>,
    phrases_by_first: HashMap<String, Vec<PhrasePattern>>,
    buf: TokenBuf,
}

impl TermMatcher {
    pub fn new(vocab: &Vocabulary) -> Self {
        let mut folded_single: HashMap<String, Vec<usize>> = HashMap::new();
        let mut exact_single: HashMap<String, Vec<usize>> = HashMap::new();
        let mut phrases_by_first: HashMap<String, Vec<PhrasePattern>> = HashMap::new();
        for (id, entry) in vocab.entries().iter().enumerate() {
            let tokens: Vec<String> = if entry.case_sensitive {
                token_spans(&entry.term)
                    .map(|r| entry.term[r].replace('\u{2019}', "'"))
                    .collect()
            } else {
                tokenize(&entry.term)
            };
            match tokens.len() {
                0 => {}
                1 => {
                    let map = if entry.case_sensitive {
                        &mut exact_single
                    } else {
                        &mut folded_single
                    };
                    map.entry(tokens[0].clone()).or_default().push(id);
                }
                _ => {
                    // Phrase candidates are located through the folded first token.
                    let first = fold(&tokens[0]);
                    phrases_by_first
                        .entry(first)
                        .or_default()
                        .push(PhrasePattern {
                            id,
                            tokens,
                            case_sensitive: entry.case_sensitive,
                        });
                }
            }
        }
        TermMatcher {
            n_terms: vocab.len(),
            folded_single,
            exact_single,
            phrases_by_first,
            buf: TokenBuf::default(),
        }
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// Calls `hit` with the vocabulary position of every entry present in
    /// `text`. Positions may repeat; callers deduplicate.
    pub fn scan(&mut self, text: &str, mut hit: impl FnMut(usize)) {
        self.buf.fill(text);
        let buf = &self.buf;
        for i in 0..buf.len() {
            let folded = buf.folded(i);
            if let Some(ids) = self.folded_single.get(folded) {
                ids.iter().for_each(|&id| hit(id));
            }
            if !self.exact_single.is_empty() {
                let raw = buf.raw(text, i);
                let raw: Cow<'_, str> = if raw.contains('\u{2019}') {
                    Cow::Owned(raw.replace('\u{2019}', "'"))
                } else {
                    Cow::Borrowed(raw)
                };
                if let Some(ids) = self.exact_single.get(raw.as_ref()) {
                    ids.iter().for_each(|&id| hit(id));
                }
            }
            if let Some(patterns) = self.phrases_by_first.get(folded) {
                for p in patterns {
                    if i + p.tokens.len() > buf.len() {
                        continue;
                    }
                    let matched = p.tokens.iter().enumerate().all(|(k, want)| {
                        if p.case_sensitive {
                            buf.raw(text, i + k).replace('\u{2019}', "'") == *want
                        } else {
                            buf.folded(i + k) == want
                        }
                    });
                    if matched {
                        hit(p.id);
                    }
                }
            }
        }
    }

    /// Vocabulary positions present in `text`, sorted and deduplicated.
    pub fn matches(&mut self, text: &str) -> Vec<usize> {
        let mut seen = vec![false; self.n_terms];
        self.scan(text, |id| seen[id] = true);
        seen.iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }
}

/// Result of [`term_presence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presence {
    pub token_set: TokenSet,
    /// Vocabulary entries (as written) found in the document.
    pub matched: BTreeSet<String>,
}

/// Reports which vocabulary terms and phrases occur in `doc`.
pub fn term_presence(doc: &Document, vocab: &Vocabulary) -> Presence {
    let mut matcher = TermMatcher::new(vocab);
    let matched = matcher
        .matches(&doc.text)
        .into_iter()
        .map(|i| vocab.entries()[i].term.clone())
        .collect();
    Presence {
        token_set: TokenSet {
            doc_id: doc.id.clone(),
            year: doc.year,
            tokens: tokenize(&doc.text).into_iter().collect(),
            token_sequence_available: false,
        },
        matched,
    }
}

/// What to do with a malformed record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorPolicy {
    #[default]
    Abort,
    Skip,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub policy: ErrorPolicy,
    pub years: RangeInclusive<i32>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            policy: ErrorPolicy::Abort,
            years: DEFAULT_YEAR_RANGE,
        }
    }
}

#[derive(Debug, Default)]
pub struct LoadedCorpus {
    pub documents: Vec<Document>,
    /// Records dropped under [`ErrorPolicy::Skip`].
    pub skipped: Vec<CorpusError>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<serde_json::Value>,
    year: Option<serde_json::Value>,
    text: Option<serde_json::Value>,
    #[serde(default)]
    categories: Option<Vec<String>>,
}

fn parse_record(
    line: &str,
    line_no: usize,
    years: &RangeInclusive<i32>,
) -> Result<Document, CorpusError> {
    let bad = |message: String| CorpusError::Record {
        line: line_no,
        message,
    };
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|e| bad(format!("invalid JSON record: {e}")))?;
    let id = match raw.id {
        Some(serde_json::Value::String(s)) if !s.is_empty() => s,
        Some(_) => return Err(bad("field \"id\" must be a non-empty string".into())),
        None => return Err(bad("missing field \"id\"".into())),
    };
    let year = match raw.year {
        Some(serde_json::Value::Number(n)) => n
            .as_i64()
            .and_then(|y| i32::try_from(y).ok())
            .ok_or_else(|| bad(format!("year {n} is not an integer")))?,
        Some(other) => return Err(bad(format!("year {other} is not an integer"))),
        None => return Err(bad("missing field \"year\"".into())),
    };
    if !years.contains(&year) {
        return Err(bad(format!(
            "year {year} outside accepted range {}-{}",
            years.start(),
            years.end()
        )));
    }
    let text = match raw.text {
        Some(serde_json::Value::String(s)) => s,
        Some(_) => return Err(bad("field \"text\" must be a string".into())),
        None => return Err(bad("missing field \"text\"".into())),
    };
    Ok(Document {
        id,
        year,
        text,
        categories: raw.categories.unwrap_or_default(),
    })
}

/// Reads line-delimited JSON documents. Blank lines are ignored.
pub fn load_corpus<R: BufRead>(source: R, opts: &LoadOptions) -> Result<LoadedCorpus, CorpusError> {
    let mut out = LoadedCorpus::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let result =
            parse_record(&line, line_no, &opts.years).and_then(|doc| match seen.get(&doc.id) {
                Some(&first_line) => Err(CorpusError::DuplicateId {
                    id: doc.id,
                    first_line,
                    second_line: line_no,
                }),
                None => Ok(doc),
            });
        match result {
            Ok(doc) => {
                seen.insert(doc.id.clone(), line_no);
                out.documents.push(doc);
            }
            Err(e) => match opts.policy {
                ErrorPolicy::Abort => return Err(e),
                ErrorPolicy::Skip => out.skipped.push(e),
            },
        }
    }
    Ok(out)
}

/// Writes documents as line-delimited JSON.
pub fn write_corpus<W: std::io::Write>(docs: &[Document], mut out: W) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
