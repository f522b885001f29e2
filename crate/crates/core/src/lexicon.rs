//! Marker vocabulary: role lists, strength groups and disclosure phrases.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_term, tokenize, VocabTerm, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Adjective,
    Adverb,
    Control,
    Extra,
    Disclosure,
}

impl Role {
    pub const ALL: [Role; 5] = [
        Role::Control,
        Role::Adjective,
        Role::Adverb,
        Role::Extra,
        Role::Disclosure,
    ];

    /// Name of the role group holding entries of this role.
    pub fn group_name(self) -> &'static str {
        match self {
            Role::Adjective => "adjective",
            Role::Adverb => "adverb",
            Role::Control => "control",
            Role::Extra => "extra",
            Role::Disclosure => "disclosure",
        }
    }

    fn is_marker(self) -> bool {
        matches!(self, Role::Adjective | Role::Adverb)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.group_name())
    }
}

pub const STRENGTH_GROUPS: [&str; 3] = ["strong", "medium", "weak"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub term: String,
    pub role: Role,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub case_sensitive: bool,
}

impl TermEntry {
    pub fn new(term: impl Into<String>, role: Role) -> Self {
        TermEntry {
            term: term.into(),
            role,
            case_sensitive: false,
        }
    }

    pub fn is_phrase(&self) -> bool {
        tokenize(&self.term).len() > 1
    }

    /// Folded lookup key shared by the index and query layers.
    pub fn key(&self) -> String {
        normalize_term(&self.term).unwrap_or_default()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("term {0:?} is empty or contains no letters")]
    EmptyTerm(String),
    #[error("term {0:?} is not a single token; only disclosure entries may be phrases")]
    PhraseOutsideDisclosure(String),
    #[error("term {0:?} does not survive tokenization unchanged")]
    NotATokenSequence(String),
    #[error("duplicate term {term:?} in group {group:?}")]
    DuplicateTerm { group: String, term: String },
    #[error("term {term:?} is in strength groups {first:?} and {second:?}")]
    StrengthOverlap {
        term: String,
        first: String,
        second: String,
    },
    #[error("strength group {group:?} member {term:?} is not an adjective or adverb entry")]
    StrengthMemberNotMarker { group: String, term: String },
    #[error("group {group:?} member {term:?} has no entry")]
    UnknownMember { group: String, term: String },
    #[error("group name {0:?} is reserved for a role group")]
    ReservedGroup(String),
    #[error("invalid lexicon file: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// On-disk shape: role groups are derived from `entries`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct LexiconFile {
    name: String,
    entries: Vec<TermEntry>,
    #[serde(default)]
    groups: BTreeMap<String, Vec<String>>,
}

/// A validated, immutable marker lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    entries: Vec<TermEntry>,
    /// Role groups, derived from entries, plus the named groups supplied.
    groups: BTreeMap<String, Vec<String>>,
    custom_groups: BTreeMap<String, Vec<String>>,
}

impl Lexicon {
    pub fn new(
        name: impl Into<String>,
        entries: Vec<TermEntry>,
        custom_groups: BTreeMap<String, Vec<String>>,
    ) -> Result<Self, LexiconError> {
        let mut keys: HashMap<String, &TermEntry> = HashMap::new();
        for e in &entries {
            let tokens = tokenize(&e.term);
            if tokens.is_empty() {
                return Err(LexiconError::EmptyTerm(e.term.clone()));
            }
            if tokens.len() > 1 && e.role != Role::Disclosure {
                return Err(LexiconError::PhraseOutsideDisclosure(e.term.clone()));
            }
            // The term must be exactly what the tokenizer would produce, up to case
            // and whitespace between phrase tokens.
            let squashed: Vec<String> =
                e.term.split_whitespace().map(crate::corpus::fold).collect();
            if squashed != tokens {
                return Err(LexiconError::NotATokenSequence(e.term.clone()));
            }
            if let Some(prev) = keys.insert(e.key(), e) {
                return Err(LexiconError::DuplicateTerm {
                    group: prev.role.group_name().to_string(),
                    term: e.term.clone(),
                });
            }
        }

        let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for role in Role::ALL {
            let members: Vec<String> = entries
                .iter()
                .filter(|e| e.role == role)
                .map(|e| e.term.clone())
                .collect();
            groups.insert(role.group_name().to_string(), members);
        }

        let mut strength_of: HashMap<String, &str> = HashMap::new();
        for (name, members) in &custom_groups {
            if Role::ALL.iter().any(|r| r.group_name() == name) {
                return Err(LexiconError::ReservedGroup(name.clone()));
            }
            let is_strength = STRENGTH_GROUPS.contains(&name.as_str());
            let mut seen = HashSet::new();
            for m in members {
                let key = normalize_term(m).unwrap_or_default();
                if !seen.insert(key.clone()) {
                    return Err(LexiconError::DuplicateTerm {
                        group: name.clone(),
                        term: m.clone(),
                    });
                }
                let entry = keys.get(&key).ok_or_else(|| LexiconError::UnknownMember {
                    group: name.clone(),
                    term: m.clone(),
                })?;
                if is_strength {
                    if !entry.role.is_marker() {
                        return Err(LexiconError::StrengthMemberNotMarker {
                            group: name.clone(),
                            term: m.clone(),
                        });
                    }
                    if let Some(first) = strength_of.insert(key, name) {
                        let (first, second) = if first <= name.as_str() {
                            (first, name.as_str())
                        } else {
                            (name.as_str(), first)
                        };
                        return Err(LexiconError::StrengthOverlap {
                            term: m.clone(),
                            first: first.to_string(),
                            second: second.to_string(),
                        });
                    }
                }
            }
            groups.insert(name.clone(), members.clone());
        }

        Ok(Lexicon {
            name: name.into(),
            entries,
            groups,
            custom_groups,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[TermEntry] {
        &self.entries
    }

    /// All groups, role and named, keyed by name.
    pub fn groups(&self) -> &BTreeMap<String, Vec<String>> {
        &self.groups
    }

    pub fn group(&self, name: &str) -> Option<&[String]> {
        self.groups.get(name).map(Vec::as_slice)
    }

    /// Looks up an entry by term, ignoring case.
    pub fn entry(&self, term: &str) -> Option<&TermEntry> {
        let key = normalize_term(term)?;
        self.entries.iter().find(|e| e.key() == key)
    }

    /// Matching vocabulary in entry order.
    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::from_entries(self.entries.iter().map(|e| VocabTerm {
            term: e.term.clone(),
            case_sensitive: e.case_sensitive,
        }))
        .expect("validated lexicon has non-empty terms")
    }

    pub fn to_json(&self) -> String {
        let file = LexiconFile {
            name: self.name.clone(),
            entries: self.entries.clone(),
            groups: self.custom_groups.clone(),
        };
        serde_json::to_string_pretty(&file).expect("lexicon serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile =
            serde_json::from_str(text).map_err(|e| LexiconError::Parse(e.to_string()))?;
        Lexicon::new(file.name, file.entries, file.groups)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| LexiconError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| LexiconError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Lexicon::from_json(&text)
}

const ADJECTIVES: [&str; 12] = [
    "commendable",
    "innovative",
    "meticulous",
    "intricate",
    "notable",
    "versatile",
    "noteworthy",
    "invaluable",
    "pivotal",
    "potent",
    "fresh",
    "ingenious",
];

const ADVERBS: [&str; 12] = [
    "meticulously",
    "reportedly",
    "lucidly",
    "innovatively",
    "aptly",
    "methodically",
    "excellently",
    "compellingly",
    "impressively",
    "undoubtedly",
    "scholarly",
    "strategically",
];

const CONTROLS: [&str; 12] = [
    "consider",
    "conclusion",
    "furthermore",
    "relative",
    "technical",
    "blue",
    "red",
    "yellow",
    "before",
    "after",
    "earlier",
    "later",
];

const EXTRAS: [&str; 2] = ["groundbreaking", "outwith"];

const DISCLOSURE: [&str; 6] = [
    "chatgpt",
    "gpt",
    "openai",
    "llm",
    "large language model",
    "artificial intelligence",
];

const STRONG: [&str; 4] = ["intricate", "meticulous", "meticulously", "commendable"];
const MEDIUM: [&str; 6] = [
    "notable",
    "pivotal",
    "invaluable",
    "noteworthy",
    "methodically",
    "strategically",
];
const WEAK: [&str; 2] = ["innovative", "versatile"];

/// The shipped marker lexicon.
///
/// Twelve adjectives, twelve adverbs and twelve control words, the
/// strong/medium/weak marker groups, two extra markers and six disclosure
/// terms.
pub fn builtin_lexicon() -> Lexicon {
    let mut entries = Vec::with_capacity(44);
    let roles: [(&[&str], Role); 5] = [
        (&ADJECTIVES, Role::Adjective),
        (&ADVERBS, Role::Adverb),
        (&CONTROLS, Role::Control),
        (&EXTRAS, Role::Extra),
        (&DISCLOSURE, Role::Disclosure),
    ];
    for (terms, role) in roles {
        entries.extend(terms.iter().map(|t| TermEntry::new(*t, role)));
    }
    let to_vec = |ts: &[&str]| ts.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let groups = BTreeMap::from([
        ("strong".to_string(), to_vec(&STRONG)),
        ("medium".to_string(), to_vec(&MEDIUM)),
        ("weak".to_string(), to_vec(&WEAK)),
    ]);
    Lexicon::new("builtin", entries, groups).expect("builtin lexicon is valid")
}
