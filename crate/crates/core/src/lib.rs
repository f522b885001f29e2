//! Marker-word drift analysis over dated document corpora.
//!
//! The pipeline reduces documents to whole-word presence of lexicon terms
//! ([`corpus`]), aggregates that evidence per publication year ([`index`]),
//! answers boolean marker queries ([`query`]) and turns yearly counts into
//! shares, year-on-year changes and excess-over-baseline estimates
//! ([`stats`], [`report`]). Count tables exported from other systems enter
//! through [`counts`].

pub mod corpus;
pub mod counts;
pub mod index;
pub mod lexicon;
pub mod plot;
pub mod query;
pub mod report;
pub mod stats;
pub mod synth;

pub use corpus::{
    load_corpus, term_presence, tokenize, Document, ErrorPolicy, LoadOptions, TokenSet, Vocabulary,
};
pub use counts::{export_counts, import_counts, CountTable};
pub use index::{build_index, eval_count_scan, load_index, save_index, YearTermIndex};
pub use lexicon::{builtin_lexicon, load_lexicon, Lexicon, Role, TermEntry};
pub use query::{parse_query, Operand, Query, QueryError};
pub use report::{DriftOptions, DriftReport, Format};
pub use stats::{
    baseline_projection, count_increase, excess, implied_total_ratio, share, share_increase,
    yoy_change, CountPoint, CountSeries,
};
