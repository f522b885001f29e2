//! Shared inputs for the criterion benches.

use markerdrift::synth::{generate, SynthConfig, YearPlan};
use markerdrift::{builtin_lexicon, Document};

/// A deterministic corpus of `docs_per_year` documents for each of five
/// years, 10% of them carrying strong markers.
pub fn corpus(docs_per_year: usize, words_per_doc: usize) -> Vec<Document> {
    let lex = builtin_lexicon();
    let plan = (2019..=2023)
        .map(|year| YearPlan {
            year,
            docs: docs_per_year,
            marked: docs_per_year / 10,
        })
        .collect();
    let mut cfg =
        SynthConfig::new(42, plan, lex.group("strong").unwrap().to_vec()).excluding_lexicon(&lex);
    cfg.words_per_doc = words_per_doc;
    generate(&cfg)
}
