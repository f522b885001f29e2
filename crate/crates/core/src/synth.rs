//! Seeded synthetic corpora with a known number of marker documents per year.
//!
//! Filler text is built from pseudo-words that never collide with the
//! excluded vocabulary, so a document contains a marker term exactly when
//! the generator planted one.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{fold, Document};
use crate::lexicon::Lexicon;

/// Documents to generate for one year.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YearPlan {
    pub year: i32,
    pub docs: usize,
    /// How many of them carry at least one marker term.
    pub marked: usize,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub plan: Vec<YearPlan>,
    pub words_per_doc: usize,
    /// Terms planted in marked documents.
    pub markers: Vec<String>,
    /// Upper bound on distinct markers planted in one marked document.
    pub max_markers_per_doc: usize,
    /// Words that filler text must never produce.
    pub exclude: HashSet<String>,
    pub categories: Vec<String>,
}

impl SynthConfig {
    pub fn new(seed: u64, plan: Vec<YearPlan>, markers: Vec<String>) -> Self {
        SynthConfig {
            seed,
            plan,
            words_per_doc: 200,
            markers,
            max_markers_per_doc: 3,
            exclude: HashSet::new(),
            categories: Vec::new(),
        }
    }

    /// Excludes every token of every lexicon entry from filler text.
    pub fn excluding_lexicon(mut self, lexicon: &Lexicon) -> Self {
        for e in lexicon.entries() {
            self.exclude.extend(crate::corpus::tokenize(&e.term));
        }
        self
    }
}

const SYLLABLES: [&str; 24] = [
    "ba", "ko", "ri", "te", "mu", "sa", "lo", "ne", "vi", "da", "pe", "zu", "ga", "fo", "hi", "ju",
    "ca", "wo", "ny", "qe", "xo", "ly", "bri", "stu",
];

fn filler_lexicon(rng: &mut ChaCha8Rng, exclude: &HashSet<String>, size: usize) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut words = Vec::with_capacity(size);
    while words.len() < size {
        let n = rng.random_range(1..=4);
        let w: String = (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
        if !exclude.contains(&w) && seen.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

/// Generates the corpus. Output order is year-major; ids are unique.
pub fn generate(cfg: &SynthConfig) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut exclude: HashSet<String> = cfg.exclude.iter().map(|w| fold(w)).collect();
    exclude.extend(cfg.markers.iter().map(|m| fold(m)));
    let filler = filler_lexicon(&mut rng, &exclude, 2000);
    let mut docs = Vec::with_capacity(cfg.plan.iter().map(|p| p.docs).sum());
    for plan in &cfg.plan {
        assert!(
            plan.marked <= plan.docs,
            "more marked documents than documents"
        );
        let mut marked = vec![false; plan.docs];
        for i in rand::seq::index::sample(&mut rng, plan.docs, plan.marked) {
            marked[i] = true;
        }
        for (i, &is_marked) in marked.iter().enumerate() {
            let mut words: Vec<&str> = (0..cfg.words_per_doc)
                .map(|_| filler.choose(&mut rng).unwrap().as_str())
                .collect();
            if is_marked && !cfg.markers.is_empty() {
                let k = rng.random_range(1..=cfg.max_markers_per_doc.clamp(1, cfg.markers.len()));
                for m in cfg.markers.choose_multiple(&mut rng, k) {
                    let at = rng.random_range(0..=words.len());
                    words.insert(at, m.as_str());
                }
            }
            let mut text = String::with_capacity(words.len() * 7);
            for (j, w) in words.iter().enumerate() {
                if j > 0 {
                    text.push_str(if j % 13 == 0 { ". " } else { " " });
                }
                if j % 13 == 0 {
                    let mut cs = w.chars();
                    if let Some(c) = cs.next() {
                        text.extend(c.to_uppercase());
                        text.push_str(cs.as_str());
                    }
                } else {
                    text.push_str(w);
                }
            }
            text.push('.');
            let mut doc = Document::new(format!("doc-{}-{:06}", plan.year, i), plan.year, text);
            if !cfg.categories.is_empty() {
                doc.categories = vec![cfg.categories.choose(&mut rng).unwrap().clone()];
            }
            docs.push(doc);
        }
    }
    docs
}
