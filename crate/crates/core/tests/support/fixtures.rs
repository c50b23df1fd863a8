//! Small random corpora for equivalence and property tests.

#![allow(dead_code)]

use rand::Rng;

use qep_core::text::tokenize;
use qep_core::{Category, Document};

pub const CATEGORY: &str = "cat";

const WORDS: &[&str] = &[
    "orbit", "planet", "galaxy", "nebula", "comet", "stars", "moon", "craters", "w1", "w2", "w3", "w4",
];

pub struct Fixture {
    pub docs: Vec<Document>,
    pub categories: Vec<Category>,
    /// Processed query terms, possibly with repeats and unseen terms.
    pub query: Vec<String>,
}

pub fn random_fixture<R: Rng>(rng: &mut R, max_docs: usize, max_groups: usize) -> Fixture {
    let n_groups = rng.random_range(1..=max_groups);
    let groups: Vec<String> = (0..n_groups).map(|g| format!("g{g}")).collect();
    let n_docs = rng.random_range(1..=max_docs);
    let docs = (0..n_docs)
        .map(|i| {
            let len = rng.random_range(0..=8);
            let text: Vec<&str> = (0..len).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
            let group = &groups[rng.random_range(0..n_groups)];
            Document::new(format!("d{i:02}"), text.join(" ")).with_label(CATEGORY, group.clone())
        })
        .collect();
    let q_len = rng.random_range(1..=4);
    let mut words: Vec<&str> = (0..q_len).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
    if rng.random_bool(0.2) {
        words.push("zzqx");
    }
    Fixture {
        docs,
        categories: vec![Category::new(CATEGORY, groups)],
        query: tokenize(&words.join(" ")),
    }
}
