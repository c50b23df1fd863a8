//! Seeded synthetic corpora with a planted group skew: each query's topic
//! terms live almost entirely in one group's documents, over a background
//! vocabulary shared by every group.
//!
//! Words are letter-digit tokens (`bg17`, `q3t1`) so the stemmer and the
//! stopword list leave them alone.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Category, Document};
use crate::error::{Error, Result};
use crate::retrieval::topics::Topic;

pub const CATEGORY: &str = "group";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub groups: usize,
    pub docs_per_group: usize,
    pub queries: usize,
    pub terms_per_query: usize,
    /// Documents of the dominant group that receive each topic term.
    pub topic_docs: usize,
    /// Documents of every other group that receive each topic term.
    pub leak_docs: usize,
    /// Largest topic-term frequency in a dominant-group document.
    pub max_topic_tf: u32,
    pub doc_len: usize,
    pub background_vocab: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            groups: 4,
            docs_per_group: 100,
            queries: 40,
            terms_per_query: 2,
            topic_docs: 12,
            leak_docs: 1,
            max_topic_tf: 3,
            doc_len: 30,
            background_vocab: 500,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCorpus {
    pub documents: Vec<Document>,
    pub categories: Vec<Category>,
    pub topics: Vec<Topic>,
    /// Index of the planted group for each topic.
    pub dominant: Vec<usize>,
}

impl SyntheticCorpus {
    /// Share of each topic's query-term occurrences held by its planted
    /// group.
    pub fn dominant_mass_share(&self) -> Vec<f64> {
        let group_of = |d: &Document| -> usize {
            let label = &d.labels[CATEGORY];
            self.categories[0]
                .groups
                .iter()
                .position(|g| g == label)
                .expect("known group")
        };
        self.topics
            .iter()
            .zip(&self.dominant)
            .map(|(topic, &g)| {
                let terms: Vec<&str> = topic.text.split_whitespace().collect();
                let (mut inside, mut total) = (0usize, 0usize);
                for d in &self.documents {
                    let hits = d.text.split_whitespace().filter(|w| terms.contains(w)).count();
                    total += hits;
                    if group_of(d) == g {
                        inside += hits;
                    }
                }
                inside as f64 / total as f64
            })
            .collect()
    }
}

pub fn generate(config: &SyntheticConfig) -> Result<SyntheticCorpus> {
    if config.groups == 0 || config.docs_per_group == 0 || config.terms_per_query == 0 || config.background_vocab == 0 {
        return Err(Error::InvalidArgument("synthetic corpus sizes must be positive".into()));
    }
    if config.topic_docs == 0 || config.topic_docs > config.docs_per_group || config.leak_docs > config.docs_per_group {
        return Err(Error::InvalidArgument(
            "topic_docs and leak_docs must fit within a group".into(),
        ));
    }
    if config.max_topic_tf == 0 {
        return Err(Error::InvalidArgument("max_topic_tf must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let groups: Vec<String> = (0..config.groups).map(|g| format!("G{g}")).collect();

    let zipf: Vec<f64> = (1..=config.background_vocab).map(|r| 1.0 / r as f64).collect();
    let background = WeightedIndex::new(&zipf).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut texts: Vec<Vec<Vec<String>>> = (0..config.groups)
        .map(|_| {
            (0..config.docs_per_group)
                .map(|_| {
                    (0..config.doc_len)
                        .map(|_| format!("bg{}", background.sample(&mut rng)))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut topics = Vec::with_capacity(config.queries);
    let mut dominant = Vec::with_capacity(config.queries);
    for q in 0..config.queries {
        let g = q % config.groups;
        let mut words = Vec::with_capacity(config.terms_per_query);
        for t in 0..config.terms_per_query {
            let term = format!("q{q}t{t}");
            for d in sample(&mut rng, config.docs_per_group, config.topic_docs) {
                let tf = rng.random_range(1..=config.max_topic_tf);
                for _ in 0..tf {
                    texts[g][d].push(term.clone());
                }
            }
            for (other, docs) in texts.iter_mut().enumerate() {
                if other == g {
                    continue;
                }
                for d in sample(&mut rng, config.docs_per_group, config.leak_docs) {
                    docs[d].push(term.clone());
                }
            }
            words.push(term);
        }
        topics.push(Topic {
            query_id: format!("q{q}"),
            text: words.join(" "),
        });
        dominant.push(g);
    }

    let documents = texts
        .into_iter()
        .enumerate()
        .flat_map(|(g, docs)| {
            let label = groups[g].clone();
            docs.into_iter().enumerate().map(move |(i, words)| {
                Document::new(format!("{label}-d{i:04}"), words.join(" ")).with_label(CATEGORY, label.clone())
            })
        })
        .collect();
    Ok(SyntheticCorpus {
        documents,
        categories: vec![Category::new(CATEGORY, groups)],
        topics,
        dominant,
    })
}
