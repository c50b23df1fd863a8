//! First-pass lexical retrieval: BM25 and TF-IDF over the collection index.
//!
//! A document's score is the weighted sum of per-term contributions,
//! `Σ_t weight(t) · contribution(t, d)`. Documents scoring zero are never
//! retrieved and ties are broken by ascending `doc_id`.

pub mod topics;
pub mod trec;

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::CollectionIndex;
use crate::error::{Error, Result};
use crate::text;

/// Processed query terms with nonnegative weights (1.0 for original terms).
/// Terms may repeat; a repeated term contributes once per occurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QueryRepr", into = "QueryRepr")]
pub struct Query {
    terms: Vec<String>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct QueryRepr {
    terms: Vec<String>,
    weights: Vec<f64>,
}

impl TryFrom<QueryRepr> for Query {
    type Error = Error;
    fn try_from(r: QueryRepr) -> Result<Self> {
        Query::weighted(r.terms, r.weights)
    }
}

impl From<Query> for QueryRepr {
    fn from(q: Query) -> Self {
        QueryRepr {
            terms: q.terms,
            weights: q.weights,
        }
    }
}

impl Query {
    pub fn from_terms<S: Into<String>>(terms: impl IntoIterator<Item = S>) -> Self {
        let terms: Vec<String> = terms.into_iter().map(Into::into).collect();
        let weights = vec![1.0; terms.len()];
        Self { terms, weights }
    }

    /// Runs the document text pipeline over a raw query string.
    pub fn parse(text: &str) -> Self {
        Self::from_terms(text::tokenize(text))
    }

    pub fn weighted(terms: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if terms.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                left: terms.len(),
                right: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "query weights must be finite and nonnegative, got {w}"
            )));
        }
        Ok(Self { terms, weights })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.terms.iter().map(String::as_str).zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Distinct terms in first-occurrence order with their summed weight
    /// (the query term frequency for unweighted queries).
    pub fn term_frequencies(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = Vec::new();
        let mut slot: HashMap<&str, usize> = HashMap::new();
        for (t, w) in self.iter() {
            match slot.get(t) {
                Some(&i) => out[i].1 += w,
                None => {
                    slot.insert(t, out.len());
                    out.push((t.to_string(), w));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum RankingModel {
    Bm25(Bm25Params),
    TfIdf,
}

impl RankingModel {
    pub fn bm25() -> Self {
        RankingModel::Bm25(Bm25Params::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            RankingModel::Bm25(_) => "bm25",
            RankingModel::TfIdf => "tfidf",
        }
    }

    /// Contribution of one occurrence-weighted term to a document's score.
    fn contribution(&self, index: &CollectionIndex, term: u32, doc: u32, tf: u32) -> f64 {
        if tf == 0 {
            return 0.0;
        }
        let n = index.num_docs() as f64;
        let df = index.df(term) as f64;
        let tf = tf as f64;
        match *self {
            RankingModel::Bm25(Bm25Params { k1, b }) => {
                let idf = bm25_idf(n, df);
                let dl = index.doc_len(doc) as f64;
                let norm = k1 * (1.0 - b + b * dl / index.avg_doc_len());
                idf * tf * (k1 + 1.0) / (tf + norm)
            }
            RankingModel::TfIdf => tf * tfidf_idf(n, df),
        }
    }
}

/// `log2(1 + (N − df + 0.5) / (df + 0.5))`, positive for every df ≤ N.
pub fn bm25_idf(num_docs: f64, df: f64) -> f64 {
    (1.0 + (num_docs - df + 0.5) / (df + 0.5)).log2()
}

/// `log2(N / df)` floored at zero.
pub fn tfidf_idf(num_docs: f64, df: f64) -> f64 {
    (num_docs / df).log2().max(0.0)
}

fn score_doc(index: &CollectionIndex, doc: u32, query: &Query, model: RankingModel) -> f64 {
    let mut total = 0.0;
    for (term, weight) in query.iter() {
        let Some(id) = index.term_id(term) else {
            continue;
        };
        let tf = index.tf(id, doc);
        if tf > 0 {
            total += weight * model.contribution(index, id, doc, tf);
        }
    }
    total
}

pub fn score(index: &CollectionIndex, doc_id: &str, query: &Query, model: RankingModel) -> Result<f64> {
    let doc = index
        .doc_number(doc_id)
        .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))?;
    Ok(score_doc(index, doc, query, model))
}

pub fn score_bm25(index: &CollectionIndex, doc_id: &str, query: &Query, params: Bm25Params) -> Result<f64> {
    score(index, doc_id, query, RankingModel::Bm25(params))
}

pub fn score_tfidf(index: &CollectionIndex, doc_id: &str, query: &Query) -> Result<f64> {
    score(index, doc_id, query, RankingModel::TfIdf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDoc {
    pub doc_id: String,
    pub score: f64,
}

/// Top-k result list. Position `i` of `entries` is rank `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub query_id: String,
    pub entries: Vec<RankedDoc>,
    pub k: usize,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }

    pub fn truncated(mut self, k: usize) -> Self {
        self.entries.truncate(k);
        self.k = k;
        self
    }
}

/// Descending score, then ascending doc_id.
pub fn rank_order(a: &RankedDoc, b: &RankedDoc) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.doc_id.cmp(&b.doc_id))
}

/// Term-at-a-time evaluation over postings; equivalent to scoring every
/// document and sorting.
pub fn rank(index: &CollectionIndex, query_id: &str, query: &Query, model: RankingModel, k: usize) -> Result<Ranking> {
    if k == 0 {
        return Err(Error::InvalidArgument("ranking depth k must be at least 1".into()));
    }
    let mut acc: HashMap<u32, f64> = HashMap::new();
    for (term, weight) in query.iter() {
        let Some(id) = index.term_id(term) else {
            continue;
        };
        for p in index.postings(id) {
            *acc.entry(p.doc).or_insert(0.0) += weight * model.contribution(index, id, p.doc, p.tf);
        }
    }
    let mut entries: Vec<RankedDoc> = acc
        .into_iter()
        .filter(|&(_, s)| s > 0.0)
        .map(|(doc, score)| RankedDoc {
            doc_id: index.doc_id(doc).to_string(),
            score,
        })
        .collect();
    if entries.len() > k {
        entries.select_nth_unstable_by(k - 1, rank_order);
        entries.truncate(k);
    }
    entries.sort_by(rank_order);
    Ok(Ranking {
        query_id: query_id.to_string(),
        entries,
        k,
    })
}
