//! GEP: per-group top-k tf-idf profiles of the query terms, compared to a
//! collection-level query vector by dot product.

use serde::{Deserialize, Serialize};

use super::{PredictorConfig, PredictorOutput, QueryIdf};
use crate::corpus::{CategoryIndex, CollectionIndex};
use crate::error::{Error, Result};
use crate::retrieval::Query;

/// One score per distinct query term for a group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScoreVector {
    pub group: String,
    pub scores: Vec<f64>,
}

/// `log2((docs − df + 0.5) / (df + 0.5))`, optionally floored at zero.
fn bm25_style_idf(docs: f64, df: f64, floor: bool) -> f64 {
    let idf = ((docs - df + 0.5) / (df + 0.5)).log2();
    if floor {
        idf.max(0.0)
    } else {
        idf
    }
}

/// Mean of the k largest tf·idf values over a group, counting every group
/// document without the term (and every slot beyond the group size) as a
/// zero score.
fn top_k_mean(tfs: &mut [u32], idf: f64, group_docs: u32, k: usize) -> f64 {
    let zeros = (group_docs as usize).max(k) - tfs.len();
    let take_nonzero = if idf >= 0.0 {
        tfs.sort_unstable_by(|a, b| b.cmp(a));
        k.min(tfs.len())
    } else {
        // Negative scores rank below the zeros; the largest are the
        // smallest term frequencies.
        tfs.sort_unstable();
        k.saturating_sub(zeros).min(tfs.len())
    };
    let sum: f64 = tfs[..take_nonzero].iter().map(|&tf| tf as f64 * idf).sum();
    sum / k as f64
}

/// Scores of one indexed term for every group of the category.
fn term_group_scores(index: &CollectionIndex, cat: &CategoryIndex, term: u32, k: usize, floor: bool) -> Vec<f64> {
    let mut per_group: Vec<Vec<u32>> = vec![Vec::new(); cat.num_groups()];
    for p in index.postings(term) {
        per_group[cat.group_of(p.doc)].push(p.tf);
    }
    per_group
        .iter_mut()
        .enumerate()
        .map(|(g, tfs)| {
            let docs = cat.group_num_docs(g);
            let idf = bm25_style_idf(docs as f64, tfs.len() as f64, floor);
            top_k_mean(tfs, idf, docs, k)
        })
        .collect()
}

/// `s` for one term and group: the mean of the group's k largest tf·idf_g
/// scores, where idf_g uses the group's own document counts.
pub fn gep_group_term_score(
    index: &CollectionIndex,
    term: &str,
    category: &str,
    group: &str,
    k: usize,
    idf_floor: bool,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let cat = index.category(category)?;
    let g = cat.group_index(group)?;
    Ok(match index.term_id(term) {
        Some(id) => term_group_scores(index, cat, id, k, idf_floor)[g],
        None => 0.0,
    })
}

/// Collection-level weight of each distinct query term: qtf · idf over the
/// whole collection. Unindexed terms weigh zero.
pub fn gep_query_vector(index: &CollectionIndex, query: &Query, config: &PredictorConfig) -> Vec<(String, f64)> {
    let n = index.num_docs() as f64;
    query
        .term_frequencies()
        .into_iter()
        .map(|(term, qtf)| {
            let w = match index.term_id(&term) {
                Some(id) => {
                    let df = index.df(id) as f64;
                    let idf = match config.query_idf {
                        QueryIdf::Bm25Style => bm25_style_idf(n, df, config.idf_floor),
                        QueryIdf::Classic => (n / df).log2(),
                    };
                    qtf * idf
                }
                None => 0.0,
            };
            (term, w)
        })
        .collect()
}

/// The per-group vectors `S_g`, one score per distinct query term.
pub fn gep_score_vectors(
    index: &CollectionIndex,
    query: &Query,
    category: &str,
    config: &PredictorConfig,
) -> Result<Vec<GroupScoreVector>> {
    if config.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let cat = index.category(category)?;
    let terms = query.term_frequencies();
    let mut vectors: Vec<GroupScoreVector> = cat
        .groups()
        .iter()
        .map(|g| GroupScoreVector {
            group: g.clone(),
            scores: Vec::with_capacity(terms.len()),
        })
        .collect();
    for (term, _) in &terms {
        let scores = match index.term_id(term) {
            Some(id) => term_group_scores(index, cat, id, config.k, config.idf_floor),
            None => vec![0.0; cat.num_groups()],
        };
        for (v, s) in vectors.iter_mut().zip(scores) {
            v.scores.push(s);
        }
    }
    Ok(vectors)
}

pub fn predict_gep(
    index: &CollectionIndex,
    query: &Query,
    category: &str,
    config: &PredictorConfig,
) -> Result<PredictorOutput> {
    if query.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let cat = index.category(category)?;
    let q = gep_query_vector(index, query, config);
    let raw: Vec<f64> = gep_score_vectors(index, query, category, config)?
        .iter()
        .map(|v| v.scores.iter().zip(&q).map(|(s, (_, w))| s * w).sum())
        .collect();
    PredictorOutput::from_raw("gep", cat, raw)
}
