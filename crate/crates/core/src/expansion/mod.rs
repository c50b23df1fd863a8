//! Pseudo-relevance feedback: rewrite a query from the top documents of a
//! first-pass ranking, then rank again.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::CollectionIndex;
use crate::error::{Error, Result};
use crate::retrieval::{rank, Query, Ranking, RankingModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    pub fb_docs: usize,
    pub fb_terms: usize,
    /// RM3 interpolation weight on the relevance model.
    pub lambda: f64,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            fb_docs: 3,
            fb_terms: 10,
            lambda: 0.5,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fb_docs == 0 {
            return Err(Error::InvalidArgument("fb_docs must be at least 1".into()));
        }
        if self.fb_terms == 0 {
            return Err(Error::InvalidArgument("fb_terms must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expander {
    Rm3,
    Klq,
}

impl Expander {
    pub const ALL: [Expander; 2] = [Expander::Rm3, Expander::Klq];

    pub fn name(self) -> &'static str {
        match self {
            Expander::Rm3 => "rm3",
            Expander::Klq => "klq",
        }
    }

    pub fn expand(
        self,
        index: &CollectionIndex,
        query: &Query,
        ranking: &Ranking,
        config: &ExpansionConfig,
    ) -> Result<Expansion> {
        match self {
            Expander::Rm3 => expand_rm3(index, query, ranking, config),
            Expander::Klq => expand_klq(index, query, ranking, config),
        }
    }
}

impl fmt::Display for Expander {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Expander {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expander::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown expander {s:?}")))
    }
}

/// Result of a feedback pass. `applied` is false when the ranking was empty
/// and the query came back unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub query: Query,
    pub applied: bool,
}

impl Expansion {
    fn unchanged(query: &Query) -> Self {
        Self {
            query: query.clone(),
            applied: false,
        }
    }
}

/// Serialized form of an expanded query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedQuery {
    pub query_id: String,
    pub terms: Vec<String>,
    pub weights: Vec<f64>,
}

impl ExpandedQuery {
    pub fn new(query_id: impl Into<String>, query: &Query) -> Self {
        Self {
            query_id: query_id.into(),
            terms: query.terms().to_vec(),
            weights: query.weights().to_vec(),
        }
    }

    pub fn to_query(&self) -> Result<Query> {
        Query::weighted(self.terms.clone(), self.weights.clone())
    }
}

/// Internal doc numbers of the top `fb_docs` entries.
fn feedback_docs(index: &CollectionIndex, ranking: &Ranking, fb_docs: usize) -> Result<Vec<(u32, f64)>> {
    ranking
        .entries
        .iter()
        .take(fb_docs)
        .map(|e| {
            index
                .doc_number(&e.doc_id)
                .map(|d| (d, e.score))
                .ok_or_else(|| Error::UnknownDocument(e.doc_id.clone()))
        })
        .collect()
}

/// Descending weight, then ascending term.
fn by_weight(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

/// Relevance model over the feedback set, `P_rm(t) ∝ Σ_d P(t|d) · score'(d)`
/// with min-max normalized retrieval scores (all 1 when they coincide).
pub fn relevance_model(index: &CollectionIndex, ranking: &Ranking, fb_docs: usize) -> Result<Vec<(String, f64)>> {
    let docs = feedback_docs(index, ranking, fb_docs)?;
    let (lo, hi) = docs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, s)| {
            (lo.min(s), hi.max(s))
        });
    let mut mass: HashMap<u32, f64> = HashMap::new();
    for &(doc, score) in &docs {
        let prior = if hi > lo { (score - lo) / (hi - lo) } else { 1.0 };
        let len = index.doc_len(doc) as f64;
        if prior == 0.0 || len == 0.0 {
            continue;
        }
        for &(term, tf) in index.doc_terms(doc) {
            *mass.entry(term).or_insert(0.0) += tf as f64 / len * prior;
        }
    }
    let total: f64 = mass.values().sum();
    let mut model: Vec<(String, f64)> = mass
        .into_iter()
        .map(|(t, m)| (index.term(t).to_string(), m / total))
        .collect();
    model.sort_by(by_weight);
    Ok(model)
}

/// RM3: interpolate the query's maximum-likelihood model with the relevance
/// model, keep the top `fb_terms` relevance-model terms plus every original
/// term, and renormalize to sum 1. Originals come first in the result.
pub fn expand_rm3(
    index: &CollectionIndex,
    query: &Query,
    ranking: &Ranking,
    config: &ExpansionConfig,
) -> Result<Expansion> {
    config.validate()?;
    if ranking.is_empty() {
        return Ok(Expansion::unchanged(query));
    }
    let lambda = config.lambda;
    let model = relevance_model(index, ranking, config.fb_docs)?;
    let rm: HashMap<&str, f64> = model.iter().map(|(t, p)| (t.as_str(), *p)).collect();
    let originals = query.term_frequencies();
    let query_mass = query.total_weight();

    let mut terms: Vec<(String, f64)> = originals
        .iter()
        .map(|(t, qtf)| {
            let ml = if query_mass > 0.0 { qtf / query_mass } else { 0.0 };
            let w = (1.0 - lambda) * ml + lambda * rm.get(t.as_str()).copied().unwrap_or(0.0);
            (t.clone(), w)
        })
        .collect();
    let mut expansions: Vec<(String, f64)> = model
        .iter()
        .take(config.fb_terms)
        .filter(|(t, _)| !originals.iter().any(|(o, _)| o == t))
        .map(|(t, p)| (t.clone(), lambda * p))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    expansions.sort_by(by_weight);
    terms.extend(expansions);

    let total: f64 = terms.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Ok(Expansion::unchanged(query));
    }
    let (terms, weights): (Vec<String>, Vec<f64>) = terms.into_iter().map(|(t, w)| (t, w / total)).unzip();
    Ok(Expansion {
        query: Query::weighted(terms, weights)?,
        applied: true,
    })
}

/// KL weight `P(t|F) · log2(P(t|F) / P(t|C))` of every term in the feedback
/// set, sorted by descending weight.
pub fn kl_term_weights(index: &CollectionIndex, ranking: &Ranking, fb_docs: usize) -> Result<Vec<(String, f64)>> {
    let docs = feedback_docs(index, ranking, fb_docs)?;
    let mut cf_f: HashMap<u32, u64> = HashMap::new();
    let mut tokens_f = 0u64;
    for &(doc, _) in &docs {
        tokens_f += index.doc_len(doc) as u64;
        for &(term, tf) in index.doc_terms(doc) {
            *cf_f.entry(term).or_insert(0) += tf as u64;
        }
    }
    let total = index.total_tokens() as f64;
    let mut weights: Vec<(String, f64)> = cf_f
        .into_iter()
        .map(|(t, cf)| {
            let p_f = cf as f64 / tokens_f as f64;
            let p_c = index.cf(t) as f64 / total;
            (index.term(t).to_string(), p_f * (p_f / p_c).log2())
        })
        .collect();
    weights.sort_by(by_weight);
    Ok(weights)
}

/// KLQ: append the top `fb_terms` positive KL-weight terms not already in
/// the query. Expansion weights are scaled so their sum equals the original
/// query's total weight; original weights are untouched.
pub fn expand_klq(
    index: &CollectionIndex,
    query: &Query,
    ranking: &Ranking,
    config: &ExpansionConfig,
) -> Result<Expansion> {
    config.validate()?;
    if ranking.is_empty() {
        return Ok(Expansion::unchanged(query));
    }
    let selected: Vec<(String, f64)> = kl_term_weights(index, ranking, config.fb_docs)?
        .into_iter()
        .filter(|(t, w)| *w > 0.0 && !query.terms().contains(t))
        .take(config.fb_terms)
        .collect();
    let kl_mass: f64 = selected.iter().map(|(_, w)| w).sum();
    let mut terms = query.terms().to_vec();
    let mut weights = query.weights().to_vec();
    let scale = if kl_mass > 0.0 {
        query.total_weight() / kl_mass
    } else {
        0.0
    };
    for (t, w) in selected {
        terms.push(t);
        weights.push(w * scale);
    }
    Ok(Expansion {
        query: Query::weighted(terms, weights)?,
        applied: true,
    })
}

/// Two-pass retrieval: rank, expand from the top documents, rank again with
/// the expanded query.
pub fn rank_with_feedback(
    index: &CollectionIndex,
    query_id: &str,
    query: &Query,
    model: RankingModel,
    expander: Expander,
    config: &ExpansionConfig,
    k: usize,
) -> Result<(Ranking, Expansion)> {
    let first = rank(index, query_id, query, model, k.max(config.fb_docs))?;
    let expansion = expander.expand(index, query, &first, config)?;
    let second = rank(index, query_id, &expansion.query, model, k)?;
    Ok((second, expansion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_index, Document};
    use crate::retrieval::RankedDoc;
    use approx::assert_abs_diff_eq;

    fn fixture() -> CollectionIndex {
        let docs = vec![
            Document::new("d1", "solar wind solar flare"),
            Document::new("d2", "solar panel"),
            Document::new("d3", "wind turbine blade"),
            Document::new("d4", "ocean tide"),
            Document::new("d5", "tide pool ocean ocean"),
        ];
        build_index(&docs, &[]).unwrap()
    }

    fn ranking(entries: &[(&str, f64)]) -> Ranking {
        Ranking {
            query_id: "q".into(),
            entries: entries
                .iter()
                .map(|(d, s)| RankedDoc {
                    doc_id: d.to_string(),
                    score: *s,
                })
                .collect(),
            k: 10,
        }
    }

    fn weight_of(q: &Query, term: &str) -> f64 {
        q.iter().filter(|(t, _)| *t == term).map(|(_, w)| w).sum()
    }

    #[test]
    fn config_validation() {
        assert!(ExpansionConfig::default().validate().is_ok());
        for bad in [
            ExpansionConfig {
                fb_docs: 0,
                ..Default::default()
            },
            ExpansionConfig {
                fb_terms: 0,
                ..Default::default()
            },
            ExpansionConfig {
                lambda: 1.5,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn rm3_lambda_zero_keeps_query_model() {
        let idx = fixture();
        let q = Query::from_terms(["solar", "solar", "wind"]);
        let cfg = ExpansionConfig {
            lambda: 0.0,
            ..Default::default()
        };
        let out = expand_rm3(&idx, &q, &ranking(&[("d1", 3.0), ("d2", 2.0), ("d3", 1.0)]), &cfg).unwrap();
        assert!(out.applied);
        assert_eq!(out.query.terms(), ["solar", "wind"]);
        assert_abs_diff_eq!(out.query.weights()[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.query.weights()[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rm3_lambda_one_single_doc_is_document_model() {
        let idx = fixture();
        let q = Query::from_terms(["tide"]);
        let cfg = ExpansionConfig {
            lambda: 1.0,
            fb_docs: 1,
            fb_terms: 10,
        };
        let out = expand_rm3(&idx, &q, &ranking(&[("d5", 1.0)]), &cfg).unwrap();
        // d5 = tide pool ocean ocean.
        assert_abs_diff_eq!(weight_of(&out.query, "tide"), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(weight_of(&out.query, "pool"), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(weight_of(&out.query, "ocean"), 0.5, epsilon = 1e-12);
        assert_eq!(out.query.terms()[0], "tide");
        assert_eq!(out.query.terms()[1], "ocean");

        let truncated = expand_rm3(
            &idx,
            &q,
            &ranking(&[("d5", 1.0)]),
            &ExpansionConfig { fb_terms: 1, ..cfg },
        )
        .unwrap();
        // Only "ocean" survives from the relevance model; "tide" stays as an
        // original term.
        assert_eq!(truncated.query.terms(), ["tide", "ocean"]);
        assert_abs_diff_eq!(truncated.query.weights()[0], 0.25 / 0.75, epsilon = 1e-12);
    }

    #[test]
    fn rm3_hand_computed_three_docs() {
        let idx = fixture();
        let q = Query::from_terms(["solar"]);
        // Priors after min-max: d1 = 1, d2 = 0.5, d3 = 0.
        let r = ranking(&[("d1", 4.0), ("d2", 3.0), ("d3", 2.0)]);
        let out = expand_rm3(&idx, &q, &r, &ExpansionConfig::default()).unwrap();
        // Unnormalized relevance mass: solar .5 + .25, wind .25, flare .25,
        // panel .25; total 1.5.
        let rm_solar = 0.75 / 1.5;
        let rm_other = 0.25 / 1.5;
        assert_abs_diff_eq!(weight_of(&out.query, "solar"), 0.5 + 0.5 * rm_solar, epsilon = 1e-12);
        for t in ["wind", "flare", "panel"] {
            assert_abs_diff_eq!(weight_of(&out.query, t), 0.5 * rm_other, epsilon = 1e-12);
        }
        assert_eq!(weight_of(&out.query, "turbine"), 0.0);
        assert_abs_diff_eq!(out.query.total_weight(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_ranking_leaves_query_alone() {
        let idx = fixture();
        let q = Query::from_terms(["solar"]);
        for e in Expander::ALL {
            let out = e.expand(&idx, &q, &ranking(&[]), &ExpansionConfig::default()).unwrap();
            assert!(!out.applied);
            assert_eq!(out.query, q);
        }
    }

    #[test]
    fn klq_weights_and_mass() {
        let idx = fixture();
        let q = Query::from_terms(["ocean"]);
        let r = ranking(&[("d4", 2.0), ("d5", 1.0)]);
        let w = kl_term_weights(&idx, &r, 3).unwrap();
        // F holds 6 tokens: ocean x3, tide x2, pool x1. The collection has 15.
        let get = |t: &str| w.iter().find(|(x, _)| x == t).unwrap().1;
        assert_abs_diff_eq!(
            get("tide"),
            (2.0 / 6.0) * ((2.0 / 6.0) / (2.0 / 15.0f64)).log2(),
            epsilon = 1e-12
        );
        assert!(get("pool") > 0.0);
        let out = expand_klq(&idx, &q, &r, &ExpansionConfig::default()).unwrap();
        assert_eq!(out.query.terms()[0], "ocean");
        assert_eq!(out.query.weights()[0], 1.0);
        let expansion_mass: f64 = out.query.weights()[1..].iter().sum();
        assert_abs_diff_eq!(expansion_mass, 1.0, epsilon = 1e-12);
        assert_eq!(out.query.len(), 3);
    }

    #[test]
    fn klq_background_term_never_selected() {
        // One document forms the whole collection: P(t|F) = P(t|C) for all.
        let idx = build_index(&[Document::new("d", "alpha beta beta")], &[]).unwrap();
        let out = expand_klq(
            &idx,
            &Query::from_terms(["alpha"]),
            &ranking(&[("d", 1.0)]),
            &ExpansionConfig::default(),
        )
        .unwrap();
        assert_eq!(out.query.terms(), ["alpha"]);
    }

    #[test]
    fn unknown_feedback_document_is_an_error() {
        let idx = fixture();
        let r = ranking(&[("nope", 1.0)]);
        assert!(matches!(
            expand_rm3(&idx, &Query::from_terms(["solar"]), &r, &ExpansionConfig::default()),
            Err(Error::UnknownDocument(_))
        ));
    }

    #[test]
    fn feedback_ranking_keeps_original_terms() {
        let idx = fixture();
        let q = Query::parse("solar wind");
        for e in Expander::ALL {
            let (ranking, expansion) =
                rank_with_feedback(&idx, "q", &q, RankingModel::bm25(), e, &ExpansionConfig::default(), 10).unwrap();
            assert!(!ranking.is_empty());
            for t in q.terms() {
                assert!(expansion.query.terms().contains(t));
            }
        }
    }

    #[test]
    fn expanded_query_json_round_trip() {
        let q = Query::weighted(vec!["a".into(), "b".into()], vec![0.75, 0.25]).unwrap();
        let rec = ExpandedQuery::new("q7", &q);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"query_id":"q7","terms":["a","b"],"weights":[0.75,0.25]}"#);
        let back: ExpandedQuery = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_query().unwrap(), q);
    }
}
