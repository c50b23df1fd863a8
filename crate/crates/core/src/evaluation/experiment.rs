use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bonferroni, coefficient_of_variation, jsd, paired_t_test, Deviation};
use crate::corpus::CollectionIndex;
use crate::error::{Error, Result};
use crate::expansion::{rank_with_feedback, Expander, ExpansionConfig};
use crate::exposure::{group_exposure, normalize_exposure, ExposureDistribution, ExposureModel};
use crate::predictors::{Predictor, PredictorKind, PredictorOutput};
use crate::retrieval::topics::Topic;
use crate::retrieval::{rank, Query, Ranking, RankingModel};

/// Where the realized ranking for a query comes from.
#[derive(Debug, Clone)]
pub enum Pipeline {
    /// Rank with a model, optionally expanding the query from a first pass.
    Model {
        model: RankingModel,
        expander: Option<Expander>,
    },
    /// Precomputed rankings keyed by query id, e.g. from a TREC run file.
    Run {
        name: String,
        rankings: BTreeMap<String, Ranking>,
    },
}

impl Pipeline {
    pub fn name(&self) -> String {
        match self {
            Pipeline::Model { model, expander: None } => model.name().to_string(),
            Pipeline::Model {
                model,
                expander: Some(e),
            } => format!("{}+{}", model.name(), e.name()),
            Pipeline::Run { name, .. } => format!("run:{name}"),
        }
    }

    fn realize(
        &self,
        index: &CollectionIndex,
        topic: &Topic,
        query: &Query,
        config: &ExperimentConfig,
    ) -> Result<Ranking> {
        match self {
            Pipeline::Model { model, expander: None } => rank(index, &topic.query_id, query, *model, config.k),
            Pipeline::Model {
                model,
                expander: Some(e),
            } => Ok(rank_with_feedback(index, &topic.query_id, query, *model, *e, &config.expansion, config.k)?.0),
            Pipeline::Run { rankings, .. } => rankings
                .get(&topic.query_id)
                .map(|r| r.clone().truncated(config.k))
                .ok_or_else(|| Error::InvalidArgument(format!("run has no ranking for query {:?}", topic.query_id))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Ranking depth.
    pub k: usize,
    pub exposure_model: ExposureModel,
    pub expansion: ExpansionConfig,
    /// Significance level applied to Bonferroni-adjusted p-values.
    pub alpha: f64,
    /// Bonferroni m; defaults to the number of baselines compared.
    pub comparisons: Option<usize>,
    pub deviation: Deviation,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 100,
            exposure_model: ExposureModel::Dcg,
            expansion: ExpansionConfig::default(),
            alpha: 0.01,
            comparisons: None,
            deviation: Deviation::Population,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.comparisons == Some(0) {
            return Err(Error::InvalidArgument("comparisons must be at least 1".into()));
        }
        self.expansion.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsdRow {
    pub pipeline: String,
    pub query_id: String,
    pub category: String,
    pub predictor: String,
    pub jsd: f64,
}

/// CV of the realized exposure of one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub pipeline: String,
    pub query_id: String,
    pub category: String,
    pub cv: f64,
}

/// A query that produced no rows. `category` and `predictor` narrow down how
/// many rows were lost; `None` means all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub pipeline: String,
    pub query_id: String,
    pub category: Option<String>,
    pub predictor: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorMean {
    pub predictor: String,
    pub mean_jsd: f64,
    pub queries: usize,
}

/// GEP against one baseline over the queries both scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: String,
    pub queries: usize,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub p_adjusted: Option<f64>,
    pub significant: bool,
    /// Why no test was run, if none was.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySummary {
    pub pipeline: String,
    pub category: String,
    pub means: Vec<PredictorMean>,
    pub comparisons: Vec<Comparison>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub rows: Vec<JsdRow>,
    pub cv: Vec<CvRow>,
    pub summaries: Vec<CategorySummary>,
    pub failures: Vec<Failure>,
}

impl PredictionReport {
    pub fn mean_jsd(&self, pipeline: &str, category: &str, predictor: &str) -> Option<f64> {
        self.summaries
            .iter()
            .find(|s| s.pipeline == pipeline && s.category == category)?
            .means
            .iter()
            .find(|m| m.predictor == predictor)
            .map(|m| m.mean_jsd)
    }
}

type Predictions = Vec<Vec<Result<PredictorOutput>>>;

struct QueryResult {
    rows: Vec<JsdRow>,
    cv: Vec<CvRow>,
    failures: Vec<Failure>,
}

fn failure(pipeline: &str, qid: &str, category: Option<&str>, predictor: Option<&str>, e: &Error) -> Failure {
    Failure {
        pipeline: pipeline.to_string(),
        query_id: qid.to_string(),
        category: category.map(str::to_string),
        predictor: predictor.map(str::to_string),
        message: e.to_string(),
    }
}

#[allow(clippy::too_many_arguments)]
fn evaluate_query(
    index: &CollectionIndex,
    topic: &Topic,
    query: &Query,
    predictions: &Predictions,
    categories: &[String],
    predictors: &[Box<dyn Predictor>],
    pipeline: &Pipeline,
    config: &ExperimentConfig,
) -> QueryResult {
    let name = pipeline.name();
    let qid = topic.query_id.as_str();
    let mut out = QueryResult {
        rows: Vec::new(),
        cv: Vec::new(),
        failures: Vec::new(),
    };
    let ranking = match pipeline.realize(index, topic, query, config) {
        Ok(r) if r.is_empty() => {
            out.failures.push(failure(
                &name,
                qid,
                None,
                None,
                &Error::InvalidArgument("empty ranking".into()),
            ));
            return out;
        }
        Ok(r) => r,
        Err(e) => {
            out.failures.push(failure(&name, qid, None, None, &e));
            return out;
        }
    };
    for (c, category) in categories.iter().enumerate() {
        let realized: Result<ExposureDistribution> =
            group_exposure(&ranking, index, category, config.exposure_model).and_then(|raw| normalize_exposure(&raw));
        let realized = match realized {
            Ok(r) => r,
            Err(e) => {
                out.failures.push(failure(&name, qid, Some(category), None, &e));
                continue;
            }
        };
        match coefficient_of_variation(&realized.values, config.deviation) {
            Ok(cv) => out.cv.push(CvRow {
                pipeline: name.clone(),
                query_id: qid.to_string(),
                category: category.clone(),
                cv,
            }),
            Err(e) => out.failures.push(failure(&name, qid, Some(category), Some("cv"), &e)),
        }
        for (p, predictor) in predictors.iter().enumerate() {
            let scored = predictions[c][p]
                .as_ref()
                .map_err(|e| Error::InvalidArgument(e.to_string()))
                .and_then(|pred| jsd(&pred.distribution, &realized));
            match scored {
                Ok(value) => out.rows.push(JsdRow {
                    pipeline: name.clone(),
                    query_id: qid.to_string(),
                    category: category.clone(),
                    predictor: predictor.name().to_string(),
                    jsd: value,
                }),
                Err(e) => out
                    .failures
                    .push(failure(&name, qid, Some(category), Some(predictor.name()), &e)),
            }
        }
    }
    out
}

// predictor -> query -> jsd
type ByPredictor<'a> = BTreeMap<&'a str, BTreeMap<&'a str, f64>>;

fn summarize(rows: &[JsdRow], config: &ExperimentConfig) -> Result<Vec<CategorySummary>> {
    let mut grouped: BTreeMap<(&str, &str), ByPredictor> = BTreeMap::new();
    for r in rows {
        grouped
            .entry((&r.pipeline, &r.category))
            .or_default()
            .entry(&r.predictor)
            .or_default()
            .insert(&r.query_id, r.jsd);
    }
    let gep = PredictorKind::Gep.name();
    let mut out = Vec::new();
    for ((pipeline, category), by_predictor) in grouped {
        let means = by_predictor
            .iter()
            .map(|(p, per_query)| PredictorMean {
                predictor: p.to_string(),
                mean_jsd: per_query.values().sum::<f64>() / per_query.len() as f64,
                queries: per_query.len(),
            })
            .collect();
        let baselines: Vec<&str> = PredictorKind::BASELINES
            .iter()
            .map(|k| k.name())
            .filter(|b| by_predictor.contains_key(b))
            .collect();
        let mut comparisons = Vec::new();
        if let Some(gep_scores) = by_predictor.get(gep) {
            let m = config.comparisons.unwrap_or(baselines.len().max(1));
            for b in baselines {
                let base = &by_predictor[b];
                let shared: BTreeSet<&&str> = gep_scores.keys().filter(|q| base.contains_key(**q)).collect();
                let a: Vec<f64> = shared.iter().map(|q| gep_scores[**q]).collect();
                let bv: Vec<f64> = shared.iter().map(|q| base[**q]).collect();
                let cmp = match paired_t_test(&a, &bv) {
                    Ok(t) => {
                        let adj = bonferroni(&[t.p], m)?[0];
                        Comparison {
                            baseline: b.to_string(),
                            queries: shared.len(),
                            t: Some(t.t),
                            p: Some(t.p),
                            p_adjusted: Some(adj),
                            significant: adj < config.alpha,
                            note: None,
                        }
                    }
                    Err(e) => Comparison {
                        baseline: b.to_string(),
                        queries: shared.len(),
                        t: None,
                        p: None,
                        p_adjusted: None,
                        significant: false,
                        note: Some(e.to_string()),
                    },
                };
                comparisons.push(cmp);
            }
        }
        out.push(CategorySummary {
            pipeline: pipeline.to_string(),
            category: category.to_string(),
            means,
            comparisons,
        });
    }
    Ok(out)
}

/// Runs every pipeline over every topic, scores every predictor's
/// distribution against the realized exposure per category, and aggregates.
///
/// Predictors are computed once per (query, category) from the original
/// query, whatever the pipeline does to it. Per-query failures are recorded
/// in the report, not returned as errors.
pub fn run_experiment(
    index: &CollectionIndex,
    topics: &[Topic],
    categories: &[String],
    pipelines: &[Pipeline],
    predictors: &[Box<dyn Predictor>],
    config: &ExperimentConfig,
) -> Result<PredictionReport> {
    config.validate()?;
    for c in categories {
        index.category(c)?;
    }
    let results: Vec<Vec<QueryResult>> = topics
        .par_iter()
        .map(|topic| {
            let query = Query::parse(&topic.text);
            let predictions: Predictions = categories
                .iter()
                .map(|c| predictors.iter().map(|p| p.predict(index, &query, c)).collect())
                .collect();
            pipelines
                .iter()
                .map(|pl| evaluate_query(index, topic, &query, &predictions, categories, predictors, pl, config))
                .collect()
        })
        .collect();

    let mut report = PredictionReport::default();
    for r in results.into_iter().flatten() {
        report.rows.extend(r.rows);
        report.cv.extend(r.cv);
        report.failures.extend(r.failures);
    }
    report.rows.sort_by(|a, b| {
        (&a.pipeline, &a.query_id, &a.category, &a.predictor).cmp(&(
            &b.pipeline,
            &b.query_id,
            &b.category,
            &b.predictor,
        ))
    });
    report
        .cv
        .sort_by(|a, b| (&a.pipeline, &a.query_id, &a.category).cmp(&(&b.pipeline, &b.query_id, &b.category)));
    report.failures.sort_by(|a, b| {
        (&a.pipeline, &a.query_id, &a.category, &a.predictor).cmp(&(
            &b.pipeline,
            &b.query_id,
            &b.category,
            &b.predictor,
        ))
    });
    report.summaries = summarize(&report.rows, config)?;
    Ok(report)
}
