//! Pre-retrieval predictors of how exposure will split across the groups of a
//! category.
//!
//! Every predictor produces one raw score per group from index statistics and
//! the query alone. Raw scores are floored at zero and divided by their sum;
//! an all-zero result becomes the uniform distribution flagged degenerate.

mod baselines;
mod gep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{CategoryIndex, CollectionIndex};
use crate::error::{Error, Result};
use crate::exposure::{normalize_values, ExposureDistribution};
use crate::retrieval::Query;

pub use baselines::{
    avpmi_pair_score, cori_belief, predict_avictf, predict_avidf, predict_avpmi, predict_cori, predict_scs,
    predict_uniform, SMOOTHED_ZERO,
};
pub use gep::{gep_group_term_score, gep_query_vector, gep_score_vectors, predict_gep, GroupScoreVector};

/// Which collection-level idf weights the GEP query vector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryIdf {
    /// `log2((N − df + 0.5) / (df + 0.5))`, the same form as the group idf.
    #[default]
    Bm25Style,
    /// `log2(N / df)`.
    Classic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorConfig {
    /// Depth of the ranking being predicted; GEP averages this many top
    /// tf-idf scores per group and term.
    pub k: usize,
    /// Floor GEP idf values at zero. Disable for the raw (possibly negative)
    /// form.
    pub idf_floor: bool,
    pub query_idf: QueryIdf,
    /// CORI default belief.
    pub cori_b: f64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self {
            k: 100,
            idf_floor: true,
            query_idf: QueryIdf::Bm25Style,
            cori_b: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictorKind {
    Gep,
    Scs,
    AvIdf,
    AvIctf,
    AvPmi,
    Cori,
    Uniform,
}

impl PredictorKind {
    pub const BASELINES: [PredictorKind; 5] = [
        PredictorKind::Scs,
        PredictorKind::AvIdf,
        PredictorKind::AvIctf,
        PredictorKind::AvPmi,
        PredictorKind::Cori,
    ];

    pub const ALL: [PredictorKind; 7] = [
        PredictorKind::Gep,
        PredictorKind::Scs,
        PredictorKind::AvIdf,
        PredictorKind::AvIctf,
        PredictorKind::AvPmi,
        PredictorKind::Cori,
        PredictorKind::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictorKind::Gep => "gep",
            PredictorKind::Scs => "scs",
            PredictorKind::AvIdf => "avidf",
            PredictorKind::AvIctf => "avictf",
            PredictorKind::AvPmi => "avpmi",
            PredictorKind::Cori => "cori",
            PredictorKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PredictorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown predictor {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorOutput {
    pub predictor: String,
    pub category: String,
    /// Per-group scores before flooring and normalization.
    pub raw: Vec<f64>,
    pub distribution: ExposureDistribution,
}

impl PredictorOutput {
    pub(crate) fn from_raw(predictor: &str, cat: &CategoryIndex, raw: Vec<f64>) -> Result<Self> {
        if let Some(v) = raw.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{predictor} produced a non-finite group score {v}"
            )));
        }
        let floored: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
        let (values, degenerate) = normalize_values(&floored)?;
        Ok(Self {
            predictor: predictor.to_string(),
            category: cat.name().to_string(),
            raw,
            distribution: ExposureDistribution {
                category: cat.name().to_string(),
                groups: cat.groups().to_vec(),
                values,
                degenerate,
            },
        })
    }
}

/// A pre-retrieval exposure predictor: sees the index and the query, never a
/// ranking.
pub trait Predictor: Send + Sync {
    fn name(&self) -> &str;
    fn predict(&self, index: &CollectionIndex, query: &Query, category: &str) -> Result<PredictorOutput>;
}

/// One of the shipped predictors with its configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Builtin {
    pub kind: PredictorKind,
    pub config: PredictorConfig,
}

impl Builtin {
    pub fn new(kind: PredictorKind, config: PredictorConfig) -> Self {
        Self { kind, config }
    }
}

impl Predictor for Builtin {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn predict(&self, index: &CollectionIndex, query: &Query, category: &str) -> Result<PredictorOutput> {
        match self.kind {
            PredictorKind::Gep => predict_gep(index, query, category, &self.config),
            PredictorKind::Scs => predict_scs(index, query, category),
            PredictorKind::AvIdf => predict_avidf(index, query, category),
            PredictorKind::AvIctf => predict_avictf(index, query, category),
            PredictorKind::AvPmi => predict_avpmi(index, query, category),
            PredictorKind::Cori => predict_cori(index, query, category, self.config.cori_b),
            PredictorKind::Uniform => predict_uniform(index, query, category),
        }
    }
}
