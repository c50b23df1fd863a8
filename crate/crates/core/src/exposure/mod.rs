//! Position-bias exposure and how it accumulates over groups of documents.
//!
//! A document at rank `p` receives `1 / log2(p + 1)`, the DCG discount. A
//! group's exposure is the sum over the positions its documents occupy.

pub mod combinatorics;

use serde::{Deserialize, Serialize};

use crate::corpus::CollectionIndex;
use crate::error::{Error, Result};
use crate::retrieval::Ranking;

pub use combinatorics::{
    achievable_exposure, binomial, log_orderings, write_histogram_csv, ExposureHistogram, HistogramBin,
    HistogramConfig, HistogramMode, Orderings,
};

/// Tolerance for "sums to one" checks on distributions.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExposureModel {
    /// `1 / log2(p + 1)`.
    #[default]
    Dcg,
    /// `1 / (log2(p) + 1)`, kept for sensitivity checks.
    DcgTypeset,
}

impl ExposureModel {
    pub fn weight(self, position: usize) -> Result<f64> {
        if position < 1 {
            return Err(Error::InvalidPosition(position));
        }
        let p = position as f64;
        Ok(match self {
            ExposureModel::Dcg => 1.0 / (p + 1.0).log2(),
            ExposureModel::DcgTypeset => 1.0 / (p.log2() + 1.0),
        })
    }

    /// Exposure of positions `1..=k`.
    pub fn curve(self, k: usize) -> Vec<f64> {
        (1..=k).map(|p| self.weight(p).expect("positions start at 1")).collect()
    }
}

/// Exposure of a single rank position under the DCG discount.
pub fn position_exposure(position: usize) -> Result<f64> {
    ExposureModel::Dcg.weight(position)
}

/// Unnormalized per-group exposure, aligned to the category's group order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawExposure {
    pub category: String,
    pub groups: Vec<String>,
    pub values: Vec<f64>,
}

/// Sums position exposure per group over a realized ranking.
pub fn group_exposure(
    ranking: &Ranking,
    index: &CollectionIndex,
    category: &str,
    model: ExposureModel,
) -> Result<RawExposure> {
    let cat = index.category(category)?;
    let mut values = vec![0.0; cat.num_groups()];
    for (i, doc_id) in ranking.doc_ids().enumerate() {
        let doc = index
            .doc_number(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))?;
        values[cat.group_of(doc)] += model.weight(i + 1)?;
    }
    Ok(RawExposure {
        category: cat.name().to_string(),
        groups: cat.groups().to_vec(),
        values,
    })
}

/// Nonnegative per-group weights summing to one. `degenerate` marks the
/// uniform fallback used when every raw value was zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureDistribution {
    pub category: String,
    pub groups: Vec<String>,
    pub values: Vec<f64>,
    pub degenerate: bool,
}

impl ExposureDistribution {
    /// Wraps already-normalized values, checking the simplex constraints.
    pub fn new(category: impl Into<String>, groups: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if groups.len() != values.len() {
            return Err(Error::DimensionMismatch {
                left: groups.len(),
                right: values.len(),
            });
        }
        check_simplex(&values)?;
        Ok(Self {
            category: category.into(),
            groups,
            values,
            degenerate: false,
        })
    }

    pub fn uniform(category: impl Into<String>, groups: Vec<String>) -> Self {
        let n = groups.len();
        Self {
            category: category.into(),
            groups,
            values: vec![1.0 / n as f64; n],
            degenerate: true,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn check_simplex(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidDistribution("no components".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidDistribution(format!("component {v} outside [0, 1]")));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("components sum to {sum}")));
    }
    Ok(())
}

/// Divides by the total. All-zero input becomes the uniform distribution with
/// the degenerate flag set.
pub fn normalize_values(raw: &[f64]) -> Result<(Vec<f64>, bool)> {
    if raw.is_empty() {
        return Err(Error::InvalidDistribution("no components".into()));
    }
    if let Some(&v) = raw.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::NegativeExposure(v));
    }
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let n = raw.len() as f64;
        return Ok((vec![1.0 / n; raw.len()], true));
    }
    Ok((raw.iter().map(|v| v / total).collect(), false))
}

pub fn normalize_exposure(raw: &RawExposure) -> Result<ExposureDistribution> {
    let (values, degenerate) = normalize_values(&raw.values)?;
    Ok(ExposureDistribution {
        category: raw.category.clone(),
        groups: raw.groups.clone(),
        values,
        degenerate,
    })
}
