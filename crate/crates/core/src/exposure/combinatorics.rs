//! How much exposure a group can achieve with `m` documents in a ranking of
//! size `k`, and how many position subsets achieve each amount.
//!
//! Counts are over distinct position subsets, `C(k, m)` in total. Full
//! orderings multiply every count by the same `m! (k - m)!` factor.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ExposureModel;
use crate::error::{Error, Result};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum HistogramMode {
    /// Enumerate every subset; refuses when `C(k, m)` exceeds `budget`.
    Exact { budget: u64 },
    /// Draw `samples` uniform subsets.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramConfig {
    pub mode: HistogramMode,
    pub bins: usize,
    /// Report exact distinct values instead of bins when there are at most
    /// this many (exact mode only).
    pub max_distinct: usize,
    pub model: ExposureModel,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        Self {
            mode: HistogramMode::Exact { budget: 10_000_000 },
            bins: 200,
            max_distinct: 10_000,
            model: ExposureModel::Dcg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    /// Subsets (exact mode) or samples (sampled mode) in the bin.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureHistogram {
    pub k: usize,
    pub m: usize,
    /// `C(k, m)` as a float; exact for every size exact mode accepts.
    pub subsets: f64,
    /// Number of draws in sampled mode.
    pub sample_size: Option<u64>,
    /// Exposure of the `m` lowest positions.
    pub min_achievable: f64,
    /// Exposure of the top `m` positions.
    pub max_achievable: f64,
    /// Mean exposure over enumerated subsets or drawn samples.
    pub mean_exposure: f64,
    /// True when each bin holds a single distinct value (`low == high`).
    pub distinct_values: bool,
    pub bins: Vec<HistogramBin>,
}

impl ExposureHistogram {
    /// Count of subsets in the bin; scaled from sample frequencies in sampled
    /// mode.
    pub fn estimated_count(&self, bin: &HistogramBin) -> f64 {
        match self.sample_size {
            Some(n) => bin.count as f64 / n as f64 * self.subsets,
            None => bin.count as f64,
        }
    }

    pub fn total_count(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// `C(n, r)` when it fits in a `u128`.
pub fn binomial(n: usize, r: usize) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn binomial_f64(n: usize, r: usize) -> f64 {
    match binomial(n, r) {
        Some(c) => c as f64,
        None => (ln_gamma(n as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((n - r) as f64 + 1.0)).exp(),
    }
}

struct Binner {
    low: f64,
    width: f64,
    counts: Vec<u64>,
}

impl Binner {
    fn new(low: f64, high: f64, bins: usize) -> Self {
        let bins = if high > low { bins.max(1) } else { 1 };
        Self {
            low,
            width: (high - low) / bins as f64,
            counts: vec![0; bins],
        }
    }

    fn add(&mut self, v: f64) {
        let last = self.counts.len() - 1;
        let i = if self.width > 0.0 {
            (((v - self.low) / self.width).floor().max(0.0) as usize).min(last)
        } else {
            0
        };
        self.counts[i] += 1;
    }

    fn into_bins(self, high: f64) -> Vec<HistogramBin> {
        let n = self.counts.len();
        self.counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| HistogramBin {
                low: self.low + i as f64 * self.width,
                high: if i + 1 == n {
                    high
                } else {
                    self.low + (i + 1) as f64 * self.width
                },
                count,
            })
            .collect()
    }
}

/// Quantizes exposure sums so that subsets with mathematically equal totals
/// share a key despite summation rounding.
fn value_key(v: f64) -> i64 {
    (v * 1e9).round() as i64
}

// `Iterator::sum` of nothing is -0.0, which prints as "-0".
fn total(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |a, b| a + b)
}

pub fn achievable_exposure(k: usize, m: usize, config: &HistogramConfig) -> Result<ExposureHistogram> {
    if m > k {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds k = {k}")));
    }
    if config.bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    let curve = config.model.curve(k);
    let max_achievable = total(curve[..m].iter().copied());
    let min_achievable = total(curve[k - m..].iter().copied());
    let subsets = binomial_f64(k, m);

    match config.mode {
        HistogramMode::Exact { budget } => {
            let exact = binomial(k, m)
                .filter(|&c| c <= budget as u128)
                .ok_or_else(|| Error::BudgetExceeded {
                    k,
                    m,
                    subsets: binomial(k, m).map_or_else(|| format!("{subsets:.3e}"), |c| c.to_string()),
                    budget,
                })?;
            let mut binner = Binner::new(min_achievable, max_achievable, config.bins);
            let mut distinct: Option<HashMap<i64, (f64, u64)>> = Some(HashMap::new());
            let mut sum = 0.0;
            for_each_subset(k, m, |positions| {
                let v = total(positions.iter().map(|&p| curve[p]));
                sum += v;
                binner.add(v);
                if let Some(map) = distinct.as_mut() {
                    map.entry(value_key(v)).or_insert((v, 0)).1 += 1;
                    if map.len() > config.max_distinct {
                        distinct = None;
                    }
                }
            });
            let bins = match distinct {
                Some(map) => {
                    let mut values: Vec<(f64, u64)> = map.into_values().collect();
                    values.sort_by(|a, b| a.0.total_cmp(&b.0));
                    values
                        .into_iter()
                        .map(|(v, count)| HistogramBin { low: v, high: v, count })
                        .collect()
                }
                None => binner.into_bins(max_achievable),
            };
            let distinct_values = bins.iter().all(|b| b.low == b.high);
            Ok(ExposureHistogram {
                k,
                m,
                subsets: exact as f64,
                sample_size: None,
                min_achievable,
                max_achievable,
                mean_exposure: sum / exact as f64,
                distinct_values,
                bins,
            })
        }
        HistogramMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("sample count must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut binner = Binner::new(min_achievable, max_achievable, config.bins);
            let mut sum = 0.0;
            for _ in 0..samples {
                let v = total(sample(&mut rng, k, m).iter().map(|p| curve[p]));
                sum += v;
                binner.add(v);
            }
            Ok(ExposureHistogram {
                k,
                m,
                subsets,
                sample_size: Some(samples),
                min_achievable,
                max_achievable,
                mean_exposure: sum / samples as f64,
                distinct_values: false,
                bins: binner.into_bins(max_achievable),
            })
        }
    }
}

/// Visits every m-subset of `0..k` (zero-based positions) in lexicographic
/// order.
fn for_each_subset(k: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        visit(&idx);
        // Rightmost index that can still advance.
        let Some(i) = (0..m).rev().find(|&i| idx[i] < k - m + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of orderings of `k` documents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orderings {
    pub k: usize,
    /// `log10(k!)`.
    pub log10: f64,
    /// `k!` when it fits in a `u64` (k ≤ 20).
    pub exact: Option<u64>,
}

pub fn log_orderings(k: usize) -> Orderings {
    let exact = (1..=k as u64).try_fold(1u64, |acc, i| acc.checked_mul(i));
    Orderings {
        k,
        log10: ln_gamma(k as f64 + 1.0) / std::f64::consts::LN_10,
        exact,
    }
}

/// CSV with columns `k,m,bin_low,bin_high,count`. Sampled histograms report
/// estimated subset counts.
pub fn write_histogram_csv<'a, W: Write>(
    histograms: impl IntoIterator<Item = &'a ExposureHistogram>,
    mut w: W,
) -> Result<()> {
    writeln!(w, "k,m,bin_low,bin_high,count")?;
    for h in histograms {
        for b in &h.bins {
            match h.sample_size {
                None => writeln!(w, "{},{},{},{},{}", h.k, h.m, b.low, b.high, b.count)?,
                Some(_) => writeln!(w, "{},{},{},{},{}", h.k, h.m, b.low, b.high, h.estimated_count(b))?,
            }
        }
    }
    w.flush()?;
    Ok(())
}
