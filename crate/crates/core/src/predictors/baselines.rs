//! Classic pre-retrieval predictors and CORI, each computed per group using
//! group-restricted statistics.
//!
//! Zero document or collection frequencies inside a logarithm are replaced by
//! [`SMOOTHED_ZERO`]. A group without documents scores zero.

use super::PredictorOutput;
use crate::corpus::{CategoryIndex, CollectionIndex, Posting};
use crate::error::{Error, Result};
use crate::retrieval::Query;

/// Stand-in for a zero count inside a logarithm.
pub const SMOOTHED_ZERO: f64 = 0.5;

fn smoothed(count: f64) -> f64 {
    if count == 0.0 {
        SMOOTHED_ZERO
    } else {
        count
    }
}

struct Prepared<'a> {
    cat: &'a CategoryIndex,
    /// Distinct terms with their query frequency and index id.
    terms: Vec<(Option<u32>, f64)>,
    query_len: f64,
}

fn prepare<'a>(index: &'a CollectionIndex, query: &Query, category: &str) -> Result<Prepared<'a>> {
    if query.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let cat = index.category(category)?;
    let terms: Vec<(Option<u32>, f64)> = query
        .term_frequencies()
        .into_iter()
        .map(|(t, qtf)| (index.term_id(&t), qtf))
        .collect();
    let query_len = terms.iter().map(|(_, q)| q).sum();
    Ok(Prepared { cat, terms, query_len })
}

impl Prepared<'_> {
    fn group_df(&self, term: Option<u32>, g: usize) -> f64 {
        term.map_or(0.0, |id| self.cat.df(id, g) as f64)
    }

    fn group_cf(&self, term: Option<u32>, g: usize) -> f64 {
        term.map_or(0.0, |id| self.cat.cf(id, g) as f64)
    }

    fn avidf(&self, g: usize) -> f64 {
        let n = self.cat.group_num_docs(g) as f64;
        if n == 0.0 || self.query_len == 0.0 {
            return 0.0;
        }
        let total: f64 = self
            .terms
            .iter()
            .map(|&(t, qtf)| qtf * (n / smoothed(self.group_df(t, g))).log2())
            .sum();
        total / self.query_len
    }

    fn avictf(&self, g: usize) -> f64 {
        let tokens = self.cat.group_tokens(g) as f64;
        if tokens == 0.0 || self.query_len == 0.0 {
            return 0.0;
        }
        let total: f64 = self
            .terms
            .iter()
            .map(|&(t, qtf)| qtf * (tokens / smoothed(self.group_cf(t, g))).log2())
            .sum();
        total / self.query_len
    }

    fn scs(&self, g: usize) -> f64 {
        let tokens = self.cat.group_tokens(g) as f64;
        if tokens == 0.0 || self.query_len == 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .filter(|(_, qtf)| *qtf > 0.0)
            .map(|&(t, qtf)| {
                let p_q = qtf / self.query_len;
                let p_c = smoothed(self.group_cf(t, g)) / tokens;
                p_q * (p_q / p_c).log2()
            })
            .sum()
    }
}

fn per_group<'a>(p: &Prepared<'a>, name: &str, f: impl Fn(&Prepared<'a>, usize) -> f64) -> Result<PredictorOutput> {
    let raw = (0..p.cat.num_groups()).map(|g| f(p, g)).collect();
    PredictorOutput::from_raw(name, p.cat, raw)
}

/// Mean over query terms of `log2(N_g / df_g)`.
pub fn predict_avidf(index: &CollectionIndex, query: &Query, category: &str) -> Result<PredictorOutput> {
    per_group(&prepare(index, query, category)?, "avidf", Prepared::avidf)
}

/// Mean over query terms of `log2(tokens_g / cf_g)`.
pub fn predict_avictf(index: &CollectionIndex, query: &Query, category: &str) -> Result<PredictorOutput> {
    per_group(&prepare(index, query, category)?, "avictf", Prepared::avictf)
}

/// KL divergence of the query language model from the group language model.
pub fn predict_scs(index: &CollectionIndex, query: &Query, category: &str) -> Result<PredictorOutput> {
    per_group(&prepare(index, query, category)?, "scs", Prepared::scs)
}

/// `log2(P(a, b) / (P(a) P(b)))` from document counts with add-half
/// smoothing: `P(x) = (count + 0.5) / (docs + 1)`.
pub fn avpmi_pair_score(joint_df: f64, df_a: f64, df_b: f64, docs: f64) -> f64 {
    let p = |c: f64| (c + 0.5) / (docs + 1.0);
    (p(joint_df) / (p(df_a) * p(df_b))).log2()
}

fn joint_counts(index: &CollectionIndex, cat: &CategoryIndex, a: u32, b: u32) -> Vec<u32> {
    let mut counts = vec![0u32; cat.num_groups()];
    let (pa, pb): (&[Posting], &[Posting]) = (index.postings(a), index.postings(b));
    let (mut i, mut j) = (0, 0);
    while i < pa.len() && j < pb.len() {
        match pa[i].doc.cmp(&pb[j].doc) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                counts[cat.group_of(pa[i].doc)] += 1;
                i += 1;
                j += 1;
            }
        }
    }
    counts
}

/// Mean pointwise mutual information over distinct query-term pairs; a query
/// with a single distinct term falls back to AvIDF.
pub fn predict_avpmi(index: &CollectionIndex, query: &Query, category: &str) -> Result<PredictorOutput> {
    let p = prepare(index, query, category)?;
    if p.terms.len() < 2 {
        return per_group(&p, "avpmi", Prepared::avidf);
    }
    let ng = p.cat.num_groups();
    let mut totals = vec![0.0; ng];
    let mut pairs = 0usize;
    for i in 0..p.terms.len() {
        for j in i + 1..p.terms.len() {
            let (ta, tb) = (p.terms[i].0, p.terms[j].0);
            let joint = match (ta, tb) {
                (Some(a), Some(b)) => joint_counts(index, p.cat, a, b),
                _ => vec![0; ng],
            };
            for g in 0..ng {
                let docs = p.cat.group_num_docs(g) as f64;
                if docs > 0.0 {
                    totals[g] += avpmi_pair_score(joint[g] as f64, p.group_df(ta, g), p.group_df(tb, g), docs);
                }
            }
            pairs += 1;
        }
    }
    let raw = totals.into_iter().map(|t| t / pairs as f64).collect();
    PredictorOutput::from_raw("avpmi", p.cat, raw)
}

/// CORI belief of one term for one group treated as a collection.
pub fn cori_belief(
    df: f64,
    group_tokens: f64,
    avg_group_tokens: f64,
    groups: f64,
    groups_with_term: f64,
    b: f64,
) -> f64 {
    let t = df / (df + 50.0 + 150.0 * group_tokens / avg_group_tokens);
    let i = ((groups + 0.5) / groups_with_term).ln() / (groups + 1.0).ln();
    b + (1.0 - b) * t * i
}

/// Mean CORI belief over query terms. Terms found in no group are skipped;
/// if all are skipped the prediction is degenerate. Empty groups score zero.
pub fn predict_cori(index: &CollectionIndex, query: &Query, category: &str, b: f64) -> Result<PredictorOutput> {
    let p = prepare(index, query, category)?;
    let cat = p.cat;
    let ng = cat.num_groups();
    let avg_tokens = (0..ng).map(|g| cat.group_tokens(g) as f64).sum::<f64>() / ng as f64;
    let mut totals = vec![0.0; ng];
    let mut weight = 0.0;
    for &(term, qtf) in &p.terms {
        let Some(id) = term else { continue };
        let gf = cat.groups_containing(id);
        if gf == 0 || qtf == 0.0 {
            continue;
        }
        for (g, total) in totals.iter_mut().enumerate() {
            if cat.group_num_docs(g) == 0 {
                continue;
            }
            let belief = cori_belief(
                cat.df(id, g) as f64,
                cat.group_tokens(g) as f64,
                avg_tokens,
                ng as f64,
                gf as f64,
                b,
            );
            *total += qtf * belief;
        }
        weight += qtf;
    }
    let raw = if weight == 0.0 {
        vec![0.0; ng]
    } else {
        totals.into_iter().map(|t| t / weight).collect()
    };
    PredictorOutput::from_raw("cori", cat, raw)
}

/// Equal mass on every group; a reference point, not a real predictor.
pub fn predict_uniform(index: &CollectionIndex, query: &Query, category: &str) -> Result<PredictorOutput> {
    if query.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let cat = index.category(category)?;
    PredictorOutput::from_raw("uniform", cat, vec![1.0; cat.num_groups()])
}
