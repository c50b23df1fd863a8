//! Straight-from-the-formula reference implementations. Everything here works
//! on token lists rebuilt from the raw documents, with no index involved.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qep_core::text::tokenize;
use qep_core::{Category, Document};

pub struct OracleCorpus {
    pub ids: Vec<String>,
    pub tokens: Vec<Vec<String>>,
    pub labels: Vec<BTreeMap<String, String>>,
    pub categories: Vec<Category>,
}

impl OracleCorpus {
    pub fn new(docs: &[Document], categories: &[Category]) -> Self {
        Self {
            ids: docs.iter().map(|d| d.doc_id.clone()).collect(),
            tokens: docs.iter().map(|d| tokenize(&d.text)).collect(),
            labels: docs.iter().map(|d| d.labels.clone()).collect(),
            categories: categories.to_vec(),
        }
    }

    fn category(&self, name: &str) -> &Category {
        self.categories.iter().find(|c| c.name == name).expect("category")
    }

    /// Documents (as indices) in each group of the category, in group order.
    pub fn group_docs(&self, category: &str) -> Vec<Vec<usize>> {
        let cat = self.category(category);
        cat.groups
            .iter()
            .map(|g| {
                (0..self.ids.len())
                    .filter(|&d| self.labels[d].get(category) == Some(g))
                    .collect()
            })
            .collect()
    }

    pub fn tf(&self, term: &str, d: usize) -> f64 {
        self.tokens[d].iter().filter(|t| *t == term).count() as f64
    }

    fn df_in(&self, term: &str, docs: &[usize]) -> f64 {
        docs.iter().filter(|&&d| self.tf(term, d) > 0.0).count() as f64
    }

    fn cf_in(&self, term: &str, docs: &[usize]) -> f64 {
        docs.iter().map(|&d| self.tf(term, d)).sum()
    }

    fn tokens_in(&self, docs: &[usize]) -> f64 {
        docs.iter().map(|&d| self.tokens[d].len() as f64).sum()
    }

    fn all_docs(&self) -> Vec<usize> {
        (0..self.ids.len()).collect()
    }
}

/// Distinct query terms with summed counts, in first-occurrence order.
pub fn query_counts(query: &[String]) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for t in query {
        match out.iter_mut().find(|(x, _)| x == t) {
            Some(e) => e.1 += 1.0,
            None => out.push((t.clone(), 1.0)),
        }
    }
    out
}

fn smooth(x: f64) -> f64 {
    if x == 0.0 {
        0.5
    } else {
        x
    }
}

pub fn gep(c: &OracleCorpus, query: &[String], category: &str, k: usize) -> Vec<f64> {
    let all = c.all_docs();
    let n = all.len() as f64;
    let groups = c.group_docs(category);
    let q = query_counts(query);
    groups
        .iter()
        .map(|docs| {
            let ng = docs.len() as f64;
            let mut sim = 0.0;
            for (term, qtf) in &q {
                let df = c.df_in(term, &all);
                let qidf = if df == 0.0 {
                    0.0
                } else {
                    ((n - df + 0.5) / (df + 0.5)).log2().max(0.0)
                };
                let df_g = c.df_in(term, docs);
                let idf_g = ((ng - df_g + 0.5) / (df_g + 0.5)).log2().max(0.0);
                let mut scores: Vec<f64> = docs.iter().map(|&d| c.tf(term, d) * idf_g).collect();
                while scores.len() < k {
                    scores.push(0.0);
                }
                scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let s = scores[..k].iter().sum::<f64>() / k as f64;
                sim += s * qtf * qidf;
            }
            sim
        })
        .collect()
}

pub fn avidf(c: &OracleCorpus, query: &[String], category: &str) -> Vec<f64> {
    let q = query_counts(query);
    let len: f64 = q.iter().map(|(_, n)| n).sum();
    c.group_docs(category)
        .iter()
        .map(|docs| {
            if docs.is_empty() {
                return 0.0;
            }
            let n = docs.len() as f64;
            q.iter()
                .map(|(t, qtf)| qtf * (n / smooth(c.df_in(t, docs))).log2())
                .sum::<f64>()
                / len
        })
        .collect()
}

pub fn avictf(c: &OracleCorpus, query: &[String], category: &str) -> Vec<f64> {
    let q = query_counts(query);
    let len: f64 = q.iter().map(|(_, n)| n).sum();
    c.group_docs(category)
        .iter()
        .map(|docs| {
            let tokens = c.tokens_in(docs);
            if tokens == 0.0 {
                return 0.0;
            }
            q.iter()
                .map(|(t, qtf)| qtf * (tokens / smooth(c.cf_in(t, docs))).log2())
                .sum::<f64>()
                / len
        })
        .collect()
}

pub fn scs(c: &OracleCorpus, query: &[String], category: &str) -> Vec<f64> {
    let q = query_counts(query);
    let len: f64 = q.iter().map(|(_, n)| n).sum();
    c.group_docs(category)
        .iter()
        .map(|docs| {
            let tokens = c.tokens_in(docs);
            if tokens == 0.0 {
                return 0.0;
            }
            q.iter()
                .map(|(t, qtf)| {
                    let pq = qtf / len;
                    pq * (pq / (smooth(c.cf_in(t, docs)) / tokens)).log2()
                })
                .sum()
        })
        .collect()
}

pub fn avpmi(c: &OracleCorpus, query: &[String], category: &str) -> Vec<f64> {
    let q = query_counts(query);
    if q.len() < 2 {
        return avidf(c, query, category);
    }
    c.group_docs(category)
        .iter()
        .map(|docs| {
            if docs.is_empty() {
                return 0.0;
            }
            let n = docs.len() as f64;
            let p = |count: f64| (count + 0.5) / (n + 1.0);
            let mut total = 0.0;
            let mut pairs = 0.0;
            for i in 0..q.len() {
                for j in i + 1..q.len() {
                    let (a, b) = (&q[i].0, &q[j].0);
                    let joint = docs.iter().filter(|&&d| c.tf(a, d) > 0.0 && c.tf(b, d) > 0.0).count() as f64;
                    total += (p(joint) / (p(c.df_in(a, docs)) * p(c.df_in(b, docs)))).log2();
                    pairs += 1.0;
                }
            }
            total / pairs
        })
        .collect()
}

pub fn cori(c: &OracleCorpus, query: &[String], category: &str, b: f64) -> Vec<f64> {
    let q = query_counts(query);
    let groups = c.group_docs(category);
    let ng = groups.len() as f64;
    let cw: Vec<f64> = groups.iter().map(|d| c.tokens_in(d)).collect();
    let avg_cw = cw.iter().sum::<f64>() / ng;
    let mut totals = vec![0.0; groups.len()];
    let mut weight = 0.0;
    for (t, qtf) in &q {
        let gf = groups.iter().filter(|d| c.df_in(t, d) > 0.0).count() as f64;
        if gf == 0.0 {
            continue;
        }
        for (g, docs) in groups.iter().enumerate() {
            if docs.is_empty() {
                continue;
            }
            let df = c.df_in(t, docs);
            let tt = df / (df + 50.0 + 150.0 * cw[g] / avg_cw);
            let ii = ((ng + 0.5) / gf).ln() / (ng + 1.0).ln();
            totals[g] += qtf * (b + (1.0 - b) * tt * ii);
        }
        weight += qtf;
    }
    if weight == 0.0 {
        return totals;
    }
    totals.iter().map(|t| t / weight).collect()
}

/// Floor at zero, divide by the sum; all-zero becomes uniform.
pub fn normalize(raw: &[f64]) -> Vec<f64> {
    let floored: Vec<f64> = raw.iter().map(|v| v.max(0.0)).collect();
    let sum: f64 = floored.iter().sum();
    if sum == 0.0 {
        return vec![1.0 / raw.len() as f64; raw.len()];
    }
    floored.iter().map(|v| v / sum).collect()
}

#[derive(Clone, Copy, Debug)]
pub enum OracleModel {
    Bm25 { k1: f64, b: f64 },
    TfIdf,
}

/// Scores every document, drops zeros, sorts by score then doc_id, cuts at k.
pub fn rank_all(c: &OracleCorpus, query: &[String], model: OracleModel, k: usize) -> Vec<(String, f64)> {
    let all = c.all_docs();
    let n = all.len() as f64;
    let avgdl = c.tokens_in(&all) / n;
    let mut scored: Vec<(String, f64)> = all
        .iter()
        .map(|&d| {
            let mut s = 0.0;
            for t in query {
                let tf = c.tf(t, d);
                if tf == 0.0 {
                    continue;
                }
                let df = c.df_in(t, &all);
                s += match model {
                    OracleModel::Bm25 { k1, b } => {
                        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).log2();
                        let dl = c.tokens[d].len() as f64;
                        idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / avgdl))
                    }
                    OracleModel::TfIdf => tf * (n / df).log2().max(0.0),
                };
            }
            (c.ids[d].clone(), s)
        })
        .filter(|(_, s)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}

/// Rankings agree up to float noise: same scores position by position, and
/// any position where ids differ sits inside a block of tied scores.
pub fn rankings_agree(got: &[(String, f64)], want: &[(String, f64)], tol: f64) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("length {} vs {}", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if (g.1 - w.1).abs() > tol {
            return Err(format!("position {}: score {} vs {}", i + 1, g.1, w.1));
        }
        if g.0 != w.0 {
            let tied = want.iter().any(|(id, s)| *id == g.0 && (s - w.1).abs() <= tol);
            if !tied && i + 1 < want.len() {
                return Err(format!("position {}: {} vs {}", i + 1, g.0, w.0));
            }
        }
    }
    Ok(())
}
