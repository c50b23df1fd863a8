//! Labeled documents and the immutable inverted index built over them.
//!
//! Besides whole-collection statistics the index keeps, for every configured
//! category, the same statistics restricted to each group. Groups of a
//! category partition the corpus, so group document frequencies of a term sum
//! to its collection document frequency.

pub mod io;

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            text: text.into(),
            labels: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, category: impl Into<String>, group: impl Into<String>) -> Self {
        self.labels.insert(category.into(), group.into());
        self
    }
}

/// A fairness category and its ordered groups. Exposure distributions for the
/// category are aligned to this order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub groups: Vec<String>,
}

impl Category {
    pub fn new<S: Into<String>>(name: impl Into<String>, groups: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            groups: groups.into_iter().map(Into::into).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidCategory {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.groups.is_empty() {
            return Err(invalid("no groups"));
        }
        let mut seen = HashSet::new();
        for g in &self.groups {
            if !seen.insert(g.as_str()) {
                return Err(invalid(&format!("duplicate group {g:?}")));
            }
        }
        Ok(())
    }

    /// The group that absorbs documents without a label, if the category has
    /// one (a group named "Unknown" or "Unk").
    pub fn unknown_group(&self) -> Option<usize> {
        self.groups
            .iter()
            .position(|g| g.eq_ignore_ascii_case("unknown") || g.eq_ignore_ascii_case("unk"))
    }

    pub fn group_index(&self, group: &str) -> Option<usize> {
        self.groups.iter().position(|g| g == group)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Internal document number (input order).
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermStats {
    pub df: u32,
    pub cf: u64,
    pub postings: Vec<Posting>,
}

/// Per-category group statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryIndex {
    category: Category,
    /// Group of every document, by internal document number.
    doc_groups: Vec<u16>,
    group_docs: Vec<u32>,
    group_tokens: Vec<u64>,
    /// Row-major `[term][group]`.
    term_df: Vec<u32>,
    term_cf: Vec<u64>,
}

impl CategoryIndex {
    pub fn category(&self) -> &Category {
        &self.category
    }

    pub fn name(&self) -> &str {
        &self.category.name
    }

    pub fn groups(&self) -> &[String] {
        &self.category.groups
    }

    pub fn num_groups(&self) -> usize {
        self.category.groups.len()
    }

    pub fn group_index(&self, group: &str) -> Result<usize> {
        self.category.group_index(group).ok_or_else(|| Error::UnknownGroup {
            category: self.category.name.clone(),
            group: group.to_string(),
        })
    }

    pub fn group_of(&self, doc: u32) -> usize {
        self.doc_groups[doc as usize] as usize
    }

    /// ‖d_g‖, the number of documents in group `g`.
    pub fn group_num_docs(&self, g: usize) -> u32 {
        self.group_docs[g]
    }

    /// Total tokens in group `g`.
    pub fn group_tokens(&self, g: usize) -> u64 {
        self.group_tokens[g]
    }

    pub fn df(&self, term: u32, g: usize) -> u32 {
        self.term_df[term as usize * self.num_groups() + g]
    }

    pub fn cf(&self, term: u32, g: usize) -> u64 {
        self.term_cf[term as usize * self.num_groups() + g]
    }

    /// Number of groups containing the term at least once.
    pub fn groups_containing(&self, term: u32) -> usize {
        (0..self.num_groups()).filter(|&g| self.df(term, g) > 0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionIndex {
    doc_ids: Vec<String>,
    doc_lens: Vec<u32>,
    total_tokens: u64,
    vocab: Vec<String>,
    postings: Vec<Vec<Posting>>,
    cf: Vec<u64>,
    categories: Vec<CategoryIndex>,
    #[serde(skip)]
    lookups: Lookups,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Lookups {
    docs: HashMap<String, u32>,
    terms: HashMap<String, u32>,
    /// Forward index: per document, (term, tf) in ascending term order.
    doc_terms: Vec<Vec<(u32, u32)>>,
}

impl Lookups {
    fn build(doc_ids: &[String], vocab: &[String], postings: &[Vec<Posting>]) -> Self {
        let docs = doc_ids.iter().enumerate().map(|(i, d)| (d.clone(), i as u32)).collect();
        let terms = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        let mut doc_terms = vec![Vec::new(); doc_ids.len()];
        for (term, plist) in postings.iter().enumerate() {
            for p in plist {
                doc_terms[p.doc as usize].push((term as u32, p.tf));
            }
        }
        Self { docs, terms, doc_terms }
    }
}

/// Builds the index. Documents keep their input order as internal numbers and
/// terms are numbered by first occurrence, so the result is deterministic.
pub fn build_index(docs: &[Document], categories: &[Category]) -> Result<CollectionIndex> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut names = HashSet::new();
    for c in categories {
        c.validate()?;
        if !names.insert(c.name.as_str()) {
            return Err(Error::InvalidCategory {
                name: c.name.clone(),
                reason: "defined twice".into(),
            });
        }
    }
    let mut seen = HashSet::with_capacity(docs.len());
    for d in docs {
        if !seen.insert(d.doc_id.as_str()) {
            return Err(Error::DuplicateDocId(d.doc_id.clone()));
        }
    }

    // Resolve labels before any indexing work.
    let mut doc_groups: Vec<Vec<u16>> = vec![Vec::with_capacity(docs.len()); categories.len()];
    for d in docs {
        for (ci, c) in categories.iter().enumerate() {
            let g = match d.labels.get(&c.name) {
                Some(label) => c.group_index(label).ok_or_else(|| Error::UnlabeledGroup {
                    doc_id: d.doc_id.clone(),
                    category: c.name.clone(),
                    group: label.clone(),
                })?,
                None => c.unknown_group().ok_or_else(|| Error::MissingLabel {
                    doc_id: d.doc_id.clone(),
                    category: c.name.clone(),
                })?,
            };
            doc_groups[ci].push(g as u16);
        }
    }

    let tokenized: Vec<Vec<String>> = docs.par_iter().map(|d| text::tokenize(&d.text)).collect();

    let mut vocab: Vec<String> = Vec::new();
    let mut term_ids: HashMap<String, u32> = HashMap::new();
    let mut postings: Vec<Vec<Posting>> = Vec::new();
    let mut cf: Vec<u64> = Vec::new();
    let mut doc_lens = Vec::with_capacity(docs.len());
    let mut total_tokens = 0u64;

    for (doc_no, tokens) in tokenized.into_iter().enumerate() {
        doc_lens.push(tokens.len() as u32);
        total_tokens += tokens.len() as u64;
        let mut counts: Vec<(u32, u32)> = Vec::new();
        let mut slot: HashMap<u32, usize> = HashMap::new();
        for tok in tokens {
            let id = match term_ids.get(&tok) {
                Some(&id) => id,
                None => {
                    let id = vocab.len() as u32;
                    term_ids.insert(tok.clone(), id);
                    vocab.push(tok);
                    postings.push(Vec::new());
                    cf.push(0);
                    id
                }
            };
            match slot.get(&id) {
                Some(&i) => counts[i].1 += 1,
                None => {
                    slot.insert(id, counts.len());
                    counts.push((id, 1));
                }
            }
        }
        for (id, tf) in counts {
            postings[id as usize].push(Posting { doc: doc_no as u32, tf });
            cf[id as usize] += tf as u64;
        }
    }

    let categories = categories
        .iter()
        .zip(doc_groups)
        .map(|(c, groups_of_docs)| {
            let ng = c.groups.len();
            let mut group_docs = vec![0u32; ng];
            let mut group_tokens = vec![0u64; ng];
            for (doc, &g) in groups_of_docs.iter().enumerate() {
                group_docs[g as usize] += 1;
                group_tokens[g as usize] += doc_lens[doc] as u64;
            }
            let mut term_df = vec![0u32; vocab.len() * ng];
            let mut term_cf = vec![0u64; vocab.len() * ng];
            for (term, plist) in postings.iter().enumerate() {
                for p in plist {
                    let g = groups_of_docs[p.doc as usize] as usize;
                    term_df[term * ng + g] += 1;
                    term_cf[term * ng + g] += p.tf as u64;
                }
            }
            CategoryIndex {
                category: c.clone(),
                doc_groups: groups_of_docs,
                group_docs,
                group_tokens,
                term_df,
                term_cf,
            }
        })
        .collect();

    let doc_ids: Vec<String> = docs.iter().map(|d| d.doc_id.clone()).collect();
    let lookups = Lookups::build(&doc_ids, &vocab, &postings);
    Ok(CollectionIndex {
        doc_ids,
        doc_lens,
        total_tokens,
        vocab,
        postings,
        cf,
        categories,
        lookups,
    })
}

impl CollectionIndex {
    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.total_tokens as f64 / self.num_docs() as f64
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn doc_id(&self, doc: u32) -> &str {
        &self.doc_ids[doc as usize]
    }

    pub fn doc_number(&self, doc_id: &str) -> Option<u32> {
        self.lookups.docs.get(doc_id).copied()
    }

    pub fn doc_len(&self, doc: u32) -> u32 {
        self.doc_lens[doc as usize]
    }

    pub fn term(&self, id: u32) -> &str {
        &self.vocab[id as usize]
    }

    pub fn term_id(&self, term: &str) -> Option<u32> {
        self.lookups.terms.get(term).copied()
    }

    pub fn postings(&self, term: u32) -> &[Posting] {
        &self.postings[term as usize]
    }

    pub fn df(&self, term: u32) -> u32 {
        self.postings[term as usize].len() as u32
    }

    pub fn cf(&self, term: u32) -> u64 {
        self.cf[term as usize]
    }

    /// Term frequency of `term` in `doc`; zero when absent.
    pub fn tf(&self, term: u32, doc: u32) -> u32 {
        let plist = &self.postings[term as usize];
        plist
            .binary_search_by_key(&doc, |p| p.doc)
            .map(|i| plist[i].tf)
            .unwrap_or(0)
    }

    /// (term, tf) pairs of a document, ascending by term number.
    pub fn doc_terms(&self, doc: u32) -> &[(u32, u32)] {
        &self.lookups.doc_terms[doc as usize]
    }

    /// Whole-collection statistics; unindexed terms yield empty stats.
    pub fn term_stats(&self, term: &str) -> TermStats {
        match self.term_id(term) {
            Some(id) => TermStats {
                df: self.df(id),
                cf: self.cf(id),
                postings: self.postings(id).to_vec(),
            },
            None => TermStats::default(),
        }
    }

    pub fn categories(&self) -> &[CategoryIndex] {
        &self.categories
    }

    pub fn category(&self, name: &str) -> Result<&CategoryIndex> {
        self.categories
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownCategory(name.to_string()))
    }

    /// Statistics of `term` restricted to one group of a category. A term
    /// absent from the group yields zero counts, not an error.
    pub fn group_stats(&self, term: &str, category: &str, group: &str) -> Result<TermStats> {
        let cat = self.category(category)?;
        let g = cat.group_index(group)?;
        let Some(id) = self.term_id(term) else {
            return Ok(TermStats::default());
        };
        let postings: Vec<Posting> = self
            .postings(id)
            .iter()
            .filter(|p| cat.group_of(p.doc) == g)
            .copied()
            .collect();
        Ok(TermStats {
            df: cat.df(id, g),
            cf: cat.cf(id, g),
            postings,
        })
    }

    /// Group label of a document for a category.
    pub fn label_of(&self, doc_id: &str, category: &str) -> Result<&str> {
        let cat = self.category(category)?;
        let doc = self
            .doc_number(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))?;
        Ok(&cat.groups()[cat.group_of(doc)])
    }

    pub(crate) fn restore_lookups(&mut self) {
        self.lookups = Lookups::build(&self.doc_ids, &self.vocab, &self.postings);
    }
}
