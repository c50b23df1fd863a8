//! TREC run files: `qid Q0 docid rank score tag`, whitespace separated.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use super::{RankedDoc, Ranking};
use crate::error::{Error, Result};

pub fn write_run<'a, W: Write>(rankings: impl IntoIterator<Item = &'a Ranking>, tag: &str, mut w: W) -> Result<()> {
    for r in rankings {
        for (i, e) in r.entries.iter().enumerate() {
            writeln!(w, "{} Q0 {} {} {} {}", r.query_id, e.doc_id, i + 1, e.score, tag)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a run file into rankings keyed by query id. Entries are ordered by
/// the rank column; `k` is set to the number of entries read.
pub fn read_run<R: BufRead>(reader: R, source_name: &str) -> Result<BTreeMap<String, Ranking>> {
    let mut rows: BTreeMap<String, Vec<(usize, RankedDoc)>> = BTreeMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 6 {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("expected 6 fields, found {}", fields.len()),
            ));
        }
        let rank: usize = fields[3]
            .parse()
            .map_err(|e| Error::parse(source_name, lineno, format!("bad rank: {e}")))?;
        let score: f64 = fields[4]
            .parse()
            .map_err(|e| Error::parse(source_name, lineno, format!("bad score: {e}")))?;
        if !score.is_finite() {
            return Err(Error::parse(source_name, lineno, "non-finite score"));
        }
        let (qid, docid) = (fields[0].to_string(), fields[2].to_string());
        if !seen.insert((qid.clone(), docid.clone())) {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("document {docid} listed twice for query {qid}"),
            ));
        }
        rows.entry(qid)
            .or_default()
            .push((rank, RankedDoc { doc_id: docid, score }));
    }
    Ok(rows
        .into_iter()
        .map(|(qid, mut entries)| {
            entries.sort_by_key(|(rank, _)| *rank);
            let entries: Vec<RankedDoc> = entries.into_iter().map(|(_, e)| e).collect();
            let k = entries.len();
            (
                qid.clone(),
                Ranking {
                    query_id: qid,
                    entries,
                    k,
                },
            )
        })
        .collect())
}
