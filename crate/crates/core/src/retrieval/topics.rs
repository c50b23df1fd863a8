//! Query files: one `query_id<TAB>query text` per line.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    pub query_id: String,
    pub text: String,
}

/// Blank lines are skipped. Query ids must be unique.
pub fn parse_topics<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<Topic>> {
    let mut topics = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let Some((qid, text)) = line.split_once('\t') else {
            return Err(Error::parse(source_name, i + 1, "expected query_id<TAB>text"));
        };
        let qid = qid.trim();
        if qid.is_empty() {
            return Err(Error::parse(source_name, i + 1, "empty query id"));
        }
        if !seen.insert(qid.to_string()) {
            return Err(Error::parse(source_name, i + 1, format!("duplicate query id {qid:?}")));
        }
        topics.push(Topic {
            query_id: qid.to_string(),
            text: text.trim().to_string(),
        });
    }
    Ok(topics)
}

pub fn read_topics(path: &Path) -> Result<Vec<Topic>> {
    parse_topics(BufReader::new(File::open(path)?), &path.display().to_string())
}
