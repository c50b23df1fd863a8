//! Corpus and category readers, and the on-disk index format.
//!
//! Index files start with the magic bytes `QEPIDX`, one format-version byte,
//! then a JSON body describing the full index.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{Category, CollectionIndex, Document};
use crate::error::{Error, Result};

pub const INDEX_MAGIC: &[u8; 6] = b"QEPIDX";
pub const INDEX_FORMAT_VERSION: u8 = 1;

/// Parses JSON Lines documents. Blank lines are skipped; errors carry the
/// 1-based line number.
pub fn parse_documents<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| Error::parse(source_name, i + 1, e))?;
        docs.push(doc);
    }
    Ok(docs)
}

pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    let file = File::open(path)?;
    parse_documents(BufReader::new(file), &path.display().to_string())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Category),
    Many(Vec<Category>),
}

/// Reads category definitions: either one `{name, groups}` object or an array
/// of them.
pub fn parse_categories(json: &str) -> Result<Vec<Category>> {
    Ok(match serde_json::from_str::<OneOrMany>(json)? {
        OneOrMany::One(c) => vec![c],
        OneOrMany::Many(cs) => cs,
    })
}

pub fn read_categories(path: &Path) -> Result<Vec<Category>> {
    parse_categories(&std::fs::read_to_string(path)?)
}

pub fn write_index<W: Write>(index: &CollectionIndex, mut w: W) -> Result<()> {
    w.write_all(INDEX_MAGIC)?;
    w.write_all(&[INDEX_FORMAT_VERSION])?;
    serde_json::to_writer(&mut w, index)?;
    w.flush()?;
    Ok(())
}

pub fn read_index<R: Read>(mut r: R) -> Result<CollectionIndex> {
    let mut header = [0u8; 7];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &header[..6] != INDEX_MAGIC {
        return Err(Error::Format("not an index file (bad magic)".into()));
    }
    if header[6] != INDEX_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {} (expected {INDEX_FORMAT_VERSION})",
            header[6]
        )));
    }
    let mut index: CollectionIndex = serde_json::from_reader(r)?;
    index.restore_lookups();
    Ok(index)
}

pub fn save_index(index: &CollectionIndex, path: &Path) -> Result<()> {
    write_index(index, BufWriter::new(File::create(path)?))
}

pub fn load_index(path: &Path) -> Result<CollectionIndex> {
    read_index(BufReader::new(File::open(path)?))
}
