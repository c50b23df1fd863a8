//! Report files: per-query JSD rows and CV values as CSV, and a JSON
//! summary of mean JSD and significance tests per category.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{CategorySummary, Failure, PredictionReport};
use crate::error::{Error, Result};

pub const JSD_FILE: &str = "jsd_rows.csv";
pub const CV_FILE: &str = "cv.csv";
pub const SUMMARY_FILE: &str = "summary.json";

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

pub fn write_jsd_csv<W: Write>(report: &PredictionReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in &report.rows {
        out.serialize(row).map_err(csv_error)?;
    }
    if report.rows.is_empty() {
        out.write_record(["pipeline", "query_id", "category", "predictor", "jsd"])
            .map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_cv_csv<W: Write>(report: &PredictionReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in &report.cv {
        out.serialize(row).map_err(csv_error)?;
    }
    if report.cv.is_empty() {
        out.write_record(["pipeline", "query_id", "category", "cv"])
            .map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    rows: usize,
    summaries: &'a [CategorySummary],
    failures: &'a [Failure],
}

pub fn write_summary_json<W: Write>(report: &PredictionReport, mut w: W) -> Result<()> {
    let summary = Summary {
        rows: report.rows.len(),
        summaries: &report.summaries,
        failures: &report.failures,
    };
    serde_json::to_writer_pretty(&mut w, &summary)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes the three report files into `dir`, which must exist.
pub fn write_report(report: &PredictionReport, dir: &Path) -> Result<()> {
    let create = |name: &str| -> Result<BufWriter<File>> { Ok(BufWriter::new(File::create(dir.join(name))?)) };
    write_jsd_csv(report, create(JSD_FILE)?)?;
    write_cv_csv(report, create(CV_FILE)?)?;
    write_summary_json(report, create(SUMMARY_FILE)?)
}
