//! Result files.
//!
//! The main table has the fixed columns
//! `kind, epsilon, N, S0, trials, mean, stddev, stderr, bound, ratio`;
//! inapplicable cells are empty in CSV and `null` in JSON-lines. A span
//! histogram, when present, goes to a sibling file `<stem>.histogram.<ext>`
//! with columns `epsilon, N, k, count, empirical_p, bound_p`.
//!
//! Floats are written in their shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ExperimentResult, HistogramRow, ResultRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Validation(format!("unknown output format {other:?}"))),
        }
    }
}

/// Path of the histogram file that accompanies `path`.
pub fn histogram_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}.histogram.{ext}"))
}

/// Writes the result table to `path`, plus the histogram file when the
/// result has one. Returns the paths written.
pub fn write_results(result: &ExperimentResult, format: OutputFormat, path: &Path) -> Result<Vec<PathBuf>> {
    write_table(&result.rows, format, path)?;
    let mut written = vec![path.to_path_buf()];
    if !result.histogram.is_empty() {
        let h = histogram_path(path);
        write_table(&result.histogram, format, &h)?;
        written.push(h);
    }
    Ok(written)
}

/// A row type with a fixed column list.
pub trait Table: Serialize {
    const COLUMNS: &'static [&'static str];
}

impl Table for ResultRow {
    const COLUMNS: &'static [&'static str] = &[
        "kind", "epsilon", "N", "S0", "trials", "mean", "stddev", "stderr", "bound", "ratio",
    ];
}

impl Table for HistogramRow {
    const COLUMNS: &'static [&'static str] = &["epsilon", "N", "k", "count", "empirical_p", "bound_p"];
}

fn write_table<R: Table>(rows: &[R], format: OutputFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    match format {
        OutputFormat::Csv => {
            // The header is written by hand so that an empty table still has one.
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
            w.write_record(R::COLUMNS).map_err(|e| csv_err(path, e))?;
            for r in rows {
                w.serialize(r).map_err(|e| csv_err(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
        OutputFormat::Jsonl => {
            // Non-finite floats come out as null.
            let mut w = BufWriter::new(file);
            for r in rows {
                serde_json::to_writer(&mut w, r).map_err(|e| json_err(path, e))?;
                w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
    }
}

fn csv_err(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn json_err(path: &Path, source: serde_json::Error) -> Error {
    Error::Json {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads back a CSV table written by [`write_results`].
pub fn read_csv_rows<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<R>, _>>()
        .map_err(|e| csv_err(path, e))
}
