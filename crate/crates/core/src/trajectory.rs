//! Per-tick trajectory rows and the sinks that receive them.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// A row that knows its CSV layout.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

/// Receives trajectory rows in increasing `t`.
pub trait TrajectorySink<R> {
    fn push(&mut self, row: &R) -> Result<()>;
}

impl<R: Clone> TrajectorySink<R> for Vec<R> {
    fn push(&mut self, row: &R) -> Result<()> {
        Vec::push(self, row.clone());
        Ok(())
    }
}

/// Formats a float the shortest way that still round-trips.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
            .trim_end_matches(".0")
            .to_string()
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Writes rows as CSV, header first.
pub struct CsvSink<W: Write> {
    out: W,
    header_written: bool,
}

impl<W: Write> CsvSink<W> {
    pub fn new(out: W) -> Self {
        CsvSink {
            out,
            header_written: false,
        }
    }

    /// Writes the header if no row has been pushed yet, flushes, and returns
    /// the writer.
    pub fn finish<R: CsvRecord>(mut self) -> std::io::Result<W> {
        if !self.header_written {
            writeln!(self.out, "{}", R::HEADER.join(","))?;
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write, R: CsvRecord> TrajectorySink<R> for CsvSink<W> {
    fn push(&mut self, row: &R) -> Result<()> {
        let res = (|| {
            if !self.header_written {
                writeln!(self.out, "{}", R::HEADER.join(","))?;
                self.header_written = true;
            }
            writeln!(self.out, "{}", row.fields().join(","))
        })();
        res.map_err(|e| crate::Error::io("<trajectory sink>", e))
    }
}

/// One sample of a 1D run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: u64,
    pub centroid: f64,
    pub core_span: f64,
    pub total_span: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl CsvRecord for TrajectoryRow {
    const HEADER: &'static [&'static str] =
        &["t", "centroid", "core_span", "total_span", "x_min", "x_max"];

    fn fields(&self) -> Vec<String> {
        let mut v = vec![self.t.to_string()];
        v.extend(
            [self.centroid, self.core_span, self.total_span, self.x_min, self.x_max]
                .map(fmt_f64),
        );
        v
    }
}

/// One sample of a 2D run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow2D {
    pub t: u64,
    pub cx: f64,
    pub cy: f64,
    pub diameter: f64,
    pub hull_count: usize,
}

impl CsvRecord for TrajectoryRow2D {
    const HEADER: &'static [&'static str] = &["t", "cx", "cy", "diameter", "hull_count"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.t.to_string(),
            fmt_f64(self.cx),
            fmt_f64(self.cy),
            fmt_f64(self.diameter),
            self.hull_count.to_string(),
        ]
    }
}
