//! CSV input.
//!
//! Comma separated, UTF-8, first row and first column hold names, the
//! top-left cell is ignored. With algorithms in rows the header names the
//! datasets; with algorithms in columns (one dataset per line) the header
//! names the algorithms.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::PerformanceMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    #[default]
    AlgorithmsInRows,
    AlgorithmsInColumns,
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rows" | "algorithms-in-rows" => Ok(Orientation::AlgorithmsInRows),
            "columns" | "algorithms-in-columns" => Ok(Orientation::AlgorithmsInColumns),
            other => Err(Error::validation(format!("unknown orientation '{other}'"))),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::AlgorithmsInRows => "algorithms-in-rows",
            Orientation::AlgorithmsInColumns => "algorithms-in-columns",
        })
    }
}

pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, orientation: Orientation) -> Result<PerformanceMatrix<T>> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_csv(&text, orientation)
}

/// Parses CSV text. Row numbers in errors are 1-based physical lines, the
/// header being row 1; columns are 1-based.
pub fn parse_csv<T: Scalar>(text: &str, orientation: Orientation) -> Result<PerformanceMatrix<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut header: Option<Vec<String>> = None;
    let mut row_names = Vec::new();
    let mut body: Vec<Vec<T>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                row,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let Some(head) = &header else {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        };
        if record.len() != head.len() {
            return Err(Error::Parse {
                row,
                column: record.len().min(head.len()) + 1,
                message: format!("expected {} cells, found {}", head.len(), record.len()),
            });
        }
        row_names.push(record[0].to_string());
        let mut values = Vec::with_capacity(record.len() - 1);
        for (c, cell) in record.iter().enumerate().skip(1) {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("cannot parse '{cell}' as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: c + 1,
                    message: format!("non-finite value '{cell}'"),
                });
            }
            values.push(T::lit(v));
        }
        body.push(values);
    }

    let header = header.ok_or_else(|| Error::validation("empty table"))?;
    if body.is_empty() || header.len() < 2 {
        return Err(Error::validation("table has no data cells"));
    }
    let column_names: Vec<String> = header[1..].to_vec();
    match orientation {
        Orientation::AlgorithmsInRows => PerformanceMatrix::new(row_names, column_names, body),
        Orientation::AlgorithmsInColumns => {
            let transposed = (0..column_names.len())
                .map(|a| body.iter().map(|r| r[a]).collect())
                .collect();
            PerformanceMatrix::new(column_names, row_names, transposed)
        }
    }
}

/// Serializes a matrix to CSV in the given orientation.
pub fn to_csv<T: Scalar>(perf: &PerformanceMatrix<T>, orientation: Orientation) -> String {
    let mut out = String::new();
    let line = |label: &str, cells: Vec<String>| {
        let mut s = label.to_string();
        for c in cells {
            s.push(',');
            s.push_str(&c);
        }
        s.push('\n');
        s
    };
    match orientation {
        Orientation::AlgorithmsInRows => {
            out += &line("algorithm", perf.dataset_names().to_vec());
            for (name, row) in perf.algorithm_names().iter().zip(perf.rows()) {
                out += &line(name, row.iter().map(|v| v.to_string()).collect());
            }
        }
        Orientation::AlgorithmsInColumns => {
            out += &line("dataset", perf.algorithm_names().to_vec());
            for (j, name) in perf.dataset_names().iter().enumerate() {
                out += &line(name, perf.rows().iter().map(|r| r[j].to_string()).collect());
            }
        }
    }
    out
}
