//! Batch ingestion from CSV and newline-delimited JSON.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::error::UccError;
use crate::metrics::{Batch, Sample};

pub const BOUNDS_HEADER: [&str; 4] = ["y", "y_hat", "y_lower", "y_upper"];
pub const BANDS_HEADER: [&str; 4] = ["y", "y_hat", "z_lower", "z_upper"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputFormat {
    /// CSV with header `y,y_hat,y_lower,y_upper`.
    CsvBounds,
    /// CSV with header `y,y_hat,z_lower,z_upper`.
    CsvBands,
    /// One JSON object per line, with either bound or band keys.
    Json,
}

impl InputFormat {
    pub fn token(&self) -> &'static str {
        match self {
            InputFormat::CsvBounds => "csv-bounds",
            InputFormat::CsvBands => "csv-bands",
            InputFormat::Json => "json",
        }
    }

    /// Guesses the format from the extension; CSV files are told apart by
    /// their header.
    pub fn infer(path: &Path) -> Result<InputFormat, ReadError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("json" | "jsonl" | "ndjson") => Ok(InputFormat::Json),
            _ => {
                let file = File::open(path).map_err(|e| ReadError::io(path, e))?;
                let mut first = String::new();
                BufReader::new(file)
                    .read_line(&mut first)
                    .map_err(|e| ReadError::io(path, e))?;
                let fields: Vec<&str> = first.trim_end().split(',').map(str::trim).collect();
                if fields == BANDS_HEADER {
                    Ok(InputFormat::CsvBands)
                } else {
                    Ok(InputFormat::CsvBounds)
                }
            }
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv-bounds" => Ok(InputFormat::CsvBounds),
            "csv-bands" => Ok(InputFormat::CsvBands),
            "json" => Ok(InputFormat::Json),
            _ => Err(format!(
                "unknown format `{s}` (expected csv-bounds, csv-bands or json)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },

    #[error("line {line}: {source}")]
    Invalid { line: u64, source: UccError },

    #[error(transparent)]
    Batch(#[from] UccError),
}

impl ReadError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        ReadError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub fn read_batch(path: &Path, format: InputFormat) -> Result<Batch, ReadError> {
    let file = File::open(path).map_err(|e| ReadError::io(path, e))?;
    read_batch_from_reader(BufReader::new(file), format)
}

pub fn read_batch_from_reader<R: Read>(reader: R, format: InputFormat) -> Result<Batch, ReadError> {
    match format {
        InputFormat::CsvBounds => read_csv(reader, &BOUNDS_HEADER, Sample::from_bounds),
        InputFormat::CsvBands => read_csv(reader, &BANDS_HEADER, Sample::from_bands),
        InputFormat::Json => read_json(reader),
    }
}

type Constructor = fn(usize, f64, f64, f64, f64) -> crate::Result<Sample>;

fn read_csv<R: Read>(reader: R, header: &[&str; 4], make: Constructor) -> Result<Batch, ReadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let found = rdr.headers().map_err(|e| csv_error(&e, 1))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(ReadError::HeaderMismatch {
            expected: header.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut values = [0.0; 4];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            *slot = field.parse().map_err(|_| ReadError::Parse {
                line,
                message: format!("`{field}` is not a number"),
            })?;
        }
        let [a, b, c, d] = values;
        let sample =
            make(samples.len(), a, b, c, d).map_err(|source| ReadError::Invalid { line, source })?;
        samples.push(sample);
    }
    Ok(Batch::new(samples)?)
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> ReadError {
    ReadError::Parse {
        line: e.position().map_or(fallback_line, |p| p.line()),
        message: e.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    y: f64,
    y_hat: f64,
    y_lower: Option<f64>,
    y_upper: Option<f64>,
    z_lower: Option<f64>,
    z_upper: Option<f64>,
}

fn read_json<R: Read>(reader: R) -> Result<Batch, ReadError> {
    let mut samples = Vec::new();
    for (i, text) in BufReader::new(reader).lines().enumerate() {
        let line = i as u64 + 1;
        let text = text.map_err(|e| ReadError::Parse {
            line,
            message: e.to_string(),
        })?;
        if text.trim().is_empty() {
            continue;
        }
        let row: JsonRow = serde_json::from_str(&text).map_err(|e| ReadError::Parse {
            line,
            message: e.to_string(),
        })?;
        let index = samples.len();
        let sample = match (row.y_lower, row.y_upper, row.z_lower, row.z_upper) {
            (Some(lo), Some(hi), None, None) => Sample::from_bounds(index, row.y, row.y_hat, lo, hi),
            (None, None, Some(lo), Some(hi)) => Sample::from_bands(index, row.y, row.y_hat, lo, hi),
            _ => {
                return Err(ReadError::Parse {
                    line,
                    message: "expected either y_lower/y_upper or z_lower/z_upper".into(),
                })
            }
        };
        samples.push(sample.map_err(|source| ReadError::Invalid { line, source })?);
    }
    Ok(Batch::new(samples)?)
}

/// Writes a batch as band-form CSV. Values are printed in shortest
/// round-trip form, so reading the file back yields the same batch.
pub fn write_batch_csv<W: Write>(batch: &Batch, writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BANDS_HEADER)?;
    for s in batch {
        w.write_record([
            s.y().to_string(),
            s.y_hat().to_string(),
            s.z_lower().to_string(),
            s.z_upper().to_string(),
        ])?;
    }
    w.flush()
}
