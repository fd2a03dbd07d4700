//! Parsing, validation and canonical re-emission of every input file.
//!
//! All readers take UTF-8 comma-separated text with one exact header row.
//! Errors carry the 1-based line number (the header is line 1), the offending
//! column when there is one, and an [`ErrorCode`].

mod appendix;
mod mapping;
mod profiles;
mod snapshots;
mod totals;

use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use appendix::{emit_appendix, group_by_field, parse_appendix_fixture, AppendixRow};
pub use mapping::{emit_mapping, parse_mapping, FieldMapping};
pub use profiles::{emit_paper_profiles, parse_paper_profiles, PaperProfile};
pub use snapshots::{emit_snapshots, parse_snapshots, FieldSnapshot, SnapshotSchema};
pub use totals::{emit_field_totals, parse_field_totals, FieldTotalsSeries};

use crate::error::{ErrorCode, IngestError};
use crate::field::EsiField;

/// Default citation window: ten years plus two months.
pub const DEFAULT_WINDOW_YEARS: f64 = 10.0 + 2.0 / 12.0;

pub const SNAPSHOT_HEADER: &[&str] = &["date", "esi_field", "rank", "name", "papers", "citations"];
pub const TOTALS_HEADER: &[&str] = &["year", "nsf_field", "total_citations"];
pub const MAPPING_HEADER: &[&str] = &["esi_field", "nsf_field"];
pub const PROFILES_HEADER: &[&str] = &["name", "paper_id", "citations"];
pub const APPENDIX_HEADER: &[&str] = &[
    "rank",
    "name",
    "normalized",
    "field",
    "field_rank",
    "papers",
    "citations",
    "cpp",
];

/// One row of a per-field highly-cited list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResearcherRecord {
    pub name: String,
    pub esi_field: EsiField,
    pub rank_in_field: u32,
    pub papers: u64,
    pub citations: u64,
}

/// Uppercases and collapses internal whitespace. Commas and initials are
/// kept as written.
pub fn normalize_name(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_uppercase()
}

/// A data row together with its source line.
pub(crate) struct Row {
    pub line: u64,
    pub record: csv::StringRecord,
}

impl Row {
    pub fn get(&self, idx: usize) -> &str {
        self.record.get(idx).unwrap_or("")
    }

    pub fn err(&self, code: ErrorCode, column: &str, message: impl Into<String>) -> IngestError {
        IngestError::new(code, self.line, message).at_column(column)
    }

    pub fn count(&self, idx: usize, column: &str) -> Result<u64, IngestError> {
        parse_count(self.get(idx), self.line, column)
    }

    pub fn name(&self, idx: usize, column: &str) -> Result<String, IngestError> {
        let name = normalize_name(self.get(idx));
        if name.is_empty() {
            return Err(self.err(ErrorCode::BlankName, column, "name is blank"));
        }
        Ok(name)
    }

    pub fn date(&self, idx: usize, column: &str) -> Result<NaiveDate, IngestError> {
        let raw = self.get(idx);
        NaiveDate::parse_from_str(raw, "%Y-%m-%d")
            .ok()
            .filter(|_| raw.len() == 10)
            .ok_or_else(|| {
                self.err(
                    ErrorCode::MalformedRow,
                    column,
                    format!("expected YYYY-MM-DD date, got `{raw}`"),
                )
            })
    }
}

pub(crate) fn parse_count(raw: &str, line: u64, column: &str) -> Result<u64, IngestError> {
    if let Ok(v) = raw.parse::<u64>() {
        return Ok(v);
    }
    let code = match raw.parse::<i64>() {
        Ok(v) if v < 0 => ErrorCode::NegativeValue,
        _ => ErrorCode::MalformedRow,
    };
    let message = if code == ErrorCode::NegativeValue {
        format!("value must be non-negative, got {raw}")
    } else {
        format!("expected an unsigned integer, got `{raw}`")
    };
    Err(IngestError::new(code, line, message).at_column(column))
}

/// Reads every data row after checking the header. Completely empty input
/// yields no rows.
pub(crate) fn read_rows<R: Read>(source: R, header: &[&str]) -> Result<Vec<Row>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut rows = Vec::new();
    let mut seen_header = false;
    for result in reader.records() {
        let record = result.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if !seen_header {
            let got: Vec<&str> = record.iter().collect();
            let got_clean: Vec<&str> = got
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    if i == 0 {
                        s.trim_start_matches('\u{feff}')
                    } else {
                        s
                    }
                })
                .collect();
            if got_clean != header {
                return Err(IngestError::new(
                    ErrorCode::BadHeader,
                    line,
                    format!(
                        "expected header `{}`, got `{}`",
                        header.join(","),
                        got.join(",")
                    ),
                ));
            }
            seen_header = true;
            continue;
        }
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != header.len() {
            return Err(IngestError::new(
                ErrorCode::MalformedRow,
                line,
                format!("expected {} columns, found {}", header.len(), record.len()),
            ));
        }
        rows.push(Row { line, record });
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => {
            format!("expected {expected_len} columns, found {len}")
        }
        csv::ErrorKind::Utf8 { .. } => "input is not valid UTF-8".to_string(),
        _ => e.to_string(),
    };
    IngestError::new(ErrorCode::MalformedRow, line, message)
}

pub(crate) fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory csv writer");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}
