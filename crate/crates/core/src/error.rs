use std::fmt;

use thiserror::Error;

/// Machine-readable classification of every failure the library reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    BadHeader,
    MalformedRow,
    NegativeValue,
    BlankName,
    DuplicateKey,
    RankGap,
    MonotonicityViolation,
    UnknownField,
    IncompleteMapping,
    ConflictingMapping,
    CppMismatch,
    MissingBase,
    ZeroBase,
    NoSharedYears,
    MixedListLength,
    MixedWindow,
    MissingDivisor,
    UnknownPreset,
    NoInformativePairs,
    NonPositive,
    InvalidParameter,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::BadHeader => "bad_header",
            ErrorCode::MalformedRow => "malformed_row",
            ErrorCode::NegativeValue => "negative_value",
            ErrorCode::BlankName => "blank_name",
            ErrorCode::DuplicateKey => "duplicate_key",
            ErrorCode::RankGap => "rank_gap",
            ErrorCode::MonotonicityViolation => "monotonicity_violation",
            ErrorCode::UnknownField => "unknown_field",
            ErrorCode::IncompleteMapping => "incomplete_mapping",
            ErrorCode::ConflictingMapping => "conflicting_mapping",
            ErrorCode::CppMismatch => "cpp_mismatch",
            ErrorCode::MissingBase => "missing_base",
            ErrorCode::ZeroBase => "zero_base",
            ErrorCode::NoSharedYears => "no_shared_years",
            ErrorCode::MixedListLength => "mixed_list_length",
            ErrorCode::MixedWindow => "mixed_window",
            ErrorCode::MissingDivisor => "missing_divisor",
            ErrorCode::UnknownPreset => "unknown_preset",
            ErrorCode::NoInformativePairs => "no_informative_pairs",
            ErrorCode::NonPositive => "non_positive",
            ErrorCode::InvalidParameter => "invalid_parameter",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rejected input row. `line` is 1-based and counts the header as line 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}{}: [{code}] {message}", column.as_ref().map(|c| format!(", column `{c}`")).unwrap_or_default())]
pub struct IngestError {
    pub code: ErrorCode,
    pub line: u64,
    pub column: Option<String>,
    pub message: String,
}

impl IngestError {
    pub fn new(code: ErrorCode, line: u64, message: impl Into<String>) -> Self {
        IngestError {
            code,
            line,
            column: None,
            message: message.into(),
        }
    }

    pub fn at_column(mut self, column: impl Into<String>) -> Self {
        self.column = Some(column.into());
        self
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),

    #[error("base field `{0}` has no data")]
    MissingBase(String),

    #[error("base field `{field}` is zero {context}")]
    ZeroBase { field: String, context: String },

    #[error("field `{0}` shares no year with the base field")]
    NoSharedYears(String),

    #[error("snapshot lists disagree on length: {0}")]
    MixedListLength(String),

    #[error("snapshot windows disagree: {0} vs {1} years")]
    MixedWindow(f64, f64),

    #[error("field `{0}` is not in the field mapping")]
    UnmappedField(String),

    #[error("no divisor for field `{0}`")]
    MissingDivisor(String),

    #[error("unknown divisor preset `{0}` (expected table2, two_thirds, appendix or data)")]
    UnknownPreset(String),

    #[error("no informative (T, H) pair: every pair has T = 1")]
    NoInformativePairs,

    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),

    #[error("duplicate entry {0}")]
    Duplicate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub fn code(&self) -> ErrorCode {
        match self {
            Error::Ingest(e) => e.code,
            Error::MissingBase(_) => ErrorCode::MissingBase,
            Error::ZeroBase { .. } => ErrorCode::ZeroBase,
            Error::NoSharedYears(_) => ErrorCode::NoSharedYears,
            Error::MixedListLength(_) => ErrorCode::MixedListLength,
            Error::MixedWindow(..) => ErrorCode::MixedWindow,
            Error::UnmappedField(_) => ErrorCode::UnknownField,
            Error::MissingDivisor(_) => ErrorCode::MissingDivisor,
            Error::UnknownPreset(_) => ErrorCode::UnknownPreset,
            Error::NoInformativePairs => ErrorCode::NoInformativePairs,
            Error::NonPositive(..) => ErrorCode::NonPositive,
            Error::Duplicate(_) => ErrorCode::DuplicateKey,
            Error::InvalidParameter(_) => ErrorCode::InvalidParameter,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ingest_error_display_carries_location() {
        let e = IngestError::new(ErrorCode::MalformedRow, 7, "not a number").at_column("rank");
        assert_eq!(
            e.to_string(),
            "line 7, column `rank`: [malformed_row] not a number"
        );
        let e = IngestError::new(ErrorCode::DuplicateKey, 3, "dup");
        assert_eq!(e.to_string(), "line 3: [duplicate_key] dup");
    }

    #[test]
    fn codes_propagate_through_error() {
        let e: Error = IngestError::new(ErrorCode::RankGap, 2, "gap").into();
        assert_eq!(e.code(), ErrorCode::RankGap);
        assert_eq!(
            Error::NoInformativePairs.code().as_str(),
            "no_informative_pairs"
        );
    }
}
