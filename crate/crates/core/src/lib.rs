//! Field-normalized ranking of highly cited researchers.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! * [`ingest`] parses and validates the CSV inputs (monthly top-k snapshots,
//!   broad-field citation totals, the fine-to-broad field mapping, per-paper
//!   citation profiles and the published golden list).
//! * [`ratio`] derives the total-citation ratios (T) and the top-researcher
//!   ratios (H) of every broad field against mathematics, and turns them into
//!   exact rational divisors per fine field.
//! * [`fit`] relates the two ratio families through `H = T^alpha` and the
//!   linear `H = 2T/3` rule.
//! * [`rank`] normalizes citation counts by the divisors, merges the per-field
//!   lists into one ranking, clusters near-equal scores and reports which field
//!   leaders reach the top of the merged list.
//! * [`indicators`] computes citations per paper, the h-index, citations per
//!   meaningful paper and the name-aggregation flag.
//!
//! [`report`] renders every result as CSV, JSON or Markdown with fixed
//! formatting so repeated runs are byte-identical.

pub mod data;
pub mod error;
pub mod field;
pub mod fit;
pub mod indicators;
pub mod ingest;
pub mod rank;
pub mod ratio;
pub mod rational;
pub mod report;

pub use error::{Error, ErrorCode, IngestError};
pub use field::{EsiField, FieldUniverse, NsfField};
pub use fit::{FitResult, Rule};
pub use indicators::{CpmpMode, Hundredths, IndicatorSet};
pub use ingest::{
    AppendixRow, FieldMapping, FieldSnapshot, FieldTotalsSeries, PaperProfile, ResearcherRecord,
    SnapshotSchema,
};
pub use rank::{MergedEntry, MergedList};
pub use ratio::{AggregatedVector, DivisorPreset, DivisorTable, RatioTable};
pub use rational::Rational;
pub use report::OutputFormat;

pub type Result<T, E = Error> = std::result::Result<T, E>;
