use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{finish, read_rows, writer, ResearcherRecord, DEFAULT_WINDOW_YEARS, SNAPSHOT_HEADER};
use crate::error::{ErrorCode, IngestError};
use crate::field::{EsiField, FieldUniverse};

/// How to read a snapshot file: which fields are legal and how long a
/// citation window each list covers.
#[derive(Debug, Clone)]
pub struct SnapshotSchema {
    pub universe: FieldUniverse,
    pub window_years: f64,
}

impl Default for SnapshotSchema {
    fn default() -> Self {
        SnapshotSchema {
            universe: FieldUniverse::esi_default(),
            window_years: DEFAULT_WINDOW_YEARS,
        }
    }
}

/// A dated top-k list for one fine field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub esi_field: EsiField,
    pub snapshot_date: NaiveDate,
    pub window_years: f64,
    /// Sorted by `rank_in_field`, ranks contiguous from 1.
    pub entries: Vec<ResearcherRecord>,
}

impl FieldSnapshot {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn citation_vector(&self) -> Vec<u64> {
        self.entries.iter().map(|r| r.citations).collect()
    }
}

/// Parses `date,esi_field,rank,name,papers,citations` rows into one snapshot
/// per (field, date), sorted by field then date.
pub fn parse_snapshots<R: Read>(
    source: R,
    schema: &SnapshotSchema,
) -> Result<Vec<FieldSnapshot>, IngestError> {
    if !(schema.window_years > 0.0 && schema.window_years.is_finite()) {
        return Err(IngestError::new(
            ErrorCode::NonPositive,
            0,
            format!("window must be positive, got {}", schema.window_years),
        ));
    }
    let rows = read_rows(source, SNAPSHOT_HEADER)?;
    let mut groups: BTreeMap<(EsiField, NaiveDate), Vec<(u64, ResearcherRecord)>> = BTreeMap::new();
    let mut seen_rank = HashSet::new();
    let mut seen_name = HashSet::new();

    for row in &rows {
        let date = row.date(0, "date")?;
        let field = schema.universe.resolve_esi(row.get(1)).ok_or_else(|| {
            row.err(
                ErrorCode::UnknownField,
                "esi_field",
                format!("unknown field `{}`", row.get(1)),
            )
        })?;
        let rank = row.count(2, "rank")?;
        if rank == 0 || rank > u32::MAX as u64 {
            return Err(row.err(ErrorCode::MalformedRow, "rank", "rank must be at least 1"));
        }
        let name = row.name(3, "name")?;
        let papers = row.count(4, "papers")?;
        let citations = row.count(5, "citations")?;

        if !seen_rank.insert((field.clone(), date, rank)) {
            return Err(row.err(
                ErrorCode::DuplicateKey,
                "rank",
                format!("duplicate rank {rank} for {field} on {date}"),
            ));
        }
        if !seen_name.insert((field.clone(), date, name.clone())) {
            return Err(row.err(
                ErrorCode::DuplicateKey,
                "name",
                format!("{name} listed twice for {field} on {date}"),
            ));
        }
        groups.entry((field.clone(), date)).or_default().push((
            row.line,
            ResearcherRecord {
                name,
                esi_field: field,
                rank_in_field: rank as u32,
                papers,
                citations,
            },
        ));
    }

    groups
        .into_iter()
        .map(|((esi_field, snapshot_date), mut entries)| {
            entries.sort_by_key(|(_, r)| r.rank_in_field);
            for (i, (line, rec)) in entries.iter().enumerate() {
                let expected = i as u32 + 1;
                if rec.rank_in_field != expected {
                    return Err(IngestError::new(
                        ErrorCode::RankGap,
                        *line,
                        format!(
                            "{esi_field} on {snapshot_date}: expected rank {expected}, found {}",
                            rec.rank_in_field
                        ),
                    )
                    .at_column("rank"));
                }
                if i > 0 && rec.citations > entries[i - 1].1.citations {
                    return Err(IngestError::new(
                        ErrorCode::MonotonicityViolation,
                        *line,
                        format!(
                            "{esi_field} on {snapshot_date}: rank {} has {} citations, more than rank {} ({})",
                            rec.rank_in_field,
                            rec.citations,
                            expected - 1,
                            entries[i - 1].1.citations
                        ),
                    )
                    .at_column("citations"));
                }
            }
            Ok(FieldSnapshot {
                esi_field,
                snapshot_date,
                window_years: schema.window_years,
                entries: entries.into_iter().map(|(_, r)| r).collect(),
            })
        })
        .collect()
}

/// Canonical CSV for a set of snapshots.
pub fn emit_snapshots(snapshots: &[FieldSnapshot]) -> String {
    let mut sorted: Vec<&FieldSnapshot> = snapshots.iter().collect();
    sorted.sort_by(|a, b| (&a.esi_field, a.snapshot_date).cmp(&(&b.esi_field, b.snapshot_date)));
    let mut w = writer();
    w.write_record(SNAPSHOT_HEADER).expect("write");
    for snap in sorted {
        let date = snap.snapshot_date.format("%Y-%m-%d").to_string();
        for r in &snap.entries {
            w.write_record([
                date.as_str(),
                r.esi_field.as_str(),
                &r.rank_in_field.to_string(),
                &r.name,
                &r.papers.to_string(),
                &r.citations.to_string(),
            ])
            .expect("write");
        }
    }
    finish(w)
}
