use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{finish, read_rows, writer, TOTALS_HEADER};
use crate::error::{ErrorCode, IngestError};
use crate::field::{FieldUniverse, NsfField};

/// Yearly total citation counts for one broad field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldTotalsSeries {
    pub nsf_field: NsfField,
    pub points: BTreeMap<i32, u64>,
}

/// Parses `year,nsf_field,total_citations` rows into one series per field,
/// sorted by field name.
pub fn parse_field_totals<R: Read>(
    source: R,
    universe: &FieldUniverse,
) -> Result<Vec<FieldTotalsSeries>, IngestError> {
    let rows = read_rows(source, TOTALS_HEADER)?;
    let mut series: BTreeMap<NsfField, BTreeMap<i32, u64>> = BTreeMap::new();
    for row in &rows {
        let raw_year = row.get(0);
        let year: i32 = raw_year
            .parse()
            .ok()
            .filter(|y| (0..=9999).contains(y) && raw_year.len() == 4)
            .ok_or_else(|| {
                row.err(
                    ErrorCode::MalformedRow,
                    "year",
                    format!("expected a four-digit year, got `{raw_year}`"),
                )
            })?;
        let field = universe.resolve_nsf(row.get(1)).ok_or_else(|| {
            row.err(
                ErrorCode::UnknownField,
                "nsf_field",
                format!("unknown field `{}`", row.get(1)),
            )
        })?;
        let total = row.count(2, "total_citations")?;
        let points = series.entry(field.clone()).or_default();
        if points.insert(year, total).is_some() {
            return Err(row.err(
                ErrorCode::DuplicateKey,
                "year",
                format!("{field} already has a total for {year}"),
            ));
        }
    }
    Ok(series
        .into_iter()
        .map(|(nsf_field, points)| FieldTotalsSeries { nsf_field, points })
        .collect())
}

pub fn emit_field_totals(series: &[FieldTotalsSeries]) -> String {
    let mut rows: Vec<(i32, &str, u64)> = series
        .iter()
        .flat_map(|s| {
            s.points
                .iter()
                .map(move |(y, t)| (*y, s.nsf_field.as_str(), *t))
        })
        .collect();
    rows.sort();
    let mut w = writer();
    w.write_record(TOTALS_HEADER).expect("write");
    for (year, field, total) in rows {
        w.write_record([year.to_string().as_str(), field, &total.to_string()])
            .expect("write");
    }
    finish(w)
}
