use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{finish, read_rows, writer, ResearcherRecord, APPENDIX_HEADER};
use crate::error::{ErrorCode, IngestError};
use crate::field::{EsiField, FieldUniverse};
use crate::indicators::Hundredths;

/// One row of a published multidisciplinary list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixRow {
    pub global_rank: u32,
    pub record: ResearcherRecord,
    pub normalized_citations: u64,
    pub cpp: Hundredths,
}

/// Parses `rank,name,normalized,field,field_rank,papers,citations,cpp`.
/// Rows come back sorted by global rank, which must run 1..=n without gaps.
pub fn parse_appendix_fixture<R: Read>(
    source: R,
    universe: &FieldUniverse,
) -> Result<Vec<AppendixRow>, IngestError> {
    let rows = read_rows(source, APPENDIX_HEADER)?;
    let mut out = Vec::with_capacity(rows.len());
    let mut identities = HashSet::new();
    for row in &rows {
        let global_rank = row.count(0, "rank")?;
        if global_rank == 0 || global_rank > u32::MAX as u64 {
            return Err(row.err(ErrorCode::MalformedRow, "rank", "rank must be at least 1"));
        }
        let name = row.name(1, "name")?;
        let normalized = row.count(2, "normalized")?;
        let field = universe.resolve_esi(row.get(3)).ok_or_else(|| {
            row.err(
                ErrorCode::UnknownField,
                "field",
                format!("unknown field `{}`", row.get(3)),
            )
        })?;
        let field_rank = row.count(4, "field_rank")?;
        if field_rank == 0 || field_rank > u32::MAX as u64 {
            return Err(row.err(
                ErrorCode::MalformedRow,
                "field_rank",
                "rank must be at least 1",
            ));
        }
        let papers = row.count(5, "papers")?;
        let citations = row.count(6, "citations")?;
        let cpp: Hundredths = row.get(7).parse().map_err(|_| {
            row.err(
                ErrorCode::MalformedRow,
                "cpp",
                format!(
                    "expected a decimal with two fraction digits, got `{}`",
                    row.get(7)
                ),
            )
        })?;
        if papers == 0 && cpp.raw() != 0 {
            return Err(row.err(
                ErrorCode::CppMismatch,
                "cpp",
                "cpp is nonzero but papers is 0",
            ));
        }
        if !identities.insert((name.clone(), field.clone())) {
            return Err(row.err(
                ErrorCode::DuplicateKey,
                "name",
                format!("{name} listed twice in {field}"),
            ));
        }
        out.push((
            row.line,
            AppendixRow {
                global_rank: global_rank as u32,
                record: ResearcherRecord {
                    name,
                    esi_field: field,
                    rank_in_field: field_rank as u32,
                    papers,
                    citations,
                },
                normalized_citations: normalized,
                cpp,
            },
        ));
    }
    out.sort_by_key(|(_, r)| r.global_rank);
    for (i, (line, r)) in out.iter().enumerate() {
        let expected = i as u32 + 1;
        if r.global_rank != expected {
            let code = if r.global_rank < expected {
                ErrorCode::DuplicateKey
            } else {
                ErrorCode::RankGap
            };
            return Err(IngestError::new(
                code,
                *line,
                format!("expected global rank {expected}, found {}", r.global_rank),
            )
            .at_column("rank"));
        }
    }
    Ok(out.into_iter().map(|(_, r)| r).collect())
}

/// Regroups list rows into per-field lists ordered by in-field rank.
pub fn group_by_field(rows: &[AppendixRow]) -> BTreeMap<EsiField, Vec<ResearcherRecord>> {
    let mut out: BTreeMap<EsiField, Vec<ResearcherRecord>> = BTreeMap::new();
    for r in rows {
        out.entry(r.record.esi_field.clone())
            .or_default()
            .push(r.record.clone());
    }
    for list in out.values_mut() {
        list.sort_by(|a, b| (a.rank_in_field, &a.name).cmp(&(b.rank_in_field, &b.name)));
    }
    out
}

pub fn emit_appendix(rows: &[AppendixRow]) -> String {
    let mut sorted: Vec<&AppendixRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.global_rank);
    let mut w = writer();
    w.write_record(APPENDIX_HEADER).expect("write");
    for r in sorted {
        w.write_record([
            r.global_rank.to_string().as_str(),
            &r.record.name,
            &r.normalized_citations.to_string(),
            r.record.esi_field.as_str(),
            &r.record.rank_in_field.to_string(),
            &r.record.papers.to_string(),
            &r.record.citations.to_string(),
            &r.cpp.to_string(),
        ])
        .expect("write");
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn bundled() -> Vec<AppendixRow> {
        parse_appendix_fixture(data::APPENDIX_CSV.as_bytes(), &FieldUniverse::esi_default())
            .unwrap()
    }

    #[test]
    fn bundled_fixture_rows() {
        let rows = bundled();
        assert_eq!(rows.len(), 200);
        let first = &rows[0];
        assert_eq!(first.global_rank, 1);
        assert_eq!(first.record.name, "INOUE, A");
        assert_eq!(first.record.esi_field.as_str(), "Materials science");
        assert_eq!(first.record.rank_in_field, 1);
        assert_eq!((first.record.papers, first.record.citations), (655, 8315));
        assert_eq!(first.normalized_citations, 2495);
        assert_eq!(first.cpp.to_string(), "12.69");

        let r84 = &rows[83];
        assert_eq!(r84.record.name, "STAMPFER, MJ");
        assert_eq!(r84.record.esi_field.as_str(), "Clinical medicine");
        assert_eq!(
            (r84.record.citations, r84.normalized_citations),
            (30739, 788)
        );
    }

    #[test]
    fn truncated_fixture_is_contiguous() {
        let text: String = data::APPENDIX_CSV
            .lines()
            .take(200)
            .map(|l| format!("{l}\n"))
            .collect();
        let rows = parse_appendix_fixture(text.as_bytes(), &FieldUniverse::esi_default()).unwrap();
        assert_eq!(rows.len(), 199);
    }

    #[test]
    fn rank_gap_rejected() {
        let text: String = data::APPENDIX_CSV
            .lines()
            .enumerate()
            .filter(|(i, _)| *i != 5)
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        let err =
            parse_appendix_fixture(text.as_bytes(), &FieldUniverse::esi_default()).unwrap_err();
        assert_eq!(err.code, ErrorCode::RankGap);
    }

    #[test]
    fn cpp_without_papers_rejected() {
        let text = "rank,name,normalized,field,field_rank,papers,citations,cpp\n1,\"A, B\",10,Physics,1,0,100,3.00\n";
        let err =
            parse_appendix_fixture(text.as_bytes(), &FieldUniverse::esi_default()).unwrap_err();
        assert_eq!(err.code, ErrorCode::CppMismatch);
        let text = "rank,name,normalized,field,field_rank,papers,citations,cpp\n1,\"A, B\",10,Physics,1,3,100,3.3\n";
        let err =
            parse_appendix_fixture(text.as_bytes(), &FieldUniverse::esi_default()).unwrap_err();
        assert_eq!(err.column.as_deref(), Some("cpp"));
    }

    #[test]
    fn regroups_per_field() {
        let lists = group_by_field(&bundled());
        assert_eq!(lists.len(), 11);
        let space = &lists[&EsiField::new("Space science")];
        assert_eq!(space.len(), 68);
        assert!(space
            .iter()
            .enumerate()
            .all(|(i, r)| r.rank_in_field as usize == i + 1));
        assert_eq!(lists[&EsiField::new("Engineering")][0].name, "WANG, J");
    }
}
