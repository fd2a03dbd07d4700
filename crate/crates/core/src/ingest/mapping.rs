use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{finish, read_rows, writer, MAPPING_HEADER};
use crate::error::{ErrorCode, IngestError};
use crate::field::{EsiField, FieldUniverse, NsfField};

/// Total function from fine fields onto broad fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMapping {
    pairs: BTreeMap<EsiField, NsfField>,
}

impl FieldMapping {
    /// Builds a mapping without universe checks. Intended for tests and for
    /// callers that assemble a mapping in code.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (EsiField, NsfField)>) -> Self {
        FieldMapping {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, esi: &EsiField) -> Option<&NsfField> {
        self.pairs.get(esi)
    }

    /// Fine fields mapped onto `nsf`, in name order.
    pub fn members<'a>(&'a self, nsf: &'a NsfField) -> impl Iterator<Item = &'a EsiField> + 'a {
        self.pairs
            .iter()
            .filter(move |(_, n)| *n == nsf)
            .map(|(e, _)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EsiField, &NsfField)> {
        self.pairs.iter()
    }

    /// Distinct broad fields in name order.
    pub fn targets(&self) -> Vec<&NsfField> {
        let mut t: Vec<&NsfField> = self.pairs.values().collect();
        t.sort();
        t.dedup();
        t
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Parses `esi_field,nsf_field` rows. Every field in `esi_universe` must be
/// mapped exactly once onto a field of `nsf_universe`; identical repeated
/// rows are accepted.
pub fn parse_mapping<R: Read>(
    source: R,
    esi_universe: &FieldUniverse,
    nsf_universe: &FieldUniverse,
) -> Result<FieldMapping, IngestError> {
    let rows = read_rows(source, MAPPING_HEADER)?;
    let mut pairs = BTreeMap::new();
    for row in &rows {
        let esi = esi_universe.resolve_esi(row.get(0)).ok_or_else(|| {
            row.err(
                ErrorCode::UnknownField,
                "esi_field",
                format!("unknown ESI field `{}`", row.get(0)),
            )
        })?;
        let nsf = nsf_universe.resolve_nsf(row.get(1)).ok_or_else(|| {
            row.err(
                ErrorCode::UnknownField,
                "nsf_field",
                format!("unknown NSF field `{}`", row.get(1)),
            )
        })?;
        match pairs.get(&esi) {
            Some(existing) if *existing != nsf => {
                return Err(row.err(
                    ErrorCode::ConflictingMapping,
                    "nsf_field",
                    format!("{esi} is already mapped to {existing}, not {nsf}"),
                ));
            }
            _ => {
                pairs.insert(esi, nsf);
            }
        }
    }
    let missing: Vec<&str> = esi_universe
        .names()
        .filter(|n| !pairs.contains_key(&EsiField::new(*n)))
        .collect();
    if !missing.is_empty() {
        let end = rows.last().map_or(1, |r| r.line) + 1;
        return Err(IngestError::new(
            ErrorCode::IncompleteMapping,
            end,
            format!("no mapping for: {}", missing.join("; ")),
        ));
    }
    Ok(FieldMapping { pairs })
}

pub fn emit_mapping(mapping: &FieldMapping) -> String {
    let mut w = writer();
    w.write_record(MAPPING_HEADER).expect("write");
    for (esi, nsf) in mapping.iter() {
        w.write_record([esi.as_str(), nsf.as_str()]).expect("write");
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn parse(text: &str) -> Result<FieldMapping, IngestError> {
        parse_mapping(
            text.as_bytes(),
            &FieldUniverse::esi_default(),
            &FieldUniverse::nsf_default(),
        )
    }

    #[test]
    fn bundled_mapping_matches_published_table() {
        let m = parse(data::FIELD_MAPPING_CSV).unwrap();
        assert_eq!(m.len(), 22);
        assert_eq!(
            m.get(&EsiField::new("Agriculture")).unwrap().as_str(),
            "Biology"
        );
        assert_eq!(
            m.get(&EsiField::new("Multidisciplinary")).unwrap().as_str(),
            "Engineering and technology"
        );
        assert_eq!(
            m.get(&EsiField::new("Environment and ecology"))
                .unwrap()
                .as_str(),
            "Earth and space sciences"
        );
        assert_eq!(m.targets().len(), 9);
        let clinical = NsfField::new("Clinical medicine");
        assert_eq!(m.members(&clinical).count(), 5);
    }

    #[test]
    fn missing_row_is_incomplete() {
        let text: String = data::FIELD_MAPPING_CSV
            .lines()
            .filter(|l| !l.starts_with("Space sciences"))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = parse(&text).unwrap_err();
        assert_eq!(err.code, ErrorCode::IncompleteMapping);
        assert!(err.message.contains("Space science"));
    }

    #[test]
    fn identical_duplicate_accepted_conflict_rejected() {
        let dup = format!("{}Chemistry,Chemistry\n", data::FIELD_MAPPING_CSV);
        assert_eq!(
            parse(&dup).unwrap(),
            parse(data::FIELD_MAPPING_CSV).unwrap()
        );
        let conflict = format!("{}Chemistry,Physics\n", data::FIELD_MAPPING_CSV);
        let err = parse(&conflict).unwrap_err();
        assert_eq!(err.code, ErrorCode::ConflictingMapping);
        assert_eq!(err.line, 24);
    }

    #[test]
    fn unknown_names_rejected() {
        let err = parse("esi_field,nsf_field\nAstrology,Physics\n").unwrap_err();
        assert_eq!(
            (err.code, err.column.as_deref()),
            (ErrorCode::UnknownField, Some("esi_field"))
        );
        let err = parse("esi_field,nsf_field\nPhysics,Astrology\n").unwrap_err();
        assert_eq!(
            (err.code, err.column.as_deref()),
            (ErrorCode::UnknownField, Some("nsf_field"))
        );
    }
}
