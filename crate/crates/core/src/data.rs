//! Bundled reference data.
//!
//! * `field_mapping.csv`: the 22 ESI fields mapped onto the 9 NSF fields.
//! * `appendix.csv`: the published 200-row multidisciplinary list.
//! * `hratio_snapshots.csv`: 24 synthetic monthly top-10 lists per ESI field
//!   whose aggregated levels reproduce the published H ratios.
//! * `field_totals.csv`: synthetic yearly totals per NSF field whose mean
//!   ratios to mathematics reproduce the published T ratios.
//! * `published_pairs.csv`: the published (T, H) pairs.
//!
//! The two synthetic files are produced by `scripts/gen_fixtures.py`.

use crate::field::{FieldUniverse, NsfField};
use crate::ingest::{
    self, AppendixRow, FieldMapping, FieldSnapshot, FieldTotalsSeries, SnapshotSchema,
};

pub const FIELD_MAPPING_CSV: &str = include_str!("../data/field_mapping.csv");
pub const APPENDIX_CSV: &str = include_str!("../data/appendix.csv");
pub const HRATIO_SNAPSHOTS_CSV: &str = include_str!("../data/hratio_snapshots.csv");
pub const FIELD_TOTALS_CSV: &str = include_str!("../data/field_totals.csv");
pub const PUBLISHED_PAIRS_CSV: &str = include_str!("../data/published_pairs.csv");

/// Published average ratio of total citations to mathematics, per NSF field.
pub const REFERENCE_T: &[(&str, u64)] = &[
    ("Biology", 8),
    ("Biomedical research", 78),
    ("Chemistry", 15),
    ("Clinical medicine", 78),
    ("Earth and space sciences", 9),
    ("Engineering and technology", 5),
    ("Mathematics", 1),
    ("Physics", 19),
    ("Social/behavioral sciences", 13),
];

/// Published top-ten citation level ratio to mathematics, per NSF field.
pub const REFERENCE_H: &[(&str, u64)] = &[
    ("Biology", 5),
    ("Biomedical research", 37),
    ("Chemistry", 10),
    ("Clinical medicine", 37),
    ("Earth and space sciences", 6),
    ("Engineering and technology", 3),
    ("Mathematics", 1),
    ("Physics", 12),
    ("Social/behavioral sciences", 9),
];

fn lookup(table: &[(&str, u64)], field: &NsfField) -> Option<u64> {
    table
        .iter()
        .find(|(name, _)| *name == field.as_str())
        .map(|(_, v)| *v)
}

pub fn reference_t(field: &NsfField) -> Option<u64> {
    lookup(REFERENCE_T, field)
}

pub fn reference_h(field: &NsfField) -> Option<u64> {
    lookup(REFERENCE_H, field)
}

pub fn default_mapping() -> FieldMapping {
    ingest::parse_mapping(
        FIELD_MAPPING_CSV.as_bytes(),
        &FieldUniverse::esi_default(),
        &FieldUniverse::nsf_default(),
    )
    .expect("bundled mapping is valid")
}

pub fn appendix_rows() -> Vec<AppendixRow> {
    ingest::parse_appendix_fixture(APPENDIX_CSV.as_bytes(), &FieldUniverse::esi_default())
        .expect("bundled appendix is valid")
}

pub fn hratio_snapshots() -> Vec<FieldSnapshot> {
    ingest::parse_snapshots(HRATIO_SNAPSHOTS_CSV.as_bytes(), &SnapshotSchema::default())
        .expect("bundled snapshots are valid")
}

pub fn field_totals() -> Vec<FieldTotalsSeries> {
    ingest::parse_field_totals(FIELD_TOTALS_CSV.as_bytes(), &FieldUniverse::nsf_default())
        .expect("bundled totals are valid")
}
