//! Cross-field citation ratios and the divisor table derived from them.
//!
//! Two ratio families are computed against a base field (mathematics):
//!
//! * **T**, from yearly total citation counts: the mean over shared years of
//!   `total(field, y) / total(base, y)`.
//! * **H**, from monthly top-k lists: the top-k citation vectors of all fine
//!   fields mapped onto the same broad field are added elementwise per date,
//!   every element of every date is pooled into one mean level, and the level
//!   is divided by the base level.
//!
//! The divisor table assigns each fine field the exact rational its citation
//! counts are divided by before merging.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::data;
use crate::error::{Error, ErrorCode, IngestError};
use crate::field::{EsiField, FieldUniverse, NsfField};
use crate::ingest::{self, FieldMapping, FieldSnapshot, FieldTotalsSeries};
use crate::rational::Rational;

/// Mean ratio of each series to the base series over the years both cover.
pub fn compute_t_ratios(
    series: &[FieldTotalsSeries],
    base: &NsfField,
) -> Result<BTreeMap<NsfField, f64>, Error> {
    let mut by_field: BTreeMap<&NsfField, &FieldTotalsSeries> = BTreeMap::new();
    for s in series {
        if by_field.insert(&s.nsf_field, s).is_some() {
            return Err(Error::Duplicate(format!(
                "totals series for {}",
                s.nsf_field
            )));
        }
    }
    let base_series = by_field
        .get(base)
        .ok_or_else(|| Error::MissingBase(base.to_string()))?;

    let mut out = BTreeMap::new();
    for (field, s) in &by_field {
        if *field == base {
            out.insert(base.clone(), 1.0);
            continue;
        }
        let mut sum = 0.0;
        let mut shared = 0usize;
        for (year, total) in &s.points {
            let Some(&base_total) = base_series.points.get(year) else {
                continue;
            };
            if base_total == 0 {
                return Err(Error::ZeroBase {
                    field: base.to_string(),
                    context: format!("in {year}"),
                });
            }
            sum += *total as f64 / base_total as f64;
            shared += 1;
        }
        if shared == 0 {
            return Err(Error::NoSharedYears(field.to_string()));
        }
        out.insert((*field).clone(), sum / shared as f64);
    }
    Ok(out)
}

/// Elementwise sum of the top-k vectors of every fine field mapped onto one
/// broad field, at one snapshot date.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedVector {
    pub nsf_field: NsfField,
    pub snapshot_date: NaiveDate,
    pub values: Vec<u64>,
}

/// Adds up the per-date citation vectors of fine fields sharing a broad
/// field.
///
/// With `k = None` every list must have the same length, which becomes k.
/// With `k = Some(n)` longer lists are cut to their top n and shorter lists
/// are rejected. All snapshots must cover the same citation window.
pub fn aggregate_top_vectors(
    snapshots: &[FieldSnapshot],
    mapping: &FieldMapping,
    k: Option<usize>,
) -> Result<Vec<AggregatedVector>, Error> {
    let Some(first) = snapshots.first() else {
        return Ok(Vec::new());
    };
    if let Some(other) = snapshots
        .iter()
        .find(|s| s.window_years != first.window_years)
    {
        return Err(Error::MixedWindow(first.window_years, other.window_years));
    }
    let k = match k {
        Some(0) => return Err(Error::InvalidParameter("k must be at least 1".into())),
        Some(k) => {
            if let Some(short) = snapshots.iter().find(|s| s.len() < k) {
                return Err(Error::MixedListLength(format!(
                    "{} on {} has {} entries, fewer than k = {k}",
                    short.esi_field,
                    short.snapshot_date,
                    short.len()
                )));
            }
            k
        }
        None => {
            if let Some(other) = snapshots.iter().find(|s| s.len() != first.len()) {
                return Err(Error::MixedListLength(format!(
                    "{} on {} has {} entries but {} on {} has {}",
                    first.esi_field,
                    first.snapshot_date,
                    first.len(),
                    other.esi_field,
                    other.snapshot_date,
                    other.len()
                )));
            }
            first.len()
        }
    };

    let mut seen = HashSet::new();
    let mut sums: BTreeMap<(NsfField, NaiveDate), Vec<u64>> = BTreeMap::new();
    for snap in snapshots {
        if !seen.insert((&snap.esi_field, snap.snapshot_date)) {
            return Err(Error::Duplicate(format!(
                "snapshot for {} on {}",
                snap.esi_field, snap.snapshot_date
            )));
        }
        let nsf = mapping
            .get(&snap.esi_field)
            .ok_or_else(|| Error::UnmappedField(snap.esi_field.to_string()))?;
        let acc = sums
            .entry((nsf.clone(), snap.snapshot_date))
            .or_insert_with(|| vec![0; k]);
        for (slot, rec) in acc.iter_mut().zip(&snap.entries) {
            *slot += rec.citations;
        }
    }
    Ok(sums
        .into_iter()
        .map(|((nsf_field, snapshot_date), values)| AggregatedVector {
            nsf_field,
            snapshot_date,
            values,
        })
        .collect())
}

/// Mean top-k level per broad field, and that level relative to the base.
pub type LevelsAndRatios = (BTreeMap<NsfField, f64>, BTreeMap<NsfField, f64>);

/// Pooled mean level per broad field, and the level relative to `base`.
pub fn compute_h_ratios(
    aggregated: &[AggregatedVector],
    base: &NsfField,
) -> Result<LevelsAndRatios, Error> {
    let mut pooled: BTreeMap<&NsfField, (u128, u64)> = BTreeMap::new();
    for v in aggregated {
        let e = pooled.entry(&v.nsf_field).or_default();
        e.0 += v.values.iter().map(|x| *x as u128).sum::<u128>();
        e.1 += v.values.len() as u64;
    }
    let &(base_sum, base_n) = pooled
        .get(base)
        .filter(|(_, n)| *n > 0)
        .ok_or_else(|| Error::MissingBase(base.to_string()))?;
    if base_sum == 0 {
        return Err(Error::ZeroBase {
            field: base.to_string(),
            context: "in every aggregated vector".into(),
        });
    }
    let base_level = base_sum as f64 / base_n as f64;
    let mut levels = BTreeMap::new();
    let mut ratios = BTreeMap::new();
    for (field, (sum, n)) in pooled {
        if n == 0 {
            continue;
        }
        let level = if field == base {
            base_level
        } else {
            sum as f64 / n as f64
        };
        let ratio = if field == base {
            1.0
        } else {
            // sum * base_n / (n * base_sum) in one division
            (sum as f64 * base_n as f64) / (n as f64 * base_sum as f64)
        };
        levels.insert(field.clone(), level);
        ratios.insert(field.clone(), ratio);
    }
    Ok((levels, ratios))
}

/// Nearest integer with halves rounded away from zero, as ratio tables are
/// displayed.
pub fn display_round(x: f64) -> i64 {
    x.round() as i64
}

/// Where the per-field divisors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisorPreset {
    /// The published integer H column, via the field mapping.
    #[serde(rename = "table2")]
    MappingTargets,
    /// `2T/3` from the published T column.
    TwoThirds,
    /// The divisors that reproduce the published multidisciplinary list.
    Appendix,
    /// H ratios computed from snapshot data.
    Data,
}

impl DivisorPreset {
    pub const ALL: [DivisorPreset; 4] = [
        DivisorPreset::MappingTargets,
        DivisorPreset::TwoThirds,
        DivisorPreset::Appendix,
        DivisorPreset::Data,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DivisorPreset::MappingTargets => "table2",
            DivisorPreset::TwoThirds => "two_thirds",
            DivisorPreset::Appendix => "appendix",
            DivisorPreset::Data => "data",
        }
    }
}

impl fmt::Display for DivisorPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DivisorPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DivisorPreset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Broad-field divisors recovered from the published list. Fields absent
/// from that list (social sciences, biomedical research) take 2T/3 and the
/// clinical value respectively.
const APPENDIX_GROUP_DIVISORS: &[(&str, u64, u64)] = &[
    ("Biology", 16, 3),
    ("Biomedical research", 39, 1),
    ("Chemistry", 10, 1),
    ("Clinical medicine", 39, 1),
    ("Earth and space sciences", 6, 1),
    ("Engineering and technology", 10, 3),
    ("Mathematics", 1, 1),
    ("Physics", 38, 3),
    ("Social/behavioral sciences", 26, 3),
];

/// Fine fields whose recovered divisor differs from their broad group.
const APPENDIX_FIELD_OVERRIDES: &[(&str, u64, u64)] = &[("Environment and ecology", 16, 3)];

/// Default denominator for `data` divisors.
pub const DEFAULT_DATA_DENOMINATOR: u64 = 3;

/// Exact divisor per fine field.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DivisorTable {
    divisors: BTreeMap<EsiField, Rational>,
}

impl DivisorTable {
    /// Zero divisors are rejected.
    pub fn new(divisors: impl IntoIterator<Item = (EsiField, Rational)>) -> Result<Self, Error> {
        let divisors: BTreeMap<_, _> = divisors.into_iter().collect();
        if let Some((f, _)) = divisors.iter().find(|(_, d)| d.is_zero()) {
            return Err(Error::InvalidParameter(format!("divisor for {f} is zero")));
        }
        Ok(DivisorTable { divisors })
    }

    pub fn get(&self, field: &EsiField) -> Option<Rational> {
        self.divisors.get(field).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EsiField, &Rational)> {
        self.divisors.iter()
    }

    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    /// Every divisor multiplied by `factor`.
    pub fn scaled(&self, factor: Rational) -> Result<Self, Error> {
        DivisorTable::new(
            self.divisors
                .iter()
                .map(|(f, d)| (f.clone(), d.mul(factor))),
        )
    }
}

/// Builds the divisor table for every fine field in `mapping`.
///
/// `h_ratios` is required for [`DivisorPreset::Data`]; its values are snapped
/// to the nearest multiple of `1 / data_denominator`.
pub fn build_divisor_table(
    preset: DivisorPreset,
    mapping: &FieldMapping,
    h_ratios: Option<&BTreeMap<NsfField, f64>>,
    data_denominator: u64,
) -> Result<DivisorTable, Error> {
    let group = |table: &[(&str, u64, u64)], name: &str| {
        table
            .iter()
            .find(|(n, _, _)| *n == name)
            .and_then(|(_, num, den)| Rational::new(*num, *den))
    };
    let mut out = Vec::with_capacity(mapping.len());
    for (esi, nsf) in mapping.iter() {
        let missing = || Error::MissingDivisor(format!("{esi} (mapped to {nsf})"));
        let divisor = match preset {
            DivisorPreset::MappingTargets => data::reference_h(nsf).map(Rational::from_integer),
            DivisorPreset::TwoThirds => {
                data::reference_t(nsf).and_then(|t| Rational::new(2 * t, 3))
            }
            DivisorPreset::Appendix => group(APPENDIX_FIELD_OVERRIDES, esi.as_str())
                .or_else(|| group(APPENDIX_GROUP_DIVISORS, nsf.as_str())),
            DivisorPreset::Data => {
                let ratios = h_ratios.ok_or_else(|| {
                    Error::InvalidParameter("the data preset needs computed H ratios".into())
                })?;
                match ratios.get(nsf) {
                    Some(h) => {
                        Some(Rational::approximate(*h, data_denominator).ok_or_else(|| {
                            Error::InvalidParameter(format!("cannot represent H = {h} for {nsf}"))
                        })?)
                    }
                    None => None,
                }
            }
        }
        .ok_or_else(missing)?;
        if divisor.is_zero() {
            return Err(Error::InvalidParameter(format!(
                "divisor for {esi} rounds to zero"
            )));
        }
        out.push((esi.clone(), divisor));
    }
    DivisorTable::new(out)
}

pub const DIVISOR_HEADER: &[&str] = &["esi_field", "divisor_num", "divisor_den"];

/// Parses `esi_field,divisor_num,divisor_den`.
pub fn parse_divisor_table<R: Read>(
    source: R,
    universe: &FieldUniverse,
) -> Result<DivisorTable, IngestError> {
    let rows = ingest::read_rows(source, DIVISOR_HEADER)?;
    let mut divisors = BTreeMap::new();
    for row in &rows {
        let field = universe.resolve_esi(row.get(0)).ok_or_else(|| {
            row.err(
                ErrorCode::UnknownField,
                "esi_field",
                format!("unknown field `{}`", row.get(0)),
            )
        })?;
        let num = row.count(1, "divisor_num")?;
        let den = row.count(2, "divisor_den")?;
        if num == 0 {
            return Err(row.err(
                ErrorCode::NonPositive,
                "divisor_num",
                "divisor must be positive",
            ));
        }
        let d = Rational::new(num, den).ok_or_else(|| {
            row.err(
                ErrorCode::NonPositive,
                "divisor_den",
                "denominator must be positive",
            )
        })?;
        if divisors.insert(field.clone(), d).is_some() {
            return Err(row.err(
                ErrorCode::DuplicateKey,
                "esi_field",
                format!("{field} listed twice"),
            ));
        }
    }
    Ok(DivisorTable { divisors })
}

pub fn emit_divisor_table(table: &DivisorTable) -> String {
    let mut w = ingest::writer();
    w.write_record(DIVISOR_HEADER).expect("write");
    for (f, d) in table.iter() {
        w.write_record([f.as_str(), &d.numer().to_string(), &d.denom().to_string()])
            .expect("write");
    }
    ingest::finish(w)
}

/// Everything the ratio stage produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub base_field: NsfField,
    pub t_ratios: BTreeMap<NsfField, f64>,
    pub h_levels: BTreeMap<NsfField, f64>,
    pub h_ratios: BTreeMap<NsfField, f64>,
    pub divisors: DivisorTable,
}
