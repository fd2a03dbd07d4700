//! Normalization, merging and clustering of per-field researcher lists.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::EsiField;
use crate::indicators::flag_aggregation;
use crate::ingest::ResearcherRecord;
use crate::ratio::DivisorTable;
use crate::rational::Rational;

/// Default relative gap that separates two clusters.
pub const DEFAULT_CLUSTER_EPSILON: f64 = 0.005;

pub const DEFAULT_TOP_PER_FIELD: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityFlag {
    /// Paper output too high for one person; the name probably merges
    /// several researchers.
    ProbableNameAggregation,
}

impl QualityFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            QualityFlag::ProbableNameAggregation => "probable_name_aggregation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedEntry {
    pub global_rank: u32,
    pub record: ResearcherRecord,
    pub normalized_citations: u64,
    pub normalized_exact: Rational,
    pub cluster_id: u32,
    pub flags: BTreeSet<QualityFlag>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedList {
    pub entries: Vec<MergedEntry>,
    pub divisor_preset: String,
    pub top_per_field: usize,
}

/// `citations / divisor`, exactly and rounded half away from zero.
pub fn normalize_score(
    record: &ResearcherRecord,
    divisors: &DivisorTable,
) -> Result<(Rational, u64), Error> {
    let divisor = divisors
        .get(&record.esi_field)
        .ok_or_else(|| Error::MissingDivisor(record.esi_field.to_string()))?;
    let exact = divisor.divide(record.citations).ok_or_else(|| {
        Error::InvalidParameter(format!("cannot divide {} by {divisor}", record.citations))
    })?;
    Ok((exact, exact.round_half_away()))
}

/// Truncates every list to its `top_per_field` best-ranked entries,
/// normalizes them and sorts the union by normalized score (descending),
/// exact score (descending), name, then field.
///
/// Clusters are assigned with [`DEFAULT_CLUSTER_EPSILON`]; call
/// [`cluster_groups`] to use another gap.
pub fn merge_rank<I, L>(
    lists: I,
    divisors: &DivisorTable,
    top_per_field: usize,
    divisor_preset: &str,
) -> Result<MergedList, Error>
where
    I: IntoIterator<Item = L>,
    L: AsRef<[ResearcherRecord]>,
{
    if top_per_field == 0 {
        return Err(Error::InvalidParameter(
            "top_per_field must be at least 1".into(),
        ));
    }
    let mut identities: HashSet<(String, EsiField)> = HashSet::new();
    let mut entries = Vec::new();
    for list in lists {
        let mut list: Vec<&ResearcherRecord> = list.as_ref().iter().collect();
        list.sort_by(|a, b| (a.rank_in_field, &a.name).cmp(&(b.rank_in_field, &b.name)));
        for record in list.into_iter().take(top_per_field) {
            if !identities.insert((record.name.clone(), record.esi_field.clone())) {
                return Err(Error::Duplicate(format!(
                    "{} in {}",
                    record.name, record.esi_field
                )));
            }
            let (exact, rounded) = normalize_score(record, divisors)?;
            entries.push(MergedEntry {
                global_rank: 0,
                record: record.clone(),
                normalized_citations: rounded,
                normalized_exact: exact,
                cluster_id: 1,
                flags: BTreeSet::new(),
            });
        }
    }
    entries.sort_by(|a, b| {
        b.normalized_citations
            .cmp(&a.normalized_citations)
            .then_with(|| b.normalized_exact.cmp(&a.normalized_exact))
            .then_with(|| a.record.name.cmp(&b.record.name))
            .then_with(|| a.record.esi_field.cmp(&b.record.esi_field))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.global_rank = i as u32 + 1;
    }
    let merged = MergedList {
        entries,
        divisor_preset: divisor_preset.to_string(),
        top_per_field,
    };
    cluster_groups(merged, DEFAULT_CLUSTER_EPSILON)
}

/// Walks the list in rank order and opens a new cluster whenever the
/// relative drop `(prev - cur) / max(prev, 1)` of the exact scores exceeds
/// `epsilon`.
pub fn cluster_groups(mut merged: MergedList, epsilon: f64) -> Result<MergedList, Error> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cluster epsilon must be non-negative, got {epsilon}"
        )));
    }
    let mut cluster = 1;
    let mut prev: Option<f64> = None;
    for e in &mut merged.entries {
        let cur = e.normalized_exact.to_f64();
        if let Some(p) = prev {
            if (p - cur) / p.max(1.0) > epsilon {
                cluster += 1;
            }
        }
        e.cluster_id = cluster;
        prev = Some(cur);
    }
    Ok(merged)
}

impl MergedList {
    pub fn cluster_count(&self) -> u32 {
        self.entries.last().map_or(0, |e| e.cluster_id)
    }

    /// Marks entries whose papers-per-year rate reaches `threshold`.
    pub fn flag_aggregation(&mut self, window_years: f64, threshold: f64) -> Result<(), Error> {
        for e in &mut self.entries {
            let (flagged, _) = flag_aggregation(e.record.papers, window_years, threshold)?;
            if flagged {
                e.flags.insert(QualityFlag::ProbableNameAggregation);
            } else {
                e.flags.remove(&QualityFlag::ProbableNameAggregation);
            }
        }
        Ok(())
    }
}

/// Fields whose in-field leader sits within the global top `n`.
pub fn leader_coverage(merged: &MergedList, n: u32) -> BTreeSet<EsiField> {
    merged
        .entries
        .iter()
        .filter(|e| e.global_rank <= n && e.record.rank_in_field == 1)
        .map(|e| e.record.esi_field.clone())
        .collect()
}
