//! Per-researcher auxiliary indicators.
//!
//! Citations per paper (CPP) follows the published list's display rule: two
//! fraction digits, halves rounded away from zero. Citations per meaningful
//! paper (CPMP) averages only over papers that pass a threshold, either a
//! fixed citation count or the researcher's own h most-cited papers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::ingest::{PaperProfile, ResearcherRecord, DEFAULT_WINDOW_YEARS};

/// A non-negative decimal with exactly two fraction digits, stored as an
/// integer count of hundredths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hundredths(u64);

impl Hundredths {
    pub fn from_raw(hundredths: u64) -> Self {
        Hundredths(hundredths)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Hundredths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseHundredthsError;

impl fmt::Display for ParseHundredthsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected digits, a point and exactly two fraction digits")
    }
}

impl std::error::Error for ParseHundredthsError {}

impl FromStr for Hundredths {
    type Err = ParseHundredthsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (whole, frac) = s.split_once('.').ok_or(ParseHundredthsError)?;
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        if !digits(whole) || frac.len() != 2 || !digits(frac) {
            return Err(ParseHundredthsError);
        }
        let whole: u64 = whole.parse().map_err(|_| ParseHundredthsError)?;
        let frac: u64 = frac.parse().map_err(|_| ParseHundredthsError)?;
        whole
            .checked_mul(100)
            .and_then(|w| w.checked_add(frac))
            .map(Hundredths)
            .ok_or(ParseHundredthsError)
    }
}

impl Serialize for Hundredths {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Hundredths {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Citations per paper, rounded half away from zero to two digits.
pub fn cpp(citations: u64, papers: u64) -> Result<Hundredths, Error> {
    if papers == 0 {
        return Err(Error::NonPositive("papers", 0.0));
    }
    let (c, p) = (citations as u128, papers as u128);
    Ok(Hundredths(((200 * c + p) / (2 * p)) as u64))
}

/// Largest h such that h papers have at least h citations each.
pub fn h_index(profile: &PaperProfile) -> u32 {
    h_index_of(&profile.paper_citations)
}

pub(crate) fn h_index_of(counts: &[u64]) -> u32 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|(i, c)| **c > *i as u64)
        .count() as u32
}

/// Which papers count as meaningful.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "threshold")]
pub enum CpmpMode {
    /// Papers with at least this many citations.
    Threshold(f64),
    /// The h most-cited papers, h being the researcher's h-index.
    #[default]
    HIndex,
}

/// Mean citations over the meaningful papers; `None` when there are none.
pub fn cpmp(profile: &PaperProfile, mode: CpmpMode) -> Result<Option<f64>, Error> {
    let mut counts = profile.paper_citations.clone();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let meaningful: &[u64] = match mode {
        CpmpMode::Threshold(t) => {
            if t.is_nan() || t < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "CPMP threshold must be non-negative, got {t}"
                )));
            }
            let n = counts.iter().take_while(|c| **c as f64 >= t).count();
            &counts[..n]
        }
        CpmpMode::HIndex => &counts[..h_index_of(&counts) as usize],
    };
    if meaningful.is_empty() {
        return Ok(None);
    }
    let sum: u128 = meaningful.iter().map(|c| *c as u128).sum();
    Ok(Some(sum as f64 / meaningful.len() as f64))
}

/// Default papers-per-year rate above which a name is suspected to merge
/// several people.
pub const DEFAULT_AGGREGATION_THRESHOLD: f64 = 100.0;

/// Returns `(flagged, papers_per_year)`; flagged iff the rate reaches
/// `threshold`.
pub fn flag_aggregation(
    papers: u64,
    window_years: f64,
    threshold: f64,
) -> Result<(bool, f64), Error> {
    if !(window_years > 0.0 && window_years.is_finite()) {
        return Err(Error::NonPositive("window_years", window_years));
    }
    let rate = papers as f64 / window_years;
    Ok((rate >= threshold, rate))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorConfig {
    pub cpmp_mode: CpmpMode,
    pub aggregation_threshold: f64,
    pub window_years: f64,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        IndicatorConfig {
            cpmp_mode: CpmpMode::HIndex,
            aggregation_threshold: DEFAULT_AGGREGATION_THRESHOLD,
            window_years: DEFAULT_WINDOW_YEARS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSet {
    /// Absent when the record has no papers.
    pub cpp: Option<Hundredths>,
    pub h_index: Option<u32>,
    pub cpmp: Option<f64>,
    pub aggregation_flagged: bool,
    pub papers_per_year: f64,
}

/// Indicators for one record. `profile`, when given, supplies the per-paper
/// counts for the h-index and CPMP.
pub fn indicators_for(
    record: &ResearcherRecord,
    profile: Option<&PaperProfile>,
    config: &IndicatorConfig,
) -> Result<IndicatorSet, Error> {
    let cpp = (record.papers > 0)
        .then(|| cpp(record.citations, record.papers))
        .transpose()?;
    let (aggregation_flagged, papers_per_year) = flag_aggregation(
        record.papers,
        config.window_years,
        config.aggregation_threshold,
    )?;
    let (h_index, cpmp) = match profile {
        Some(p) => (Some(h_index(p)), cpmp(p, config.cpmp_mode)?),
        None => (None, None),
    };
    Ok(IndicatorSet {
        cpp,
        h_index,
        cpmp,
        aggregation_flagged,
        papers_per_year,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Tries every candidate h against the definition directly.
    fn h_oracle(counts: &[u64]) -> u32 {
        (0..=counts.len() as u64)
            .filter(|&h| counts.iter().filter(|&&c| c >= h).count() as u64 >= h)
            .max()
            .unwrap_or(0) as u32
    }

    fn profile(counts: &[u64]) -> PaperProfile {
        PaperProfile::new("X, Y", counts.to_vec())
    }

    #[test]
    fn cpp_examples() {
        assert_eq!(cpp(8315, 655).unwrap().to_string(), "12.69");
        assert_eq!(cpp(13399, 267).unwrap().to_string(), "50.18");
        assert_eq!(cpp(10, 10).unwrap().to_string(), "1.00");
        assert_eq!(cpp(1, 8).unwrap().to_string(), "0.13"); // 0.125
        assert!(cpp(5, 0).is_err());
    }

    #[test]
    fn hundredths_parse_is_strict() {
        assert_eq!("12.69".parse::<Hundredths>().unwrap().raw(), 1269);
        assert_eq!("0.05".parse::<Hundredths>().unwrap().to_string(), "0.05");
        for bad in ["12.7", "12", ".50", "1.234", "-1.00", "a.bc", "1.-1"] {
            assert!(bad.parse::<Hundredths>().is_err(), "{bad}");
        }
    }

    #[test]
    fn h_index_examples() {
        assert_eq!(h_index(&profile(&[])), 0);
        assert_eq!(h_oracle(&[10, 8, 5, 4, 3]), 4);
        assert_eq!(h_index(&profile(&[10, 8, 5, 4, 3])), 4);
        assert_eq!(h_index(&profile(&[1, 1, 1])), 1);
        assert_eq!(h_index(&profile(&[0, 0])), 0);
        assert_eq!(h_index(&profile(&[100])), 1);
    }

    #[test]
    fn cpmp_examples() {
        let p = profile(&[10, 8, 5, 4, 3]);
        let fixed = cpmp(&p, CpmpMode::Threshold(5.0)).unwrap().unwrap();
        assert!((fixed - 23.0 / 3.0).abs() < 1e-12);
        assert_eq!(cpmp(&p, CpmpMode::HIndex).unwrap(), Some(6.75));
        assert_eq!(cpmp(&profile(&[]), CpmpMode::HIndex).unwrap(), None);
        assert_eq!(cpmp(&profile(&[]), CpmpMode::Threshold(0.0)).unwrap(), None);
        assert_eq!(cpmp(&p, CpmpMode::Threshold(11.0)).unwrap(), None);
        assert!(cpmp(&p, CpmpMode::Threshold(-1.0)).is_err());
    }

    #[test]
    fn aggregation_flag_examples() {
        assert_eq!(flag_aggregation(1000, 10.0, 100.0).unwrap(), (true, 100.0));
        let (flag, rate) = flag_aggregation(1075, DEFAULT_WINDOW_YEARS, 100.0).unwrap();
        assert!(flag);
        assert!((rate - 105.74).abs() < 0.01);
        assert!(!flag_aggregation(31, DEFAULT_WINDOW_YEARS, 100.0).unwrap().0);
        assert!(flag_aggregation(31, 0.0, 100.0).is_err());
        assert!(flag_aggregation(31, -1.0, 100.0).is_err());
    }

    #[test]
    fn indicators_without_profile() {
        let rec = ResearcherRecord {
            name: "WANG, J".into(),
            esi_field: crate::field::EsiField::new("Chemistry"),
            rank_in_field: 6,
            papers: 1075,
            citations: 9897,
        };
        let set = indicators_for(&rec, None, &IndicatorConfig::default()).unwrap();
        assert_eq!(set.cpp.unwrap().to_string(), "9.21");
        assert!(set.aggregation_flagged);
        assert_eq!((set.h_index, set.cpmp), (None, None));
    }

    proptest! {
        #[test]
        fn h_index_matches_oracle(counts in prop::collection::vec(0u64..=1000, 0..=50)) {
            prop_assert_eq!(h_index(&profile(&counts)), h_oracle(&counts));
        }

        #[test]
        fn h_index_monotone(counts in prop::collection::vec(0u64..=200, 0..=40), extra in 0u64..=200, bump in 0u64..=50, idx in 0usize..40) {
            let h = h_index(&profile(&counts));
            let mut more = counts.clone();
            more.push(extra);
            prop_assert!(h_index(&profile(&more)) >= h);
            if !counts.is_empty() {
                let mut bumped = counts.clone();
                let i = idx % counts.len();
                bumped[i] += bump;
                prop_assert!(h_index(&profile(&bumped)) >= h);
            }
            prop_assert!(h as usize <= counts.len());
        }

        #[test]
        fn cpmp_h_mode_dominates_overall_mean(counts in prop::collection::vec(0u64..=1000, 1..=50)) {
            let p = profile(&counts);
            if let Some(meaningful) = cpmp(&p, CpmpMode::HIndex).unwrap() {
                let all = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
                prop_assert!(meaningful >= all - 1e-9);
            }
        }

        #[test]
        fn aggregation_flag_monotone(papers in 0u64..5000, more in 0u64..500, window in 1.0f64..20.0, longer in 0.0f64..5.0) {
            let (f1, _) = flag_aggregation(papers, window, 100.0).unwrap();
            let (f2, _) = flag_aggregation(papers + more, window, 100.0).unwrap();
            let (f3, _) = flag_aggregation(papers, window + longer, 100.0).unwrap();
            prop_assert!(!f1 || f2);
            prop_assert!(!f3 || f1);
        }
    }
}
