use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{finish, read_rows, writer, PROFILES_HEADER};
use crate::error::{ErrorCode, IngestError};

/// Per-paper citation counts of one researcher.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperProfile {
    pub name: String,
    /// Kept sorted in descending order; duplicates are meaningful.
    pub paper_citations: Vec<u64>,
}

impl PaperProfile {
    pub fn new(name: impl Into<String>, mut paper_citations: Vec<u64>) -> Self {
        paper_citations.sort_unstable_by(|a, b| b.cmp(a));
        PaperProfile {
            name: name.into(),
            paper_citations,
        }
    }
}

/// Parses `name,paper_id,citations` rows into one profile per name, sorted
/// by name.
pub fn parse_paper_profiles<R: Read>(source: R) -> Result<Vec<PaperProfile>, IngestError> {
    let rows = read_rows(source, PROFILES_HEADER)?;
    let mut by_name: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for row in &rows {
        let name = row.name(0, "name")?;
        let paper_id = row.get(1);
        if paper_id.is_empty() {
            return Err(row.err(ErrorCode::MalformedRow, "paper_id", "paper_id is blank"));
        }
        let citations = row.count(2, "citations")?;
        if !seen.insert((name.clone(), paper_id.to_string())) {
            return Err(row.err(
                ErrorCode::DuplicateKey,
                "paper_id",
                format!("paper `{paper_id}` listed twice for {name}"),
            ));
        }
        by_name.entry(name).or_default().push(citations);
    }
    Ok(by_name
        .into_iter()
        .map(|(name, counts)| PaperProfile::new(name, counts))
        .collect())
}

/// Canonical CSV; paper ids are renumbered `p1, p2, ...` in descending
/// citation order since only the counts are retained.
pub fn emit_paper_profiles(profiles: &[PaperProfile]) -> String {
    let mut sorted: Vec<&PaperProfile> = profiles.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let mut w = writer();
    w.write_record(PROFILES_HEADER).expect("write");
    for p in sorted {
        let mut counts = p.paper_citations.clone();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        for (i, c) in counts.iter().enumerate() {
            w.write_record([p.name.as_str(), &format!("p{}", i + 1), &c.to_string()])
                .expect("write");
        }
    }
    finish(w)
}
